#include "lcrec/closure.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "lcrec/error.hpp"

namespace lcrec {

const char* closure_kind_name(ClosureKind k) {
    switch (k) {
        case ClosureKind::Sphere: return "sphere";
        case ClosureKind::Box: return "box";
        case ClosureKind::Hull: return "hull";
    }
    return "?";
}

ClosureKind closure_kind_from_name(const std::string& name) {
    if (name == "sphere") return ClosureKind::Sphere;
    if (name == "box") return ClosureKind::Box;
    if (name == "hull") return ClosureKind::Hull;
    throw ValidationError("unknown closure kind '" + name + "' (valid: sphere, box, hull)");
}

namespace {

void require_points(const Eigen::MatrixXf& points) {
    if (points.rows() < 1) throw ValidationError("closure needs at least one generating point");
    if (!points.allFinite()) throw ValidationError("generating points contain non-finite values");
}

double sq_dist_rows(const Eigen::MatrixXf& points, int a, int b) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        const double d = static_cast<double>(points(a, j)) - static_cast<double>(points(b, j));
        s += d * d;
    }
    return s;
}

// Furthest point from `from` by index; exact linear scan.
int farthest_from(const Eigen::MatrixXf& points, int from) {
    int best = from;
    double best_d = -1.0;
    for (int i = 0; i < points.rows(); ++i) {
        const double d = sq_dist_rows(points, from, i);
        if (d > best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

LatentClosure LatentClosure::sphere(std::vector<float> center, float radius) {
    LatentClosure c;
    c.kind_ = ClosureKind::Sphere;
    c.dim_ = static_cast<int>(center.size());
    c.center_ = std::move(center);
    c.radius_ = radius;
    return c;
}

LatentClosure LatentClosure::box(std::vector<float> lo, std::vector<float> hi) {
    LatentClosure c;
    c.kind_ = ClosureKind::Box;
    c.dim_ = static_cast<int>(lo.size());
    c.lo_ = std::move(lo);
    c.hi_ = std::move(hi);
    return c;
}

LatentClosure LatentClosure::hull(std::vector<float> points, int dim) {
    LatentClosure c;
    c.kind_ = ClosureKind::Hull;
    c.dim_ = dim;
    c.point_count_ = dim > 0 ? static_cast<int>(points.size()) / dim : 0;
    c.points_ = std::move(points);
    return c;
}

LatentClosure build_sphere(const Eigen::MatrixXf& points, SphereMode mode) {
    require_points(points);
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());

    // Diameter-realizing pair: exact pairwise search at small n, otherwise the
    // iterated farthest-point sweep.
    int pa = 0, pb = 0;
    double best = 0.0;
    if (n <= 4096) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double dist = sq_dist_rows(points, i, j);
                if (dist > best) {
                    best = dist;
                    pa = i;
                    pb = j;
                }
            }
    } else {
        int a = farthest_from(points, 0);
        for (int sweep = 0; sweep < 8; ++sweep) {
            const int b = farthest_from(points, a);
            const double dist = sq_dist_rows(points, a, b);
            if (dist > best) {
                best = dist;
                pa = a;
                pb = b;
            } else {
                break;
            }
            a = b;
        }
    }

    std::vector<float> center(d);
    for (int j = 0; j < d; ++j) {
        const double mid =
            0.5 * (static_cast<double>(points(pa, j)) + static_cast<double>(points(pb, j)));
        center[j] = static_cast<float>(mid);
    }

    auto max_dist_to_center = [&]() {
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) {
                const double diff = static_cast<double>(points(i, j)) - static_cast<double>(center[j]);
                s += diff * diff;
            }
            m = std::max(m, s);
        }
        return std::sqrt(m);
    };

    float radius;
    if (mode == SphereMode::HalfDiameter) {
        radius = static_cast<float>(0.5 * std::sqrt(best));
    } else {
        radius = static_cast<float>(max_dist_to_center());
        // binary32 rounding of center/radius must not break containment
        while (static_cast<double>(radius) < max_dist_to_center())
            radius = std::nextafter(radius, std::numeric_limits<float>::infinity());
    }
    return LatentClosure::sphere(std::move(center), radius);
}

LatentClosure build_box(const Eigen::MatrixXf& points) {
    require_points(points);
    const int d = static_cast<int>(points.cols());
    std::vector<float> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
        lo[j] = points.col(j).minCoeff();
        hi[j] = points.col(j).maxCoeff();
    }
    return LatentClosure::box(std::move(lo), std::move(hi));
}

LatentClosure build_hull(const Eigen::MatrixXf& points) {
    require_points(points);
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    // remove exact duplicate rows, preserving first occurrences
    std::vector<float> kept;
    kept.reserve(static_cast<std::size_t>(n) * d);
    int kept_n = 0;
    for (int i = 0; i < n; ++i) {
        bool dup = false;
        for (int k = 0; k < kept_n && !dup; ++k) {
            dup = true;
            for (int j = 0; j < d; ++j) {
                if (kept[static_cast<std::size_t>(k) * d + j] != points(i, j)) {
                    dup = false;
                    break;
                }
            }
        }
        if (!dup) {
            for (int j = 0; j < d; ++j) kept.push_back(points(i, j));
            ++kept_n;
        }
    }
    return LatentClosure::hull(std::move(kept), d);
}

LatentClosure build_closure(ClosureKind kind, const Eigen::MatrixXf& points, SphereMode mode) {
    switch (kind) {
        case ClosureKind::Sphere: return build_sphere(points, mode);
        case ClosureKind::Box: return build_box(points);
        case ClosureKind::Hull: return build_hull(points);
    }
    throw ValidationError("invalid closure kind");
}

double LatentClosure::distance(const Eigen::VectorXd& x) const {
    return distance(x, kDefaultHullTol, 0);
}

double LatentClosure::distance(const Eigen::VectorXd& x, double hull_tol, int hull_max_iter) const {
    if (static_cast<int>(x.size()) != dim_)
        throw ValidationError("query dimension " + std::to_string(x.size()) +
                              " does not match closure dimension " + std::to_string(dim_));
    switch (kind_) {
        case ClosureKind::Sphere: {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) {
                const double diff = x[j] - static_cast<double>(center_[j]);
                s += diff * diff;
            }
            return std::max(0.0, std::sqrt(s) - static_cast<double>(radius_));
        }
        case ClosureKind::Box: {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) {
                const double below = static_cast<double>(lo_[j]) - x[j];
                const double above = x[j] - static_cast<double>(hi_[j]);
                const double gap = std::max({0.0, below, above});
                s += gap * gap;
            }
            return std::sqrt(s);
        }
        case ClosureKind::Hull: {
            Eigen::MatrixXd p(point_count_, dim_);
            for (int i = 0; i < point_count_; ++i)
                for (int j = 0; j < dim_; ++j)
                    p(i, j) = static_cast<double>(points_[static_cast<std::size_t>(i) * dim_ + j]);
            return hull_distance_fw(p, x, hull_tol, hull_max_iter).distance;
        }
    }
    throw ValidationError("invalid closure kind");
}

int default_hull_max_iter(int n) { return std::max(1000, 10 * n); }

// Away-steps Frank-Wolfe (Guelat-Marcotte): plain FW zig-zags at O(1/k) when
// the projection lands inside a face, which cannot reach the tight gap
// tolerances the verification oracles need; the away variant converges
// linearly on polytopes while keeping the same duality-gap certificate and
// exact line search.
HullDistanceSolution hull_distance_fw(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                                      double tol, int max_iter) {
    const int n = static_cast<int>(points.rows());
    if (n < 1) throw ValidationError("hull distance needs at least one point");
    if (points.cols() != x.size())
        throw ValidationError("query dimension does not match point dimension");
    if (!points.allFinite() || !x.allFinite())
        throw ValidationError("hull distance inputs must be finite");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    if (max_iter <= 0) max_iter = default_hull_max_iter(n);

    HullDistanceSolution sol;
    sol.weights = Eigen::VectorXd::Zero(n);

    // start from the generating point nearest to x
    int start = 0;
    double best = (points.row(0).transpose() - x).squaredNorm();
    for (int i = 1; i < n; ++i) {
        const double d = (points.row(i).transpose() - x).squaredNorm();
        if (d < best) {
            best = d;
            start = i;
        }
    }
    sol.weights[start] = 1.0;
    Eigen::VectorXd z = points.row(start).transpose();

    for (int iter = 1; iter <= max_iter; ++iter) {
        sol.iterations = iter;
        const Eigen::VectorXd resid = z - x;
        // gradient over weights: g_i = 2 p_i . (z - x)
        const Eigen::VectorXd g = 2.0 * (points * resid);
        const double g_dot_lambda = 2.0 * resid.dot(z);

        int s = 0;
        for (int i = 1; i < n; ++i)
            if (g[i] < g[s]) s = i;
        sol.duality_gap = g_dot_lambda - g[s];
        if (sol.duality_gap <= tol) {
            sol.converged = true;
            break;
        }

        // away vertex: worst active coordinate
        int a = -1;
        for (int i = 0; i < n; ++i)
            if (sol.weights[i] > 0.0 && (a < 0 || g[i] > g[a])) a = i;

        const bool away_better =
            a >= 0 && sol.weights[a] < 1.0 && (g[a] - g_dot_lambda) > sol.duality_gap;

        Eigen::VectorXd dir;
        double gamma_max;
        if (away_better) {
            dir = z - points.row(a).transpose();
            gamma_max = sol.weights[a] / (1.0 - sol.weights[a]);
        } else {
            dir = points.row(s).transpose() - z;
            gamma_max = 1.0;
        }
        const double denom = dir.squaredNorm();
        if (denom <= 0.0) {
            // the iterate coincides with the selected vertex: nothing to move
            sol.converged = sol.duality_gap <= tol;
            break;
        }
        const double gamma = std::clamp((x - z).dot(dir) / denom, 0.0, gamma_max);
        if (gamma <= 0.0) break;  // fp floor reached

        if (away_better) {
            sol.weights *= (1.0 + gamma);
            sol.weights[a] -= gamma;
            if (gamma >= gamma_max || sol.weights[a] < 0.0) sol.weights[a] = 0.0;
        } else {
            sol.weights *= (1.0 - gamma);
            sol.weights[s] += gamma;
        }
        if (iter % 128 == 0)
            z = points.transpose() * sol.weights;  // refresh against fp drift
        else
            z += gamma * dir;
    }

    sol.nearest_point = points.transpose() * sol.weights;
    sol.distance = (sol.nearest_point - x).norm();
    sol.gap_warning = !sol.converged && sol.duality_gap > 1e3 * tol;
    return sol;
}

namespace {

double cross(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
    const Eigen::Vector2d ab = b - a;
    const double denom = ab.squaredNorm();
    if (denom <= 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / denom, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

}  // namespace

double hull_distance_exact_2d(const Eigen::MatrixXd& points, const Eigen::Vector2d& x) {
    if (points.cols() != 2) throw ValidationError("exact oracle requires 2-D points");
    const int n = static_cast<int>(points.rows());
    if (n < 1) throw ValidationError("exact oracle needs at least one point");

    std::vector<Eigen::Vector2d> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = points.row(i).transpose();
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a == b; }),
              pts.end());

    // Andrew's monotone chain; strictly convex turns only.
    std::vector<Eigen::Vector2d> hull;
    if (pts.size() <= 2) {
        hull = pts;
    } else {
        std::vector<Eigen::Vector2d> h(2 * pts.size());
        std::size_t k = 0;
        for (const auto& p : pts) {
            while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0.0) --k;
            h[k++] = p;
        }
        const std::size_t lower = k + 1;
        for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
            while (k >= lower && cross(h[k - 2], h[k - 1], *it) <= 0.0) --k;
            h[k++] = *it;
        }
        h.resize(k - 1);
        hull = std::move(h);
    }

    if (hull.size() == 1) return (x - hull[0]).norm();
    if (hull.size() == 2) return point_segment_distance(x, hull[0], hull[1]);

    bool inside = true;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, x) < 0.0) {  // hull is counter-clockwise
            inside = false;
            break;
        }
    }
    if (inside) return 0.0;

    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hull.size(); ++i)
        best = std::min(best, point_segment_distance(x, hull[i], hull[(i + 1) % hull.size()]));
    return best;
}

namespace {

constexpr char kClosureMagic[4] = {'L', 'U', 'C', 'L'};
constexpr std::uint32_t kClosureVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}
void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}
void put_f32(std::ostream& out, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(out, v);
}
std::uint32_t get_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError(path + ": truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError(path + ": truncated file");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}
float get_f32(std::istream& in, const std::string& path) {
    std::uint32_t v = get_u32(in, path);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

}  // namespace

void save_closures(const std::vector<UserClosure>& closures, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write closure cache: " + path);
    out.write(kClosureMagic, 4);
    put_u32(out, kClosureVersion);
    put_u64(out, closures.size());
    put_u64(out, closures.empty() ? 0 : static_cast<std::uint64_t>(closures.front().closure.dim()));
    for (const auto& uc : closures) {
        const auto& c = uc.closure;
        put_u32(out, static_cast<std::uint32_t>(uc.user_id.size()));
        out.write(uc.user_id.data(), static_cast<std::streamsize>(uc.user_id.size()));
        out.put(static_cast<char>(c.kind()));
        switch (c.kind()) {
            case ClosureKind::Sphere:
                for (float f : c.center()) put_f32(out, f);
                put_f32(out, c.radius());
                break;
            case ClosureKind::Box:
                for (float f : c.lo()) put_f32(out, f);
                for (float f : c.hi()) put_f32(out, f);
                break;
            case ClosureKind::Hull:
                put_u64(out, static_cast<std::uint64_t>(c.point_count()));
                for (float f : c.points()) put_f32(out, f);
                break;
        }
    }
}

std::vector<UserClosure> load_closures(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open closure cache: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kClosureMagic, 4) != 0)
        throw FormatError(path + ": missing LUCL magic");
    if (get_u32(in, path) != kClosureVersion) throw FormatError(path + ": unsupported version");
    const std::uint64_t count = get_u64(in, path);
    const int dim = static_cast<int>(get_u64(in, path));

    std::vector<UserClosure> out;
    out.reserve(count);
    for (std::uint64_t r = 0; r < count; ++r) {
        UserClosure uc;
        const std::uint32_t len = get_u32(in, path);
        uc.user_id.resize(len);
        if (len && !in.read(uc.user_id.data(), len)) throw FormatError(path + ": truncated id");
        const int tag = in.get();
        if (tag < 0 || tag > 2) throw FormatError(path + ": bad closure tag");
        switch (static_cast<ClosureKind>(tag)) {
            case ClosureKind::Sphere: {
                std::vector<float> center(dim);
                for (auto& f : center) f = get_f32(in, path);
                const float radius = get_f32(in, path);
                uc.closure = LatentClosure::sphere(std::move(center), radius);
                break;
            }
            case ClosureKind::Box: {
                std::vector<float> lo(dim), hi(dim);
                for (auto& f : lo) f = get_f32(in, path);
                for (auto& f : hi) f = get_f32(in, path);
                uc.closure = LatentClosure::box(std::move(lo), std::move(hi));
                break;
            }
            case ClosureKind::Hull: {
                const std::uint64_t rows = get_u64(in, path);
                std::vector<float> pts(rows * static_cast<std::uint64_t>(dim));
                for (auto& f : pts) f = get_f32(in, path);
                uc.closure = LatentClosure::hull(std::move(pts), dim);
                break;
            }
        }
        out.push_back(std::move(uc));
    }
    return out;
}

}  // namespace lcrec

#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace lcrec {

enum class ClosureKind : int { Sphere = 0, Box = 1, Hull = 2 };

const char* closure_kind_name(ClosureKind k);
ClosureKind closure_kind_from_name(const std::string& name);

enum class SphereMode {
    Enclosing,     // radius = max distance from the furthest-pair midpoint
    HalfDiameter,  // literal half of the furthest-pair distance
};

// Solution of the simplex-constrained least-squares problem behind the hull
// distance: min over convex weights w of |P^T w - x|^2.
struct HullDistanceSolution {
    Eigen::VectorXd weights;        // convex combination over generating points
    Eigen::VectorXd nearest_point;  // P^T weights
    double distance = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    bool converged = false;  // duality gap <= tol
    bool gap_warning = false;  // stopped at max_iter with gap > 1e3 * tol
};

// A convex region over a user's consumed-item embeddings. Payloads are kept
// in binary32, matching the persistence format, so cached closures reload
// bit-identically. All distance arithmetic runs in double.
class LatentClosure {
public:
    ClosureKind kind() const { return kind_; }
    int dim() const { return dim_; }

    // sphere accessors
    const std::vector<float>& center() const { return center_; }
    float radius() const { return radius_; }
    // box accessors
    const std::vector<float>& lo() const { return lo_; }
    const std::vector<float>& hi() const { return hi_; }
    // hull accessors (deduplicated generating points, row-major)
    const std::vector<float>& points() const { return points_; }
    int point_count() const { return point_count_; }

    // Euclidean distance from x to the closed region; 0 inside.
    double distance(const Eigen::VectorXd& x) const;
    double distance(const Eigen::VectorXd& x, double hull_tol, int hull_max_iter) const;

    static LatentClosure sphere(std::vector<float> center, float radius);
    static LatentClosure box(std::vector<float> lo, std::vector<float> hi);
    static LatentClosure hull(std::vector<float> points, int dim);

private:
    ClosureKind kind_ = ClosureKind::Sphere;
    int dim_ = 0;
    std::vector<float> center_;
    float radius_ = 0.0f;
    std::vector<float> lo_, hi_;
    std::vector<float> points_;
    int point_count_ = 0;
};

// Builders over an n x d matrix of generating points (one point per row).
LatentClosure build_sphere(const Eigen::MatrixXf& points,
                           SphereMode mode = SphereMode::Enclosing);
LatentClosure build_box(const Eigen::MatrixXf& points);
LatentClosure build_hull(const Eigen::MatrixXf& points);
LatentClosure build_closure(ClosureKind kind, const Eigen::MatrixXf& points,
                            SphereMode sphere_mode = SphereMode::Enclosing);

constexpr double kDefaultHullTol = 1e-8;

// max(1000, 10*n) when max_iter <= 0.
int default_hull_max_iter(int n);

// Frank-Wolfe with exact line search on f(w) = |P^T w - x|^2 over the
// probability simplex. Terminates when the duality gap drops to tol or at
// max_iter. The returned distance sqrt(f) upper-bounds the true hull
// distance, with |returned - true| <= sqrt(gap).
HullDistanceSolution hull_distance_fw(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                                      double tol = kDefaultHullTol, int max_iter = 0);

// Exact 2-D oracle: monotone-chain convex hull, then the minimum over hull
// edges/vertices (0 if x is inside). Verification counterpart of the solver.
double hull_distance_exact_2d(const Eigen::MatrixXd& points, const Eigen::Vector2d& x);

// Per-user closure cache, same float conventions as the embedding format.
struct UserClosure {
    std::string user_id;
    LatentClosure closure;
};
void save_closures(const std::vector<UserClosure>& closures, const std::string& path);
std::vector<UserClosure> load_closures(const std::string& path);

}  // namespace lcrec

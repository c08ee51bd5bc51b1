#include "lcrec/stats.hpp"

#include <cmath>
#include <limits>

#include "lcrec/error.hpp"

namespace lcrec {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// Regularized lower incomplete gamma P(a, x) by series expansion.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 1; n <= 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 3e-14) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by continued fraction.
double gamma_q_cf(double a, double x) {
    constexpr double kFpMin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 3e-14) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete_beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double chi_square_sf(double x, int df) {
    if (df < 1) throw ValidationError("chi_square_sf needs df >= 1");
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * df;
    const double half_x = 0.5 * x;
    if (half_x < a + 1.0) return 1.0 - gamma_p_series(a, half_x);
    return gamma_q_cf(a, half_x);
}

TTestResult welch_t_test(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2)
        throw ValidationError("welch_t_test needs at least 2 observations per sample");

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double ma = 0.0, mb = 0.0;
    for (double v : a) ma += v;
    for (double v : b) mb += v;
    ma /= na;
    mb /= nb;
    double va = 0.0, vb = 0.0;
    for (double v : a) va += (v - ma) * (v - ma);
    for (double v : b) vb += (v - mb) * (v - mb);
    va /= (na - 1.0);
    vb /= (nb - 1.0);

    TTestResult res;
    const double se2 = va / na + vb / nb;
    if (se2 <= 0.0) {
        // both samples constant: degenerate but well-defined outcomes
        res.t = 0.0;
        res.df = na + nb - 2.0;
        res.p = (ma == mb) ? 1.0 : 0.0;
        if (ma != mb) res.t = std::numeric_limits<double>::infinity() * (ma > mb ? 1.0 : -1.0);
        return res;
    }

    res.t = (ma - mb) / std::sqrt(se2);
    res.df = se2 * se2 /
             ((va / na) * (va / na) / (na - 1.0) + (vb / nb) * (vb / nb) / (nb - 1.0));
    // two-sided p for Student's t: I_{df/(t^2+df)}(df/2, 1/2)
    res.p = incomplete_beta(0.5 * res.df, 0.5, res.df / (res.t * res.t + res.df));
    return res;
}

}  // namespace lcrec

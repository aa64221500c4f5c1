#include "sbqe/stats.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sbqe/error.hpp"

namespace sbqe {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) {
            return h;
        }
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

} // namespace

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw RangeError("mean of an empty sample");
    }
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
    const double m = mean(xs);
    if (xs.size() < 2) {
        return 0.0;
    }
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
        throw RangeError("incomplete beta needs a, b > 0 and x in [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return x;
    }
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double df) {
    if (!(df > 0.0)) {
        throw RangeError("degrees of freedom must be positive");
    }
    if (std::isnan(t)) {
        throw RangeError("t statistic is NaN");
    }
    if (std::isinf(t)) {
        return t > 0 ? 0.0 : 1.0;
    }
    const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
    return t >= 0.0 ? tail : 1.0 - tail;
}

double student_t_two_tailed_p(double t, double df) {
    const double p = 2.0 * student_t_sf(std::abs(t), df);
    return std::min(1.0, std::max(0.0, p));
}

std::string_view to_string(TTestFlag flag) noexcept {
    switch (flag) {
    case TTestFlag::zero_difference:
        return "zero_difference";
    case TTestFlag::zero_variance:
        return "zero_variance";
    case TTestFlag::none:
        break;
    }
    return "none";
}

PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw PairingError("paired samples differ in length: " + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()));
    }
    if (a.size() < 2) {
        throw PairingError("paired test needs at least 2 pairs");
    }
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        d[i] = a[i] - b[i];
    }
    PairedTTest r;
    r.n = d.size();
    r.df = static_cast<double>(r.n - 1);
    r.mean_diff = mean(d);
    r.std_diff = sample_std(d);
    bool all_zero = true;
    bool all_equal = true;
    for (double v : d) {
        all_zero = all_zero && v == 0.0;
        all_equal = all_equal && v == d.front();
    }
    if (all_zero) {
        r.t = std::numeric_limits<double>::quiet_NaN();
        r.p = 1.0;
        r.flag = TTestFlag::zero_difference;
        return r;
    }
    if (all_equal || r.std_diff == 0.0) {
        r.std_diff = 0.0;
        r.t = r.mean_diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        r.flag = TTestFlag::zero_variance;
        return r;
    }
    r.t = r.mean_diff / (r.std_diff / std::sqrt(static_cast<double>(r.n)));
    r.p = student_t_two_tailed_p(r.t, r.df);
    return r;
}

} // namespace sbqe

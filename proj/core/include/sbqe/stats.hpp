#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace sbqe {

double mean(std::span<const double> xs);
// Sample standard deviation (n - 1 denominator); 0 for a single value.
double sample_std(std::span<const double> xs);

// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

// P(T > t) for Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);
double student_t_two_tailed_p(double t, double df);

enum class TTestFlag { none, zero_difference, zero_variance };
[[nodiscard]] std::string_view to_string(TTestFlag flag) noexcept;

struct PairedTTest {
    std::size_t n = 0;
    double mean_diff = 0.0;
    double std_diff = 0.0;
    double t = 0.0;  // NaN when every difference is zero, +-inf when they are all equal
    double df = 0.0;
    double p = 1.0;
    TTestFlag flag = TTestFlag::none;
};

// Two-tailed test on d = a - b. Throws PairingError unless both have the
// same length of at least 2.
PairedTTest paired_t_test(std::span<const double> a, std::span<const double> b);

} // namespace sbqe

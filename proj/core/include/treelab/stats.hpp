#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "treelab/model.hpp"
#include "treelab/population.hpp"

namespace treelab {

// Atomic empirical measure on [0, inf), samples sorted ascending.
class EmpiricalDistribution {
public:
    // Throws ArgumentError on empty input, negative or non-finite values.
    explicit EmpiricalDistribution(std::vector<double> samples);

    std::size_t count() const noexcept { return samples_.size(); }
    std::span<const double> samples() const noexcept { return samples_; }
    // 1-based order statistic x_(j).
    double order_statistic(std::size_t j) const { return samples_.at(j - 1); }

private:
    std::vector<double> samples_;
};

// Strictly positive values only; the number of dropped zeros is kept as a
// diagnostic (Im Gamma = 0 happens only at eta = 0 outside the bands).
struct PositiveSample {
    std::vector<double> values;
    std::size_t dropped = 0;
};
PositiveSample positive_part(std::span<const double> values);

struct WidthStats {
    double xi_minus = 0.0;
    double xi_plus = 0.0;
    double delta = 0.0;
    double alpha = 0.5;
};

// xi_-(alpha) = sup{xi : nu[0, xi) <= alpha}, xi_+(alpha) = inf{xi : nu(xi, inf) <= alpha}
// evaluated exactly on the atomic measure:
//   xi_- = x_(k), k = max{j : (j - 1)/N <= alpha}
//   xi_+ = x_(m), m = min{j : (N - j)/N <= alpha}
// delta = 1 - xi_-/xi_+, and 0 when xi_+ = 0. AlphaRangeError unless 0 < alpha <= 1/2.
WidthStats quantile_brackets(const EmpiricalDistribution& dist, double alpha);

// delta(X, alpha) for raw (unsorted) data.
double relative_width(std::span<const double> values, double alpha);

// Two-sample Kolmogorov-Smirnov statistic of sorted samples.
double ks_distance_sorted(std::span<const double> a, std::span<const double> b);
double ks_distance(std::span<const double> a, std::span<const double> b);
// Asymptotic two-sample critical value at significance `level`.
double ks_critical_value(std::size_t n, std::size_t m, double level);

// Both sides of one inequality. margin = rhs - lhs; NaN fields are "not
// applicable" and serialize as null.
struct CheckReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    bool passed = false;
    std::size_t n = 0;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double kappa = std::numeric_limits<double>::quiet_NaN();
};

CheckReport make_report(std::string name, double lhs, double rhs, std::size_t n, double tolerance = 0.0);

// Relative-width calculus, each rule evaluated on empirical data.
// Rule 1: delta(X, alpha_1) <= delta(X, alpha_2) for alpha_1 >= alpha_2.
CheckReport check_alpha_monotonicity(std::span<const double> x, double alpha_1, double alpha_2);
// Rule 2: delta(eta + X, alpha) <= delta(X, alpha) for eta >= 0.
CheckReport check_shift(std::span<const double> x, double eta, double alpha);
// Rule 3: delta(1/X, alpha) == delta(X, alpha) to 1e-12.
CheckReport check_inversion(std::span<const double> x, double alpha);
// Rule 4: delta(prod X_j, sum alpha_j) <= sum delta(X_j, alpha_j) for jointly
// sampled factors (equal lengths).
CheckReport check_product(std::span<const std::vector<double>> factors, std::span<const double> alphas);
// Rule 5: delta(sum X_j, K alpha) <= delta(X, alpha) for identically
// distributed summands. The right side is max_j delta(X_j, alpha), which is
// delta(X, alpha) when the empirical marginals coincide.
CheckReport check_iid_sum(std::span<const std::vector<double>> summands, double alpha);

struct DeltaRulesInput {
    std::vector<double> x;
    double alpha = 0.25;
    double alpha_larger = 0.5;  // rule 1 compares alpha_larger against alpha
    double shift = 1.0;         // rule 2
    std::vector<std::vector<double>> factors;
    std::vector<double> factor_alphas;
    std::vector<std::vector<double>> summands;
    double sum_alpha = 0.1;
};

// Runs rules 1-5 (rules 4 and 5 only when their inputs are present).
// AlphaRangeError if any composite alpha leaves (0, 1/2].
std::vector<CheckReport> delta_rules_check(const DeltaRulesInput& input);

// log(mean X) - mean(log X) - (1/(2K(K-1))) sum_{i != j} ((X_i - X_j)/(X_i + X_j))^2.
// Non-negative up to rounding for positive X and K >= 2.
double jensen_boost_gap(std::span<const double> values);

struct LyapunovEstimate {
    double gamma_mean = 0.0;
    double std_error = 0.0;
    cplx w_mean{0.0, 0.0};
    std::size_t sample_count = 0;
};

// w = average over pools and samples of log(sqrt(K) Gamma) (principal
// branch), gamma = -Re w. ZeroGammaError if any sample is 0.
LyapunovEstimate lyapunov_estimate(std::span<const GammaPool> pools, int branching);

// Lyapunov estimates of successive generations of one evolving ensemble,
// averaged. Consecutive pools share ancestry, so the per-snapshot error is
// not the error of the average; the series error uses batch means over
// contiguous runs of generations instead.
class LyapunovSeries {
public:
    explicit LyapunovSeries(int branching) : branching_(branching) {}

    void add(std::span<const GammaPool> pools);
    std::size_t size() const noexcept { return re_.size(); }
    // std_error from `batches` contiguous batch means (fewer if the series
    // is shorter); a single snapshot falls back to its own error.
    LyapunovEstimate estimate(std::size_t batches = 10) const;

private:
    int branching_;
    std::vector<double> re_;
    std::vector<double> im_;
    std::size_t samples_ = 0;
    double last_error_ = 0.0;
};

struct FluctuationReport {
    CheckReport im_width;       // avg_theta delta(Im Gamma, alpha)^2 <= 8 gamma / (kappa alpha^2)
    CheckReport modulus_width;  // [avg_theta delta(|Gamma|^2, alpha)]^2 <= 32 (K+1)^2 gamma / (kappa alpha^2)
    std::size_t dropped = 0;
};

// rhs_scale multiplies both right sides (1 in normal use).
FluctuationReport fluctuation_bound_check(std::span<const GammaPool> pools, double alpha, double kappa,
                                          double gamma, int branching, double rhs_scale = 1.0);

// B_s(a, b) = (|b - a| + 2/(1 - s)) / cos(pi s / 2). Requires 0 < s < 1, a < b.
double fractional_moment_budget(double s, double a, double b);

// Fraction of samples (over all pools) with |Gamma| > t.
double tail_fraction(std::span<const GammaPool> pools, double t);

// Trapezoid estimate of int P(|Gamma| > t) dE over the given (sorted) energy
// grid inside [a, b], against B_s(a, b) / t^s.
CheckReport tail_budget_check(std::span<const double> energies, std::span<const double> tail_fractions, double s,
                              double a, double b, double t, double rhs_scale = 1.0);

// avg_theta E[(Im Gamma + Im z / (2K))^{-1}] <= 2 K gamma / Im z. Requires Im z > 0.
CheckReport kotani_bound_check(std::span<const GammaPool> pools, double gamma, cplx z, int branching,
                               double rhs_scale = 1.0);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

// Sample mean with standard error sd / sqrt(n).
MeanEstimate mean_estimate(std::span<const double> values);

// Mean of a correlated series (successive generations) with the standard
// error of `batches` contiguous batch means. Leading entries that do not fill
// a batch count toward the mean only. A single entry has error 0.
MeanEstimate batch_means(std::span<const double> series, std::size_t batches);

// delta(values, alpha) and a batch-means standard error over `batches`
// contiguous batches.
MeanEstimate width_with_error(std::span<const double> values, double alpha, std::size_t batches = 20);

}  // namespace treelab

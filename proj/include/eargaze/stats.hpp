#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace eargaze::stats {

struct CorrelationResult {
  double r{0.0};
  int lag{0};  // x[i] is paired with y[i + lag]
  std::optional<double> p_value;

  bool operator==(const CorrelationResult&) const = default;
};

/// Pearson product-moment correlation. Throws DegenerateError when either
/// input has zero variance, ValidationError on length mismatch or n < 3.
double pearson(std::span<const double> x, std::span<const double> y);

/// Two-sided p for H0: rho = 0 via the t distribution with n - 2 dof.
double pearson_p_value(double r, std::size_t n);

/// Pearson r at the integer shift in [-max_lag, max_lag] maximising |r| over
/// the overlapping region. Ties go to the smaller |lag|, then the negative lag.
/// Shifts whose overlap is degenerate are skipped; if all are, throws
/// DegenerateError.
CorrelationResult max_lagged_correlation(std::span<const double> x, std::span<const double> y, int max_lag);

/// Same contract, evaluated the slow way (independent two-pass Pearson per
/// shift). Kept as the serial reference for the batched kernel.
CorrelationResult max_lagged_correlation_reference(std::span<const double> x, std::span<const double> y,
                                                   int max_lag);

/// |r| is clamped to 1 - 1e-7 before atanh.
double fisher_z(double r);
/// tanh(mean(atanh(r_i))). Throws ValidationError on empty input.
double fisher_mean(std::span<const double> rs);

/// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

double spearman(std::span<const double> x, std::span<const double> y);

struct FriedmanResult {
  double statistic{0.0};
  double p_value{1.0};
};

/// Friedman chi-square with tie correction. `matrix` is subjects x treatments.
FriedmanResult friedman(const std::vector<std::vector<double>>& matrix);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

struct WilcoxonOptions {
  std::size_t exact_max_n{15};
};

/// Two-sided Wilcoxon signed-rank p. Zero differences are dropped; exact null
/// distribution for n <= exact_max_n, otherwise normal approximation with tie
/// and continuity correction.
double wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, WilcoxonOptions options = {});

/// p -> min(1, m p).
std::vector<double> bonferroni(std::span<const double> p_values);

double mean(std::span<const double> values);
/// Sample standard deviation (n - 1); zero for fewer than two values.
double sample_sd(std::span<const double> values);

}  // namespace eargaze::stats

#include "eargaze/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "eargaze/error.hpp"

namespace eargaze::stats {

namespace {

constexpr double kFisherClamp = 1.0 - 1e-7;
// Variance below this fraction of the raw second moment counts as constant.
constexpr double kDegenerateRatio = 1e-20;

struct Moments {
  double sxx{0.0}, syy{0.0}, sxy{0.0}, rawx{0.0}, rawy{0.0};
};

Moments two_pass(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  Moments m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
    m.rawx += x[i] * x[i];
    m.rawy += y[i] * y[i];
  }
  return m;
}

bool degenerate(double centred, double raw) { return !(centred > kDegenerateRatio * raw) || centred <= 0.0; }

double clamp_r(double r) { return std::clamp(r, -1.0, 1.0); }

// |r| values closer than this count as tied, so rounding in the prefix-sum
// path cannot overturn the tie-break order.
constexpr double kLagTieTolerance = 1e-12;

bool beats(double r, double best) { return std::abs(r) > std::abs(best) + kLagTieTolerance; }

// Visit shifts in tie-break order: 0, -1, +1, -2, +2, ...
template <class F>
void for_each_shift(int max_lag, F&& f) {
  f(0);
  for (int k = 1; k <= max_lag; ++k) {
    f(-k);
    f(k);
  }
}

void check_lag_inputs(std::span<const double> x, std::span<const double> y, int max_lag) {
  if (max_lag < 0) throw ValidationError("max_lag must be non-negative");
  if (x.size() != y.size()) throw ValidationError("lagged correlation: length mismatch");
  if (x.size() < static_cast<std::size_t>(max_lag) + 3) {
    throw ValidationError("lagged correlation: need at least max_lag + 3 samples");
  }
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  if (x.size() < 3) throw ValidationError("pearson: need at least 3 samples");
  const auto m = two_pass(x, y);
  if (degenerate(m.sxx, m.rawx) || degenerate(m.syy, m.rawy)) {
    throw DegenerateError("pearson: constant input");
  }
  return clamp_r(m.sxy / std::sqrt(m.sxx * m.syy));
}

double pearson_p_value(double r, std::size_t n) {
  if (n < 3) throw ValidationError("pearson_p_value: need n >= 3");
  if (std::abs(r) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n) - 2.0;
  const double t = std::abs(r) * std::sqrt(dof / (1.0 - r * r));
  const boost::math::students_t dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

CorrelationResult max_lagged_correlation(std::span<const double> x, std::span<const double> y, int max_lag) {
  check_lag_inputs(x, y, max_lag);
  const auto n = x.size();
  // Centre globally, then window moments come from prefix sums; only the
  // cross product needs a pass per shift.
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  std::vector<double> xc(n), yc(n);
  std::vector<double> px(n + 1, 0.0), pxx(n + 1, 0.0), py(n + 1, 0.0), pyy(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    xc[i] = x[i] - mx;
    yc[i] = y[i] - my;
    px[i + 1] = px[i] + xc[i];
    pxx[i + 1] = pxx[i] + xc[i] * xc[i];
    py[i + 1] = py[i] + yc[i];
    pyy[i + 1] = pyy[i] + yc[i] * yc[i];
  }

  bool found = false;
  CorrelationResult best;
  for_each_shift(max_lag, [&](int lag) {
    const std::size_t shift = static_cast<std::size_t>(std::abs(lag));
    const std::size_t m = n - shift;
    const std::size_t xi = lag >= 0 ? 0 : shift;
    const std::size_t yi = lag >= 0 ? shift : 0;
    const double dm = static_cast<double>(m);
    const double sx = px[xi + m] - px[xi];
    const double sy = py[yi + m] - py[yi];
    const double rawx = pxx[xi + m] - pxx[xi];
    const double rawy = pyy[yi + m] - pyy[yi];
    const double vx = rawx - sx * sx / dm;
    const double vy = rawy - sy * sy / dm;
    if (degenerate(vx, rawx) || degenerate(vy, rawy)) return;
    double sxy = 0.0;
    const double* a = xc.data() + xi;
    const double* b = yc.data() + yi;
    for (std::size_t i = 0; i < m; ++i) sxy += a[i] * b[i];
    const double r = clamp_r((sxy - sx * sy / dm) / std::sqrt(vx * vy));
    if (!found || beats(r, best.r)) {
      best = {r, lag, std::nullopt};
      found = true;
    }
  });
  if (!found) throw DegenerateError("lagged correlation: every shift is degenerate");
  return best;
}

CorrelationResult max_lagged_correlation_reference(std::span<const double> x, std::span<const double> y,
                                                   int max_lag) {
  check_lag_inputs(x, y, max_lag);
  const auto n = x.size();
  bool found = false;
  CorrelationResult best;
  for_each_shift(max_lag, [&](int lag) {
    const std::size_t shift = static_cast<std::size_t>(std::abs(lag));
    const auto xs = lag >= 0 ? x.subspan(0, n - shift) : x.subspan(shift, n - shift);
    const auto ys = lag >= 0 ? y.subspan(shift, n - shift) : y.subspan(0, n - shift);
    double r = 0.0;
    try {
      r = pearson(xs, ys);
    } catch (const DegenerateError&) {
      return;
    }
    if (!found || beats(r, best.r)) {
      best = {r, lag, std::nullopt};
      found = true;
    }
  });
  if (!found) throw DegenerateError("lagged correlation: every shift is degenerate");
  return best;
}

double fisher_z(double r) {
  if (!std::isfinite(r) || std::abs(r) > 1.0) throw ValidationError("fisher_z: r outside [-1, 1]");
  return std::atanh(std::clamp(r, -kFisherClamp, kFisherClamp));
}

double fisher_mean(std::span<const double> rs) {
  if (rs.empty()) throw ValidationError("fisher_mean: empty input");
  double z = 0.0;
  for (double r : rs) z += fisher_z(r);
  return std::tanh(z / static_cast<double>(rs.size()));
}

std::vector<double> average_ranks(std::span<const double> values) {
  const auto n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw ValidationError("chi_square_sf: dof must be positive");
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, x));
}

FriedmanResult friedman(const std::vector<std::vector<double>>& matrix) {
  const auto n = matrix.size();
  if (n < 2) throw ValidationError("friedman: need at least 2 subjects");
  const auto k = matrix.front().size();
  if (k < 2) throw ValidationError("friedman: need at least 2 treatments");
  std::vector<double> rank_sums(k, 0.0);
  double tie_sum = 0.0;
  for (const auto& row : matrix) {
    if (row.size() != k) throw ValidationError("friedman: ragged matrix");
    const auto ranks = average_ranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    // Tie groups share a rank; group size t contributes t^3 - t.
    auto sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < k) {
      std::size_t j = i;
      while (j + 1 < k && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_sum += t * t * t - t;
      i = j + 1;
    }
  }
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  double ssr = 0.0;
  for (double r : rank_sums) ssr += r * r;
  const double raw = 12.0 / (dn * dk * (dk + 1.0)) * ssr - 3.0 * dn * (dk + 1.0);
  const double correction = 1.0 - tie_sum / (dn * (dk * dk * dk - dk));
  if (correction <= 1e-12) return {0.0, 1.0};
  const double statistic = std::max(0.0, raw / correction);
  return {statistic, chi_square_sf(statistic, dk - 1.0)};
}

double wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y, WilcoxonOptions options) {
  if (x.size() != y.size()) throw ValidationError("wilcoxon: length mismatch");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }
  if (diffs.empty()) throw DegenerateError("wilcoxon: all differences are zero");
  const auto n = diffs.size();
  if (n < 5) throw ValidationError("wilcoxon: need at least 5 non-zero differences");

  std::vector<double> magnitudes(n);
  for (std::size_t i = 0; i < n; ++i) magnitudes[i] = std::abs(diffs[i]);
  const auto ranks = average_ranks(magnitudes);

  if (n <= options.exact_max_n) {
    // Ranks are multiples of 1/2, so doubled ranks are integers and the null
    // distribution of the positive-rank sum is a subset-sum count.
    std::vector<int> doubled(n);
    int total = 0;
    int observed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      doubled[i] = static_cast<int>(std::lround(2.0 * ranks[i]));
      total += doubled[i];
      if (diffs[i] > 0) observed += doubled[i];
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    int reach = 0;
    for (int w : doubled) {
      for (int s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + w)] += counts[static_cast<std::size_t>(s)];
      reach += w;
    }
    double lower = 0.0;
    double upper = 0.0;
    for (int s = 0; s <= total; ++s) {
      if (s <= observed) lower += counts[static_cast<std::size_t>(s)];
      if (s >= observed) upper += counts[static_cast<std::size_t>(s)];
    }
    const double outcomes = std::ldexp(1.0, static_cast<int>(n));
    return std::min(1.0, 2.0 * std::min(lower, upper) / outcomes);
  }

  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (diffs[i] > 0) w_plus += ranks[i];
  }
  const double dn = static_cast<double>(n);
  const double mu = dn * (dn + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    auto sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return 1.0;
  const double dev = std::max(0.0, std::abs(w_plus - mu) - 0.5);
  const double z = dev / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

std::vector<double> bonferroni(std::span<const double> p_values) {
  const double m = static_cast<double>(p_values.size());
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("bonferroni: p-value outside [0, 1]");
    out.push_back(std::min(1.0, m * p));
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean: empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace eargaze::stats

#include "mtdiag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "mtdiag/error.hpp"

namespace mtdiag {

void PairedSample::validate() const {
  if (x.size() != y.size()) {
    throw Error("paired sample has " + std::to_string(x.size()) + " x values and " +
                std::to_string(y.size()) + " y values");
  }
  if (!labels.empty() && labels.size() != x.size()) {
    throw Error("paired sample has " + std::to_string(labels.size()) + " labels for " +
                std::to_string(x.size()) + " observations");
  }
  if (x.size() < 3) throw Error("paired sample needs at least 3 observations");
  std::set<std::string> seen(labels.begin(), labels.end());
  if (!labels.empty() && seen.size() != labels.size()) {
    throw Error("paired sample labels must be unique");
  }
}

namespace {

// regularized incomplete beta via the Lentz continued fraction
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double degrees_of_freedom) {
  if (!std::isfinite(t)) return 0.0;
  const double df = degrees_of_freedom;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

namespace {

double correlation_t_p(double coefficient, size_t n) {
  if (std::fabs(coefficient) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  const double t = coefficient * std::sqrt(df / (1.0 - coefficient * coefficient));
  return student_t_two_sided_p(t, df);
}

void require_size(const std::vector<double>& x, const std::vector<double>& y, const char* what) {
  if (x.size() != y.size()) throw Error(std::string(what) + ": length mismatch");
  if (x.size() < 3) throw Error(std::string(what) + ": needs at least 3 observations");
}

std::vector<double> midranks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&v](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double average_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = average_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

std::pair<double, double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  require_size(x, y, "pearson");
  const size_t n = x.size();
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error("pearson: zero variance makes the correlation undefined");
  }
  double r = sxy / std::sqrt(sxx * syy);
  r = std::clamp(r, -1.0, 1.0);
  return {r, correlation_t_p(r, n)};
}

std::pair<double, double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
  require_size(x, y, "spearman");
  auto rx = midranks(x);
  auto ry = midranks(y);
  try {
    return pearson(rx, ry);
  } catch (const Error&) {
    throw Error("spearman: all values tied in x or y");
  }
}

namespace {

// discordant pairs = inversions in y after a stable sort by (x, y)
int64_t count_discordant(std::vector<double>& y_sorted_by_x) {
  std::vector<double>& a = y_sorted_by_x;
  std::vector<double> buffer(a.size());
  int64_t inversions = 0;
  for (size_t width = 1; width < a.size(); width *= 2) {
    for (size_t lo = 0; lo < a.size(); lo += 2 * width) {
      const size_t mid = std::min(lo + width, a.size());
      const size_t hi = std::min(lo + 2 * width, a.size());
      if (mid >= hi) continue;
      size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (a[i] <= a[j]) {
          buffer[k++] = a[i++];
        } else {
          inversions += static_cast<int64_t>(mid - i);
          buffer[k++] = a[j++];
        }
      }
      while (i < mid) buffer[k++] = a[i++];
      while (j < hi) buffer[k++] = a[j++];
      std::copy(buffer.begin() + static_cast<ptrdiff_t>(lo),
                buffer.begin() + static_cast<ptrdiff_t>(hi),
                a.begin() + static_cast<ptrdiff_t>(lo));
    }
  }
  return inversions;
}

struct TieStats {
  int64_t pairs = 0;   // sum t(t-1)/2
  double cubic = 0.0;  // sum t(t-1)(t-2)
  double var = 0.0;    // sum t(t-1)(2t+5)
};

TieStats tie_stats(const std::vector<double>& sorted_values) {
  TieStats stats;
  size_t i = 0;
  while (i < sorted_values.size()) {
    size_t j = i;
    while (j + 1 < sorted_values.size() && sorted_values[j + 1] == sorted_values[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    stats.pairs += static_cast<int64_t>(t * (t - 1.0) / 2.0);
    stats.cubic += t * (t - 1.0) * (t - 2.0);
    stats.var += t * (t - 1.0) * (2.0 * t + 5.0);
    i = j + 1;
  }
  return stats;
}

}  // namespace

std::pair<double, double> kendall(const std::vector<double>& x, const std::vector<double>& y) {
  require_size(x, y, "kendall");
  const size_t n = x.size();

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  // joint ties: runs where both coordinates repeat
  int64_t joint_tie_pairs = 0;
  {
    size_t i = 0;
    while (i < n) {
      size_t j = i;
      while (j + 1 < n && xs[j + 1] == xs[i] && ys[j + 1] == ys[i]) ++j;
      const int64_t t = static_cast<int64_t>(j - i + 1);
      joint_tie_pairs += t * (t - 1) / 2;
      i = j + 1;
    }
  }

  const TieStats x_ties = tie_stats(xs);
  std::vector<double> ys_for_ties = ys;
  std::sort(ys_for_ties.begin(), ys_for_ties.end());
  const TieStats y_ties = tie_stats(ys_for_ties);

  std::vector<double> ys_mutable = ys;
  const int64_t discordant = count_discordant(ys_mutable);

  const int64_t total_pairs = static_cast<int64_t>(n) * static_cast<int64_t>(n - 1) / 2;
  const int64_t concordant_minus_discordant =
      total_pairs - x_ties.pairs - y_ties.pairs + joint_tie_pairs - 2 * discordant;

  const double denom_x = static_cast<double>(total_pairs - x_ties.pairs);
  const double denom_y = static_cast<double>(total_pairs - y_ties.pairs);
  if (denom_x <= 0.0 || denom_y <= 0.0) {
    throw Error("kendall: all values tied in x or y");
  }
  double tau = static_cast<double>(concordant_minus_discordant) /
               (std::sqrt(denom_x) * std::sqrt(denom_y));
  tau = std::clamp(tau, -1.0, 1.0);

  const double nd = static_cast<double>(n);
  const double m = nd * (nd - 1.0);
  double variance = (m * (2.0 * nd + 5.0) - x_ties.var - y_ties.var) / 18.0 +
                    (2.0 * static_cast<double>(x_ties.pairs) * static_cast<double>(y_ties.pairs)) / m;
  if (n > 2) {
    variance += x_ties.cubic * y_ties.cubic / (9.0 * m * (nd - 2.0));
  }
  const double z = static_cast<double>(concordant_minus_discordant) / std::sqrt(variance);
  return {tau, normal_two_sided_p(z)};
}

CorrelationResult correlate(const PairedSample& sample, double alpha) {
  sample.validate();
  CorrelationResult result;
  result.n = static_cast<int>(sample.size());
  result.alpha = alpha;
  std::tie(result.r, result.p_r) = pearson(sample.x, sample.y);
  std::tie(result.rho, result.p_rho) = spearman(sample.x, sample.y);
  std::tie(result.tau, result.p_tau) = kendall(sample.x, sample.y);
  result.significant_r = result.p_r < alpha;
  result.significant_rho = result.p_rho < alpha;
  result.significant_tau = result.p_tau < alpha;
  return result;
}

LooResult leave_one_out(const PairedSample& sample, double alpha) {
  sample.validate();
  if (sample.size() < 4) {
    throw Error("leave_one_out needs at least 4 observations so every reduced sample keeps 3");
  }
  LooResult out;
  out.rows.emplace_back("None", correlate(sample, alpha));
  for (size_t drop = 0; drop < sample.size(); ++drop) {
    PairedSample reduced;
    for (size_t i = 0; i < sample.size(); ++i) {
      if (i == drop) continue;
      if (!sample.labels.empty()) reduced.labels.push_back(sample.labels[i]);
      reduced.x.push_back(sample.x[i]);
      reduced.y.push_back(sample.y[i]);
    }
    const std::string label =
        sample.labels.empty() ? "#" + std::to_string(drop) : sample.labels[drop];
    out.rows.emplace_back(label, correlate(reduced, alpha));
  }
  return out;
}

OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require_size(x, y, "ols_fit");
  const size_t n = x.size();
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw Error("ols_fit: zero variance in x");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::vector<FeatureCorrelation> correlate_features(const std::vector<PairFeatures>& features,
                                                   const ScoreTable& scores,
                                                   const std::string& model, double alpha) {
  // every LP scored for this model must have a feature row
  std::vector<double> score_values;
  std::vector<const PairFeatures*> rows;
  for (const auto& lp : scores.pairs_for(model)) {
    const PairFeatures* found = nullptr;
    for (const auto& f : features) {
      if (f.pair.str() == lp) {
        found = &f;
        break;
      }
    }
    if (found == nullptr) throw Error("no features for scored lp " + lp + " (model " + model + ")");
    score_values.push_back(*scores.score(model, lp));
    rows.push_back(found);
  }
  if (rows.empty()) throw Error("model " + model + " has no scores");
  std::vector<FeatureCorrelation> out;
  for (size_t col = 0; col < kFeatureColumns.size(); ++col) {
    FeatureCorrelation fc;
    fc.feature = kFeatureColumns[col];
    PairedSample sample;
    for (size_t i = 0; i < rows.size(); ++i) {
      sample.labels.push_back(rows[i]->pair.str());
      sample.x.push_back(rows[i]->feature_values()[col]);
      sample.y.push_back(score_values[i]);
    }
    try {
      fc.result = correlate(sample, alpha);
    } catch (const Error& e) {
      fc.error = e.what();
    }
    out.push_back(std::move(fc));
  }
  return out;
}

}  // namespace mtdiag

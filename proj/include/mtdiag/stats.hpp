#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtdiag/metrics.hpp"
#include "mtdiag/typology.hpp"

namespace mtdiag {

/// Paired observations with stable labels. Lengths must match and be >= 3;
/// missing values are handled upstream, never here.
struct PairedSample {
  std::vector<std::string> labels;
  std::vector<double> x;
  std::vector<double> y;

  size_t size() const { return x.size(); }
  void validate() const;  // throws on shape problems
};

/// All three coefficients with two-sided p-values and significance flags at
/// the configured alpha. p-value methods: Student-t approximation for r and
/// rho (n-2 degrees of freedom), normal approximation with tie-corrected
/// variance for tau-b.
struct CorrelationResult {
  double r = 0.0, rho = 0.0, tau = 0.0;
  double p_r = 1.0, p_rho = 1.0, p_tau = 1.0;
  int n = 0;
  double alpha = 0.05;
  bool significant_r = false, significant_rho = false, significant_tau = false;
};

inline constexpr double kDefaultAlpha = 0.05;

/// Product-moment correlation; p from t = r * sqrt((n-2)/(1-r^2)).
/// Zero variance on either side is an error.
std::pair<double, double> pearson(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson on average ranks (midranks for ties); same t-approximation on rho.
std::pair<double, double> spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Tau-b via merge-sort discordance counting (O(n log n)); equals tau-a on
/// tie-free data. p from the normal approximation with tie-corrected
/// variance of the concordance statistic.
std::pair<double, double> kendall(const std::vector<double>& x, const std::vector<double>& y);

CorrelationResult correlate(const PairedSample& sample, double alpha = kDefaultAlpha);

struct LooResult {
  // "None" row (full sample) first, then one row per label in sample order.
  std::vector<std::pair<std::string, CorrelationResult>> rows;
};

/// Robustness sweep: recompute all coefficients with each observation
/// removed in turn. Needs n >= 4 so every reduced sample still has >= 3.
LooResult leave_one_out(const PairedSample& sample, double alpha = kDefaultAlpha);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

/// One feature column of a model's correlation row; zero-variance and other
/// per-feature failures are surfaced here instead of aborting the row.
struct FeatureCorrelation {
  std::string feature;
  std::optional<CorrelationResult> result;
  std::string error;  // set when result is absent
};

/// Correlate a model's per-LP scores against TAR, the six distance facets
/// and their mean: eight columns per model.
std::vector<FeatureCorrelation> correlate_features(const std::vector<PairFeatures>& features,
                                                   const ScoreTable& scores,
                                                   const std::string& model,
                                                   double alpha = kDefaultAlpha);

// exposed pieces of the p-value machinery (deterministic, no RNG)
double regularized_incomplete_beta(double a, double b, double x);
double student_t_two_sided_p(double t, double degrees_of_freedom);
double normal_two_sided_p(double z);

}  // namespace mtdiag

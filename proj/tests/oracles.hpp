#pragma once

// Test-only reference implementations, written straight from the defining
// formulas with no shared machinery beyond tokenization rules. They stay
// deliberately naive: nested loops and linear scans instead of the library's
// optimized paths.

#include <cmath>
#include <string>
#include <vector>

#include "mtdiag/metrics.hpp"
#include "mtdiag/stats.hpp"

namespace oracle {

/// Kendall tau-b by exhaustive pair enumeration, with the same tie-corrected
/// normal-approximation p-value recomputed from scratch.
inline std::pair<double, double> kendall_bruteforce(const std::vector<double>& x,
                                                    const std::vector<double>& y) {
  const size_t n = x.size();
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) ++tied_x;
      else if (dy == 0.0) ++tied_y;
      else if (dx * dy > 0.0) ++concordant;
      else ++discordant;
    }
  }
  const long long total = static_cast<long long>(n) * (n - 1) / 2;
  // pairs tied in x (including joint ties) and in y, for the denominators
  long long x_tie_pairs = 0, y_tie_pairs = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (x[i] == x[j]) ++x_tie_pairs;
      if (y[i] == y[j]) ++y_tie_pairs;
    }
  }
  const double s = static_cast<double>(concordant - discordant);
  const double tau = s / (std::sqrt(static_cast<double>(total - x_tie_pairs)) *
                          std::sqrt(static_cast<double>(total - y_tie_pairs)));

  // tie-group statistics recomputed by counting equal values directly
  auto group_stats = [](const std::vector<double>& v, double& sum_v1, double& sum_v0) {
    std::vector<bool> seen(v.size(), false);
    sum_v1 = 0.0;
    sum_v0 = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
      if (seen[i]) continue;
      double t = 0;
      for (size_t j = i; j < v.size(); ++j) {
        if (v[j] == v[i]) {
          t += 1;
          seen[j] = true;
        }
      }
      sum_v1 += t * (t - 1.0) * (2.0 * t + 5.0);
      sum_v0 += t * (t - 1.0) * (t - 2.0);
    }
  };
  double x1 = 0, x0 = 0, y1 = 0, y0 = 0;
  group_stats(x, x1, x0);
  group_stats(y, y1, y0);
  const double nd = static_cast<double>(n);
  const double m = nd * (nd - 1.0);
  double variance = (m * (2.0 * nd + 5.0) - x1 - y1) / 18.0 +
                    2.0 * static_cast<double>(x_tie_pairs) * static_cast<double>(y_tie_pairs) / m +
                    x0 * y0 / (9.0 * m * (nd - 2.0));
  const double z = s / std::sqrt(variance);
  return {tau, std::erfc(std::fabs(z) / std::sqrt(2.0))};
}

/// Closed-form Spearman for tie-free data: 1 - 6 sum(d^2) / (n(n^2-1)).
inline double spearman_d2(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  auto rank_of = [](const std::vector<double>& v, size_t idx) {
    double rank = 1.0;
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[idx]) rank += 1.0;
    }
    return rank;
  };
  double sum_d2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = rank_of(x, i) - rank_of(y, i);
    sum_d2 += d * d;
  }
  const double nd = static_cast<double>(n);
  return 1.0 - 6.0 * sum_d2 / (nd * (nd * nd - 1.0));
}

// --- exhaustive n-gram counting metric oracles -----------------------------

/// every n-gram of `tokens` as a joined string key, collected into parallel
/// vectors (no maps, matching done by linear search)
inline void collect_ngrams(const std::vector<std::string>& tokens, int n,
                           std::vector<std::string>& grams, std::vector<long long>& counts) {
  grams.clear();
  counts.clear();
  if (tokens.size() < static_cast<size_t>(n)) return;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key;
    for (int k = 0; k < n; ++k) key += tokens[i + k] + "\x1f";
    bool found = false;
    for (size_t g = 0; g < grams.size(); ++g) {
      if (grams[g] == key) {
        ++counts[g];
        found = true;
        break;
      }
    }
    if (!found) {
      grams.push_back(key);
      counts.push_back(1);
    }
  }
}

inline long long oracle_clipped(const std::vector<std::string>& hyp_grams,
                                const std::vector<long long>& hyp_counts,
                                const std::vector<std::string>& ref_grams,
                                const std::vector<long long>& ref_counts) {
  long long matches = 0;
  for (size_t i = 0; i < hyp_grams.size(); ++i) {
    for (size_t j = 0; j < ref_grams.size(); ++j) {
      if (hyp_grams[i] == ref_grams[j]) {
        matches += std::min(hyp_counts[i], ref_counts[j]);
        break;
      }
    }
  }
  return matches;
}

inline double bleu_oracle(const std::vector<std::string>& hyps,
                          const std::vector<std::string>& refs, bool exp_smoothing = false) {
  long long match[4] = {0, 0, 0, 0};
  long long total[4] = {0, 0, 0, 0};
  long long hyp_len = 0, ref_len = 0;
  for (size_t s = 0; s < hyps.size(); ++s) {
    auto hyp_tokens = mtdiag::tokenize_13a(hyps[s]);
    auto ref_tokens = mtdiag::tokenize_13a(refs[s]);
    hyp_len += static_cast<long long>(hyp_tokens.size());
    ref_len += static_cast<long long>(ref_tokens.size());
    for (int n = 1; n <= 4; ++n) {
      std::vector<std::string> hg, rg;
      std::vector<long long> hc, rc;
      collect_ngrams(hyp_tokens, n, hg, hc);
      collect_ngrams(ref_tokens, n, rg, rc);
      match[n - 1] += oracle_clipped(hg, hc, rg, rc);
      long long possible = static_cast<long long>(hyp_tokens.size()) - n + 1;
      if (possible > 0) total[n - 1] += possible;
    }
  }
  if (hyp_len == 0) return 0.0;
  int effective = 0;
  for (int n = 0; n < 4; ++n) {
    if (total[n] == 0) break;
    effective = n + 1;
  }
  if (effective == 0) return 0.0;
  double log_sum = 0.0;
  double smooth = 1.0;
  for (int n = 0; n < effective; ++n) {
    double p;
    if (match[n] == 0) {
      if (!exp_smoothing) return 0.0;
      smooth *= 2.0;
      p = 1.0 / (smooth * static_cast<double>(total[n]));
    } else {
      p = static_cast<double>(match[n]) / static_cast<double>(total[n]);
    }
    log_sum += std::log(p);
  }
  double bp = hyp_len < ref_len
                  ? std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(hyp_len))
                  : 1.0;
  return 100.0 * bp * std::exp(log_sum / effective);
}

inline std::vector<std::string> oracle_chars(const std::string& text) {
  std::vector<std::string> out;
  for (uint32_t cp : mtdiag::utf8_decode(text)) {
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') continue;
    out.push_back(mtdiag::utf8_encode(cp));
  }
  return out;
}

inline double chrf_oracle(const std::vector<std::string>& hyps,
                          const std::vector<std::string>& refs) {
  constexpr int kCharOrder = 6, kWordOrder = 2;
  constexpr double kBeta = 2.0;
  long long hyp_total[8] = {0}, ref_total[8] = {0}, match_total[8] = {0};
  for (size_t s = 0; s < hyps.size(); ++s) {
    auto hyp_chars = oracle_chars(hyps[s]);
    auto ref_chars = oracle_chars(refs[s]);
    auto hyp_words = mtdiag::chrf_word_tokens(hyps[s]);
    auto ref_words = mtdiag::chrf_word_tokens(refs[s]);
    for (int o = 0; o < kCharOrder + kWordOrder; ++o) {
      const bool char_order = o < kCharOrder;
      const int n = char_order ? o + 1 : o - kCharOrder + 1;
      const auto& hyp_tokens = char_order ? hyp_chars : hyp_words;
      const auto& ref_tokens = char_order ? ref_chars : ref_words;
      std::vector<std::string> hg, rg;
      std::vector<long long> hc, rc;
      collect_ngrams(hyp_tokens, n, hg, hc);
      collect_ngrams(ref_tokens, n, rg, rc);
      for (long long c : hc) hyp_total[o] += c;
      for (long long c : rc) ref_total[o] += c;
      match_total[o] += oracle_clipped(hg, hc, rg, rc);
    }
  }
  double sum = 0.0;
  int effective = 0;
  for (int o = 0; o < kCharOrder + kWordOrder; ++o) {
    if (hyp_total[o] == 0 || ref_total[o] == 0) continue;
    double prec = static_cast<double>(match_total[o]) / static_cast<double>(hyp_total[o]);
    double rec = static_cast<double>(match_total[o]) / static_cast<double>(ref_total[o]);
    double denom = kBeta * kBeta * prec + rec;
    sum += denom > 0.0 ? (1.0 + kBeta * kBeta) * prec * rec / denom : 0.0;
    ++effective;
  }
  return effective == 0 ? 0.0 : 100.0 * sum / effective;
}

/// shared fixture segments for the metric oracle sweeps
inline const std::vector<std::pair<std::string, std::string>>& metric_fixture_segments() {
  static const std::vector<std::pair<std::string, std::string>> segments = {
      {"the cat sat on the mat .", "the cat sat on the mat ."},
      {"a quick brown fox", "the quick brown fox jumps"},
      {"hello , world !", "hello world"},
      {"it rains in spain", "the rain in spain stays mainly in the plain"},
      {"guten morgen liebe sorgen", "guten morgen alle zusammen"},
      {"la vie est belle", "la vie est tres belle"},
      {"numbers 3.5 and 1-2 mix", "numbers 3.5 and 1-2 mixed"},
      {"short", "a completely different reference sentence"},
  };
  return segments;
}

}  // namespace oracle

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mtdiag/corpus.hpp"
#include "mtdiag/tar.hpp"

namespace mtdiag {

inline constexpr std::array<const char*, 6> kDistanceFacets = {
    "genetic", "geographic", "syntactic", "phonological", "inventory", "featural"};

using FacetValues = std::array<double, 6>;

/// Symmetric lookup of six typological distance facets per unordered
/// language pair. Values come from a flat CSV export; self-distance is zero.
class DistanceTable {
 public:
  void insert(const std::string& a, const std::string& b, const FacetValues& facets);
  bool contains(const std::string& a, const std::string& b) const;
  FacetValues lookup(const std::string& a, const std::string& b) const;  // throws when absent
  size_t size() const { return entries_.size(); }

 private:
  static std::pair<std::string, std::string> key(const std::string& a, const std::string& b);
  std::map<std::pair<std::string, std::string>, FacetValues> entries_;
};

/// CSV columns: lang1,lang2,genetic,geographic,syntactic,phonological,
/// inventory,featural. Facets must all be present and inside [0,1];
/// conflicting duplicate rows are rejected, missing values are never imputed.
DistanceTable load_distances(const std::string& path);

double mean_distance(const FacetValues& facets);

/// Per-pair feature vector used by the correlation analyses.
struct PairFeatures {
  LanguagePair pair;
  double tar_sum = 0.0;  // source TAR + target TAR
  FacetValues distances{};
  double mean_dist = 0.0;

  /// tar_sum followed by the six facets and their mean, in column order.
  std::array<double, 8> feature_values() const;
};

inline constexpr std::array<const char*, 8> kFeatureColumns = {
    "tar", "genetic", "geographic", "syntactic", "phonological", "inventory", "featural", "mean"};

PairFeatures pair_features(const LanguagePair& pair, const DistanceTable& distances,
                           const TarRecord& src_tar, const TarRecord& tgt_tar);

}  // namespace mtdiag

#include "mtdiag/typology.hpp"

#include <cmath>

#include "mtdiag/csv.hpp"
#include "mtdiag/error.hpp"

namespace mtdiag {

std::pair<std::string, std::string> DistanceTable::key(const std::string& a,
                                                       const std::string& b) {
  return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
}

void DistanceTable::insert(const std::string& a, const std::string& b,
                           const FacetValues& facets) {
  for (size_t i = 0; i < facets.size(); ++i) {
    if (!(facets[i] >= 0.0 && facets[i] <= 1.0)) {
      throw Error("facet " + std::string(kDistanceFacets[i]) + " for (" + a + ", " + b +
                  ") is outside [0,1]");
    }
  }
  if (a == b) {
    for (double v : facets) {
      if (v != 0.0) throw Error("self-distance for " + a + " must be zero on every facet");
    }
    return;  // implicit; not stored
  }
  auto k = key(a, b);
  auto it = entries_.find(k);
  if (it != entries_.end()) {
    if (it->second != facets) {
      throw Error("conflicting distance rows for (" + a + ", " + b + ")");
    }
    return;
  }
  entries_.emplace(std::move(k), facets);
}

bool DistanceTable::contains(const std::string& a, const std::string& b) const {
  if (a == b) return true;
  return entries_.count(key(a, b)) > 0;
}

FacetValues DistanceTable::lookup(const std::string& a, const std::string& b) const {
  if (a == b) return FacetValues{};  // all zero
  auto it = entries_.find(key(a, b));
  if (it == entries_.end()) {
    throw Error("no typological distances for (" + a + ", " + b + ")");
  }
  return it->second;
}

DistanceTable load_distances(const std::string& path) {
  auto table = read_csv(path);
  std::vector<std::string> expected{"lang1", "lang2"};
  for (const char* f : kDistanceFacets) expected.push_back(f);
  if (table.header != expected) {
    throw Error("distance table " + path +
                " must have header lang1,lang2,genetic,geographic,syntactic,"
                "phonological,inventory,featural");
  }
  DistanceTable out;
  size_t row_no = 0;
  for (const auto& row : table.rows) {
    ++row_no;
    if (row.size() != expected.size()) {
      throw Error("distance table " + path + " row " + std::to_string(row_no) +
                  " has wrong column count");
    }
    FacetValues facets;
    for (size_t i = 0; i < facets.size(); ++i) {
      auto v = parse_double(row[2 + i]);
      if (!v) {
        throw Error("distance table " + path + " row " + std::to_string(row_no) +
                    ": missing or unparseable " + kDistanceFacets[i] + " value");
      }
      facets[i] = *v;
    }
    out.insert(row[0], row[1], facets);
  }
  return out;
}

double mean_distance(const FacetValues& facets) {
  double sum = 0.0;
  for (size_t i = 0; i < facets.size(); ++i) {
    if (!(facets[i] >= 0.0 && facets[i] <= 1.0)) {
      throw Error("facet " + std::string(kDistanceFacets[i]) + " is outside [0,1]");
    }
    sum += facets[i];
  }
  return sum / static_cast<double>(facets.size());
}

std::array<double, 8> PairFeatures::feature_values() const {
  std::array<double, 8> out;
  out[0] = tar_sum;
  for (size_t i = 0; i < distances.size(); ++i) out[1 + i] = distances[i];
  out[7] = mean_dist;
  return out;
}

PairFeatures pair_features(const LanguagePair& pair, const DistanceTable& distances,
                           const TarRecord& src_tar, const TarRecord& tgt_tar) {
  if (src_tar.model_name != tgt_tar.model_name) {
    throw Error("pair_features needs TAR records from one model, got '" + src_tar.model_name +
                "' and '" + tgt_tar.model_name + "'");
  }
  if (src_tar.language != pair.src || tgt_tar.language != pair.tgt) {
    throw Error("TAR records (" + src_tar.language + ", " + tgt_tar.language +
                ") do not match pair " + pair.str());
  }
  PairFeatures out;
  out.pair = pair;
  out.tar_sum = pair_tar(src_tar, tgt_tar);
  out.distances = distances.lookup(pair.src, pair.tgt);
  out.mean_dist = mean_distance(out.distances);
  return out;
}

}  // namespace mtdiag

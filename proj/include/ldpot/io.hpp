#pragma once

#include "ldpot/core.hpp"
#include "ldpot/ensembles.hpp"

#include <json.hpp>

#include <concepts>
#include <iosfwd>
#include <string>
#include <vector>

namespace ldpot::io {

using Json = nlohmann::json;

/// Thrown for malformed configuration documents (unknown keys, wrong types).
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Throws ConfigError when `object` has a key outside `allowed`.
void requireKeys(const Json& object, const std::vector<std::string>& allowed,
                 const std::string& where);

// Set specs:
//   {"kind": "interval_union", "intervals": [[lo, hi], ...], "resolution": r}
//   {"kind": "circle", "center": [re, im], "radius": r, "resolution": m}
//   {"kind": "torus_grid", "n": n, "points_per_axis": m}
//   {"kind": "point_cloud", "points": [atom, ...]}
Json toJson(const CompactSetSpec& spec);
CompactSetSpec specFromJson(const Json& j);

/// A point of C^n: [re, im] when n = 1, [[re, im], ...] otherwise.
Json pointToJson(const PointSet& points, Index column);
PointSet pointsFromJson(const Json& list);

// {"atoms": [...], "masses": [...], "cells": [...]?}
Json toJson(const DiscreteMeasure& mu);
DiscreteMeasure measureFromJson(const Json& j);

/// One JSON object per configuration: index, k, seed, points, log_vdm_q.
void writeSampleJsonl(std::ostream& out, const EnsembleSample& sample);

/// Shortest-roundtrip-safe decimal form (17 significant digits).
std::string formatDouble(double v);

/// Comma-separated table with a header row, '\n' line endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row();
  CsvTable& add(double v);
  template <std::integral T>
  CsvTable& add(T v) {
    return add(std::to_string(static_cast<long long>(v)));
  }
  CsvTable& add(const std::string& v);
  void write(std::ostream& out) const;
  void save(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ldpot::io

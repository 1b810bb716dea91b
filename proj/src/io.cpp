#include "ldpot/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace ldpot::io {

void requireKeys(const Json& object, const std::vector<std::string>& allowed,
                 const std::string& where) {
  if (!object.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

namespace {

template <typename T>
T get(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "' in " + where + " has the wrong type");
  }
}

Complex complexFromJson(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ConfigError("expected a number or a [re, im] pair");
}

Json complexToJson(Complex z) { return Json::array({z.real(), z.imag()}); }

}  // namespace

Json pointToJson(const PointSet& points, Index column) {
  if (points.rows() == 1) return complexToJson(points(0, column));
  Json out = Json::array();
  for (Index r = 0; r < points.rows(); ++r) out.push_back(complexToJson(points(r, column)));
  return out;
}

PointSet pointsFromJson(const Json& list) {
  if (!list.is_array() || list.empty()) throw ConfigError("expected a nonempty list of points");
  // A point is a number, a [re, im] pair (n = 1), or a list of such pairs.
  auto isScalar = [](const Json& p) {
    return p.is_number() || (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number());
  };
  const bool scalar = isScalar(list[0]);
  const Index n = scalar ? 1 : static_cast<Index>(list[0].size());
  if (n < 1) throw ConfigError("points need at least one coordinate");
  PointSet pts(n, static_cast<Index>(list.size()));
  for (std::size_t j = 0; j < list.size(); ++j) {
    const Json& p = list[j];
    if (scalar) {
      pts(0, static_cast<Index>(j)) = complexFromJson(p);
    } else {
      if (!p.is_array() || static_cast<Index>(p.size()) != n) {
        throw ConfigError("points have inconsistent dimensions");
      }
      for (Index r = 0; r < n; ++r) pts(r, static_cast<Index>(j)) = complexFromJson(p[static_cast<std::size_t>(r)]);
    }
  }
  return pts;
}

Json toJson(const CompactSetSpec& spec) {
  Json j;
  j["kind"] = spec.kindName();
  switch (spec.kind()) {
    case CompactSetSpec::Kind::IntervalUnion: {
      Json parts = Json::array();
      for (const auto& p : spec.parts()) parts.push_back(Json::array({p.lo, p.hi}));
      j["intervals"] = parts;
      j["resolution"] = spec.resolution();
      break;
    }
    case CompactSetSpec::Kind::Circle:
      j["center"] = complexToJson(spec.center());
      j["radius"] = spec.radius();
      j["resolution"] = spec.resolution();
      break;
    case CompactSetSpec::Kind::TorusGrid:
      j["n"] = spec.dimension();
      j["points_per_axis"] = spec.resolution();
      break;
    case CompactSetSpec::Kind::PointCloud: {
      Json pts = Json::array();
      for (Index c = 0; c < spec.cloud().cols(); ++c) pts.push_back(pointToJson(spec.cloud(), c));
      j["points"] = pts;
      break;
    }
  }
  return j;
}

CompactSetSpec specFromJson(const Json& j) {
  const std::string where = "set";
  if (!j.is_object()) throw ConfigError("set must be a JSON object");
  const auto kind = get<std::string>(j, "kind", where);
  if (kind == "interval_union" || kind == "interval") {
    requireKeys(j, {"kind", "intervals", "resolution"}, where);
    const Json parts = j.at("intervals");
    if (!parts.is_array() || parts.empty()) throw ConfigError("intervals must be a nonempty list");
    std::vector<Interval> list;
    for (const auto& p : parts) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw ConfigError("each interval must be [lo, hi]");
      }
      list.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return CompactSetSpec::intervals(std::move(list), get<int>(j, "resolution", where));
  }
  if (kind == "circle") {
    requireKeys(j, {"kind", "center", "radius", "resolution"}, where);
    const Complex center = j.contains("center") ? complexFromJson(j.at("center")) : Complex(0.0);
    return CompactSetSpec::circle(center, get<double>(j, "radius", where),
                                  get<int>(j, "resolution", where));
  }
  if (kind == "torus_grid") {
    requireKeys(j, {"kind", "n", "points_per_axis"}, where);
    return CompactSetSpec::torusGrid(get<int>(j, "n", where), get<int>(j, "points_per_axis", where));
  }
  if (kind == "point_cloud") {
    requireKeys(j, {"kind", "points"}, where);
    if (!j.contains("points")) throw ConfigError("missing key 'points' in set");
    return CompactSetSpec::pointCloud(pointsFromJson(j.at("points")));
  }
  throw ConfigError("unknown set kind '" + kind + "'");
}

Json toJson(const DiscreteMeasure& mu) {
  Json atoms = Json::array();
  for (Index c = 0; c < mu.size(); ++c) atoms.push_back(pointToJson(mu.atoms(), c));
  Json j;
  j["atoms"] = atoms;
  j["masses"] = std::vector<double>(mu.masses().data(), mu.masses().data() + mu.size());
  if (mu.cells()) {
    const Eigen::VectorXd& c = *mu.cells();
    j["cells"] = std::vector<double>(c.data(), c.data() + c.size());
  }
  return j;
}

DiscreteMeasure measureFromJson(const Json& j) {
  requireKeys(j, {"atoms", "masses", "cells"}, "measure");
  if (!j.contains("atoms") || !j.contains("masses")) {
    throw ConfigError("measure needs 'atoms' and 'masses'");
  }
  PointSet atoms = pointsFromJson(j.at("atoms"));
  const auto m = get<std::vector<double>>(j, "masses", "measure");
  if (static_cast<Index>(m.size()) != atoms.cols()) throw ConfigError("atoms and masses differ in length");
  Eigen::VectorXd masses = Eigen::Map<const Eigen::VectorXd>(m.data(), static_cast<Index>(m.size()));
  std::optional<Eigen::VectorXd> cells;
  if (j.contains("cells")) {
    const auto c = get<std::vector<double>>(j, "cells", "measure");
    if (c.size() != m.size()) throw ConfigError("cells and masses differ in length");
    cells = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Index>(c.size()));
  }
  return DiscreteMeasure(std::move(atoms), std::move(masses), std::move(cells));
}

void writeSampleJsonl(std::ostream& out, const EnsembleSample& sample) {
  for (std::size_t i = 0; i < sample.configs.size(); ++i) {
    const Configuration& c = sample.configs[i];
    Json atoms = Json::array();
    for (Index j = 0; j < c.size(); ++j) atoms.push_back(pointToJson(c.points(), j));
    Json line;
    line["index"] = i;
    line["k"] = sample.k;
    line["seed"] = sample.seed;
    line["points"] = atoms;
    const auto v = c.cached(sample.weightId);
    line["log_vdm_q"] = v ? Json(*v) : Json(nullptr);
    out << line.dump() << '\n';
  }
}

std::string formatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(formatDouble(v)); }

CsvTable& CsvTable::add(const std::string& v) {
  if (rows_.empty()) rows_.emplace_back();
  rows_.back().push_back(v);
  return *this;
}

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write " + path);
  write(f);
}

}  // namespace ldpot::io

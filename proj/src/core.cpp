#include "ldpot/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>
#include <numeric>
#include <sstream>

namespace ldpot {

namespace {

// Lexicographic order on the (re, im) coordinates of two columns.
bool columnLess(const PointSet& pts, Index a, Index b) {
  for (Index r = 0; r < pts.rows(); ++r) {
    const Complex u = pts(r, a);
    const Complex v = pts(r, b);
    if (u.real() != v.real()) return u.real() < v.real();
    if (u.imag() != v.imag()) return u.imag() < v.imag();
  }
  return false;
}

bool columnEqual(const PointSet& pts, Index a, Index b) {
  return (pts.col(a).array() == pts.col(b).array()).all();
}

// Indices of the first occurrence of each distinct column, in input order.
std::vector<Index> firstOccurrences(const PointSet& pts) {
  std::vector<Index> order(static_cast<std::size_t>(pts.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return columnLess(pts, a, b); });
  std::vector<char> keep(order.size(), 1);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (columnEqual(pts, order[i - 1], order[i])) {
      // stable sort keeps the earlier index first within a run
      keep[static_cast<std::size_t>(order[i])] = 0;
    }
  }
  std::vector<Index> kept;
  for (Index j = 0; j < pts.cols(); ++j) {
    if (keep[static_cast<std::size_t>(j)]) kept.push_back(j);
  }
  return kept;
}

Index intervalSteps(const Interval& part, int resolution) {
  const double length = part.hi - part.lo;
  if (length == 0.0) return 0;
  return std::max<Index>(1, std::llround(resolution * length));
}

void validateFinite(const PointSet& pts) {
  if (!pts.allFinite()) throw InvalidArgument("candidate coordinates must be finite");
}

}  // namespace

// ---------------------------------------------------------------------------
// CompactSetSpec

CompactSetSpec CompactSetSpec::intervals(std::vector<Interval> parts, int resolution) {
  if (parts.empty()) throw InvalidArgument("interval_union needs at least one interval");
  if (resolution <= 0) throw InvalidArgument("resolution must be positive");
  for (const auto& p : parts) {
    if (!std::isfinite(p.lo) || !std::isfinite(p.hi)) {
      throw InvalidArgument("interval endpoints must be finite");
    }
    if (p.hi < p.lo) throw InvalidArgument("interval has negative length");
  }
  CompactSetSpec spec;
  spec.kind_ = Kind::IntervalUnion;
  spec.parts_ = std::move(parts);
  spec.resolution_ = resolution;
  return spec;
}

CompactSetSpec CompactSetSpec::interval(double lo, double hi, int resolution) {
  return intervals({Interval{lo, hi}}, resolution);
}

CompactSetSpec CompactSetSpec::circle(Complex center, double radius, int resolution) {
  if (resolution <= 0) throw InvalidArgument("resolution must be positive");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("circle radius must be finite and nonnegative");
  }
  CompactSetSpec spec;
  spec.kind_ = Kind::Circle;
  spec.center_ = center;
  spec.radius_ = radius;
  spec.resolution_ = resolution;
  return spec;
}

CompactSetSpec CompactSetSpec::torusGrid(int n, int pointsPerAxis) {
  if (n < 1) throw InvalidArgument("torus_grid needs n >= 1");
  if (pointsPerAxis <= 0) throw InvalidArgument("resolution must be positive");
  CompactSetSpec spec;
  spec.kind_ = Kind::TorusGrid;
  spec.dimension_ = n;
  spec.resolution_ = pointsPerAxis;
  return spec;
}

CompactSetSpec CompactSetSpec::pointCloud(PointSet points) {
  if (points.cols() == 0 || points.rows() == 0) {
    throw InvalidArgument("point_cloud needs at least one point of dimension >= 1");
  }
  validateFinite(points);
  CompactSetSpec spec;
  spec.kind_ = Kind::PointCloud;
  spec.dimension_ = static_cast<int>(points.rows());
  spec.cloud_ = std::move(points);
  return spec;
}

bool CompactSetSpec::isReal() const {
  switch (kind_) {
    case Kind::IntervalUnion:
      return true;
    case Kind::Circle:
      return radius_ == 0.0 && center_.imag() == 0.0;
    case Kind::TorusGrid:
      return false;
    case Kind::PointCloud:
      return (cloud_.array().imag() == 0.0).all();
  }
  return false;
}

std::string CompactSetSpec::kindName() const {
  switch (kind_) {
    case Kind::IntervalUnion: return "interval_union";
    case Kind::Circle: return "circle";
    case Kind::TorusGrid: return "torus_grid";
    case Kind::PointCloud: return "point_cloud";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// discretize / cellSizes

namespace {

struct RawGrid {
  PointSet points;
  Eigen::VectorXd cells;  // empty when the geometry has none
};

RawGrid rawGrid(const CompactSetSpec& spec) {
  RawGrid grid;
  switch (spec.kind()) {
    case CompactSetSpec::Kind::IntervalUnion: {
      Index total = 0;
      for (const auto& p : spec.parts()) total += intervalSteps(p, spec.resolution()) + 1;
      grid.points.resize(1, total);
      grid.cells.resize(total);
      Index at = 0;
      for (const auto& p : spec.parts()) {
        const Index steps = intervalSteps(p, spec.resolution());
        if (steps == 0) {
          grid.points(0, at) = p.lo;
          grid.cells(at++) = 0.0;
          continue;
        }
        const double h = (p.hi - p.lo) / static_cast<double>(steps);
        for (Index j = 0; j <= steps; ++j) {
          const double x = (j == steps) ? p.hi : p.lo + static_cast<double>(j) * h;
          grid.points(0, at) = x;
          grid.cells(at++) = (j == 0 || j == steps) ? 0.5 * h : h;
        }
      }
      break;
    }
    case CompactSetSpec::Kind::Circle: {
      const Index m = spec.resolution();
      grid.points.resize(1, m);
      grid.cells = Eigen::VectorXd::Constant(m, 2.0 * std::numbers::pi * spec.radius() /
                                                    static_cast<double>(m));
      for (Index j = 0; j < m; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) /
                             static_cast<double>(m);
        grid.points(0, j) = spec.center() + std::polar(spec.radius(), theta);
      }
      break;
    }
    case CompactSetSpec::Kind::TorusGrid: {
      const int n = spec.dimension();
      const Index m = spec.resolution();
      Index total = 1;
      for (int i = 0; i < n; ++i) total *= m;
      grid.points.resize(n, total);
      std::vector<Complex> roots(static_cast<std::size_t>(m));
      for (Index j = 0; j < m; ++j) {
        roots[static_cast<std::size_t>(j)] = std::polar(
            1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m));
      }
      for (Index idx = 0; idx < total; ++idx) {
        Index rest = idx;
        for (int i = n - 1; i >= 0; --i) {
          grid.points(i, idx) = roots[static_cast<std::size_t>(rest % m)];
          rest /= m;
        }
      }
      break;
    }
    case CompactSetSpec::Kind::PointCloud:
      grid.points = spec.cloud();
      break;
  }
  return grid;
}

}  // namespace

PointSet discretize(const CompactSetSpec& spec) {
  RawGrid grid = rawGrid(spec);
  const auto kept = firstOccurrences(grid.points);
  if (kept.empty()) throw InvalidArgument("empty geometry");
  PointSet out(grid.points.rows(), static_cast<Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    out.col(static_cast<Index>(j)) = grid.points.col(kept[j]);
  }
  return out;
}

Eigen::VectorXd cellSizes(const CompactSetSpec& spec) {
  if (spec.dimension() != 1 || spec.kind() == CompactSetSpec::Kind::PointCloud) {
    throw InvalidArgument("cell geometry is only defined for univariate grids");
  }
  RawGrid grid = rawGrid(spec);
  const auto kept = firstOccurrences(grid.points);
  Eigen::VectorXd cells = Eigen::VectorXd::Zero(static_cast<Index>(kept.size()));
  // Duplicates (shared endpoints of touching intervals) pool their cells.
  for (Index j = 0; j < grid.points.cols(); ++j) {
    for (std::size_t t = 0; t < kept.size(); ++t) {
      if (columnEqual(grid.points, kept[t], j)) {
        cells(static_cast<Index>(t)) += grid.cells(j);
        break;
      }
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(PointSet atoms, Eigen::VectorXd masses,
                                 std::optional<Eigen::VectorXd> cells)
    : atoms_(std::move(atoms)), masses_(std::move(masses)), cells_(std::move(cells)) {
  if (atoms_.cols() != masses_.size()) {
    throw InvalidArgument("atoms and masses must have the same length");
  }
  if (masses_.size() == 0) throw InvalidArgument("measure needs at least one atom");
  if (atoms_.rows() < 1) throw InvalidArgument("ambient dimension must be >= 1");
  validateFinite(atoms_);
  if (!masses_.allFinite() || (masses_.array() < 0.0).any()) {
    throw InvalidArgument("masses must be finite and nonnegative");
  }
  if (std::abs(masses_.sum() - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg << "masses must sum to 1 (got " << masses_.sum() << "); use normalize()";
    throw InvalidArgument(msg.str());
  }
  if (cells_ && cells_->size() != masses_.size()) {
    throw InvalidArgument("cell sizes must match the atoms");
  }
}

DiscreteMeasure DiscreteMeasure::normalize(PointSet atoms, Eigen::VectorXd weights,
                                           std::optional<Eigen::VectorXd> cells) {
  const double total = weights.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InvalidArgument("cannot normalize weights with nonpositive total");
  }
  Eigen::VectorXd masses = weights / total;
  // Absorb the last rounding residue so the sum is 1 to working precision.
  Index heaviest = 0;
  masses.maxCoeff(&heaviest);
  masses(heaviest) += 1.0 - masses.sum();
  return DiscreteMeasure(std::move(atoms), std::move(masses), std::move(cells));
}

DiscreteMeasure DiscreteMeasure::dirac(const Point& z) {
  return DiscreteMeasure(PointSet(z), Eigen::VectorXd::Ones(1));
}

DiscreteMeasure DiscreteMeasure::uniform(PointSet atoms) {
  const Index m = atoms.cols();
  return normalize(std::move(atoms), Eigen::VectorXd::Ones(m));
}

DiscreteMeasure DiscreteMeasure::support(double threshold) const {
  std::vector<Index> keep;
  for (Index j = 0; j < size(); ++j) {
    if (masses_(j) > threshold) keep.push_back(j);
  }
  PointSet atoms(atoms_.rows(), static_cast<Index>(keep.size()));
  Eigen::VectorXd masses(static_cast<Index>(keep.size()));
  std::optional<Eigen::VectorXd> cells;
  if (cells_) cells = Eigen::VectorXd(static_cast<Index>(keep.size()));
  for (std::size_t t = 0; t < keep.size(); ++t) {
    const auto i = static_cast<Index>(t);
    atoms.col(i) = atoms_.col(keep[t]);
    masses(i) = masses_(keep[t]);
    if (cells) (*cells)(i) = (*cells_)(keep[t]);
  }
  return normalize(std::move(atoms), std::move(masses), std::move(cells));
}

std::string DiscreteMeasure::id() const {
  std::uint64_t h = fnv1a(std::span(reinterpret_cast<const unsigned char*>(atoms_.data()),
                                    sizeof(Complex) * static_cast<std::size_t>(atoms_.size())));
  h = fnv1a(std::span(reinterpret_cast<const unsigned char*>(masses_.data()),
                      sizeof(double) * static_cast<std::size_t>(masses_.size())),
            h);
  return hexDigest(h);
}

// ---------------------------------------------------------------------------
// Moments

int MomentIndex::order() const {
  return std::accumulate(alpha.begin(), alpha.end(), 0) +
         std::accumulate(beta.begin(), beta.end(), 0);
}

namespace {

// All exponent vectors of length `vars` with total exactly `total`, in
// descending lexicographic order.
void exponentsOfOrder(int vars, int total, std::vector<int>& current, int pos,
                      std::vector<std::vector<int>>& out) {
  if (pos == vars - 1) {
    current[static_cast<std::size_t>(pos)] = total;
    out.push_back(current);
    return;
  }
  for (int e = total; e >= 0; --e) {
    current[static_cast<std::size_t>(pos)] = e;
    exponentsOfOrder(vars, total - e, current, pos + 1, out);
  }
}

}  // namespace

std::vector<MomentIndex> momentIndices(int n, int degree) {
  if (n < 1 || degree < 0) throw InvalidArgument("moment indices need n >= 1, degree >= 0");
  std::vector<MomentIndex> out;
  const int vars = 2 * n;
  for (int d = 0; d <= degree; ++d) {
    std::vector<std::vector<int>> exps;
    std::vector<int> current(static_cast<std::size_t>(vars), 0);
    exponentsOfOrder(vars, d, current, 0, exps);
    for (const auto& e : exps) {
      MomentIndex idx;
      idx.alpha.assign(e.begin(), e.begin() + n);
      idx.beta.assign(e.begin() + n, e.end());
      out.push_back(std::move(idx));
    }
  }
  return out;
}

Eigen::MatrixXd momentFeatures(const PointSet& points, const std::vector<MomentIndex>& indices) {
  const Index n = points.rows();
  Eigen::MatrixXd features(static_cast<Index>(indices.size()), points.cols());
  for (Index j = 0; j < points.cols(); ++j) {
    for (std::size_t r = 0; r < indices.size(); ++r) {
      const auto& idx = indices[r];
      if (static_cast<Index>(idx.alpha.size()) != n) {
        throw InvalidArgument("multi-index dimension does not match the points");
      }
      double value = 1.0;
      for (Index i = 0; i < n; ++i) {
        const auto ii = static_cast<std::size_t>(i);
        for (int e = 0; e < idx.alpha[ii]; ++e) value *= points(i, j).real();
        for (int e = 0; e < idx.beta[ii]; ++e) value *= points(i, j).imag();
      }
      features(static_cast<Index>(r), j) = value;
    }
  }
  return features;
}

double moment(const DiscreteMeasure& mu, std::span<const int> alpha, std::span<const int> beta) {
  if (static_cast<int>(alpha.size()) != mu.dimension() ||
      static_cast<int>(beta.size()) != mu.dimension()) {
    throw InvalidArgument("multi-index dimension does not match the measure");
  }
  MomentIndex idx{std::vector<int>(alpha.begin(), alpha.end()),
                  std::vector<int>(beta.begin(), beta.end())};
  for (int e : idx.alpha) {
    if (e < 0) throw InvalidArgument("negative exponent");
  }
  for (int e : idx.beta) {
    if (e < 0) throw InvalidArgument("negative exponent");
  }
  return (momentFeatures(mu.atoms(), {idx}) * mu.masses())(0);
}

Eigen::VectorXd momentVector(const DiscreteMeasure& mu, int degree) {
  return momentFeatures(mu.atoms(), momentIndices(mu.dimension(), degree)) * mu.masses();
}

NeighborhoodSpec::NeighborhoodSpec(DiscreteMeasure center, int momentDegree, double epsilon)
    : center_(std::move(center)), degree_(momentDegree), epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("neighborhood epsilon must be positive");
  if (momentDegree < 0) throw InvalidArgument("moment degree must be >= 0");
  indices_ = momentIndices(center_.dimension(), degree_);
  centerMoments_ = momentFeatures(center_.atoms(), indices_) * center_.masses();
}

NeighborhoodSpec NeighborhoodSpec::withEpsilon(double epsilon) const {
  return NeighborhoodSpec(center_, degree_, epsilon);
}

bool NeighborhoodSpec::containsMoments(const Eigen::VectorXd& moments) const {
  return ((moments - centerMoments_).cwiseAbs().array() < epsilon_).all();
}

double NeighborhoodSpec::violation(const Eigen::VectorXd& moments) const {
  return ((moments - centerMoments_).cwiseAbs().array() - epsilon_).max(0.0).sum();
}

bool inNeighborhood(const DiscreteMeasure& sigma, const NeighborhoodSpec& G) {
  if (sigma.dimension() != G.center().dimension()) {
    throw InvalidArgument("measure and neighborhood live in different dimensions");
  }
  return G.containsMoments(momentFeatures(sigma.atoms(), G.indices()) * sigma.masses());
}

double weakStarDistance(const DiscreteMeasure& mu, const DiscreteMeasure& sigma, int degree) {
  if (mu.dimension() != sigma.dimension()) {
    throw InvalidArgument("measures live in different dimensions");
  }
  const auto indices = momentIndices(mu.dimension(), degree);
  const Eigen::VectorXd diff = momentFeatures(mu.atoms(), indices) * mu.masses() -
                               momentFeatures(sigma.atoms(), indices) * sigma.masses();
  double total = 0.0;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    total += std::ldexp(std::abs(diff(static_cast<Index>(r))), -indices[r].order());
  }
  return total;
}

DiscreteMeasure empiricalMeasure(const PointSet& points) {
  return DiscreteMeasure::uniform(points);
}

// ---------------------------------------------------------------------------
// Hashing

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(std::string_view text) {
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::string hexDigest(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace ldpot

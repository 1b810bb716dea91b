#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldpot {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Points of C^n stored column-wise: rows() is the ambient dimension n,
/// cols() the number of points.
using PointSet = Eigen::MatrixXcd;
using Point = Eigen::VectorXcd;

/// Raised for malformed inputs (bad geometry, mass invariants, dimension
/// mismatches). Numerical degeneracies are reported as values, not errors.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// A compact set K presented through a finite candidate grid.
///
/// - interval_union: equispaced points (endpoints included) on each real
///   interval, `resolution` points per unit length.
/// - circle: `resolution` equispaced angles starting at angle 0.
/// - torus_grid: product of unit-circle grids, `resolution` points per axis.
/// - point_cloud: explicit points of C^n.
class CompactSetSpec {
 public:
  enum class Kind { IntervalUnion, Circle, TorusGrid, PointCloud };

  static CompactSetSpec intervals(std::vector<Interval> parts, int resolution);
  static CompactSetSpec interval(double lo, double hi, int resolution);
  static CompactSetSpec circle(Complex center, double radius, int resolution);
  static CompactSetSpec torusGrid(int n, int pointsPerAxis);
  static CompactSetSpec pointCloud(PointSet points);

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  int resolution() const { return resolution_; }
  const std::vector<Interval>& parts() const { return parts_; }
  Complex center() const { return center_; }
  double radius() const { return radius_; }
  const PointSet& cloud() const { return cloud_; }

  /// True when K lies in R^n (all candidates have zero imaginary part).
  bool isReal() const;
  std::string kindName() const;

 private:
  CompactSetSpec() = default;

  Kind kind_ = Kind::PointCloud;
  int dimension_ = 1;
  int resolution_ = 1;
  std::vector<Interval> parts_;
  Complex center_{0.0, 0.0};
  double radius_ = 0.0;
  PointSet cloud_;
};

/// Deterministic candidate list; exact duplicates are removed (first kept).
PointSet discretize(const CompactSetSpec& spec);

/// Length of the grid cell owned by each candidate (n = 1 only): the part of
/// the Voronoi cell inside the interval for interval unions, the arc length
/// 2*pi*r/M for circles. Point clouds carry no cell geometry.
Eigen::VectorXd cellSizes(const CompactSetSpec& spec);

/// A probability measure with finitely many atoms. Optional per-atom cell
/// lengths describe the grid a continuous density was discretized on.
class DiscreteMeasure {
 public:
  static constexpr double kMassTolerance = 1e-12;

  DiscreteMeasure(PointSet atoms, Eigen::VectorXd masses,
                  std::optional<Eigen::VectorXd> cells = std::nullopt);

  /// Rescales nonnegative weights to unit total mass.
  static DiscreteMeasure normalize(PointSet atoms, Eigen::VectorXd weights,
                                   std::optional<Eigen::VectorXd> cells = std::nullopt);
  static DiscreteMeasure dirac(const Point& z);
  static DiscreteMeasure uniform(PointSet atoms);

  const PointSet& atoms() const { return atoms_; }
  const Eigen::VectorXd& masses() const { return masses_; }
  const std::optional<Eigen::VectorXd>& cells() const { return cells_; }
  Index size() const { return masses_.size(); }
  int dimension() const { return static_cast<int>(atoms_.rows()); }

  /// Atoms with mass above `threshold`.
  DiscreteMeasure support(double threshold = 0.0) const;

  /// Stable identifier of the atoms and masses (FNV-1a over the bits).
  std::string id() const;

 private:
  PointSet atoms_;
  Eigen::VectorXd masses_;
  std::optional<Eigen::VectorXd> cells_;
};

// ---------------------------------------------------------------------------
// Moments and weak-* neighborhoods.

/// Exponent pair (alpha, beta) of the real monomial (Re z)^alpha (Im z)^beta.
struct MomentIndex {
  std::vector<int> alpha;
  std::vector<int> beta;
  int order() const;
};

/// All (alpha, beta) in n variables with |alpha| + |beta| <= degree, ordered
/// by total order and then lexicographically.
std::vector<MomentIndex> momentIndices(int n, int degree);

/// Values of every moment monomial at every point: rows follow `indices`,
/// columns follow the points.
Eigen::MatrixXd momentFeatures(const PointSet& points,
                               const std::vector<MomentIndex>& indices);

double moment(const DiscreteMeasure& mu, std::span<const int> alpha,
              std::span<const int> beta);

/// Moment vector of mu over momentIndices(n, degree).
Eigen::VectorXd momentVector(const DiscreteMeasure& mu, int degree);

/// G(center, degree, epsilon): measures whose moments up to total order
/// `momentDegree` are within epsilon (strictly) of the center's.
class NeighborhoodSpec {
 public:
  NeighborhoodSpec(DiscreteMeasure center, int momentDegree, double epsilon);

  const DiscreteMeasure& center() const { return center_; }
  int momentDegree() const { return degree_; }
  double epsilon() const { return epsilon_; }
  const std::vector<MomentIndex>& indices() const { return indices_; }
  const Eigen::VectorXd& centerMoments() const { return centerMoments_; }

  NeighborhoodSpec withEpsilon(double epsilon) const;

  /// Membership test on a precomputed moment vector.
  bool containsMoments(const Eigen::VectorXd& moments) const;
  /// Sum of the amounts by which each moment leaves the box (0 inside).
  double violation(const Eigen::VectorXd& moments) const;

 private:
  DiscreteMeasure center_;
  int degree_;
  double epsilon_;
  std::vector<MomentIndex> indices_;
  Eigen::VectorXd centerMoments_;
};

bool inNeighborhood(const DiscreteMeasure& sigma, const NeighborhoodSpec& G);

/// Moment metric sum_{|a|+|b| <= degree} 2^{-(|a|+|b|)} |moment difference|.
double weakStarDistance(const DiscreteMeasure& mu, const DiscreteMeasure& sigma,
                        int degree = 4);

/// Uniform empirical measure (1/N) sum delta_{x_j}.
DiscreteMeasure empiricalMeasure(const PointSet& points);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(std::string_view text);
std::string hexDigest(std::uint64_t value);

}  // namespace ldpot

#pragma once

#include "ldpot/core.hpp"
#include "ldpot/fekete.hpp"
#include "ldpot/weight.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace ldpot {

/// nu = c sum_{k <= kMax} k^-2 nu_k, nu_k uniform on (approximate) order-k
/// Fekete points of the grid of K.
struct BmConstruction {
  DiscreteMeasure nu{PointSet::Zero(1, 1), Eigen::VectorXd::Ones(1)};
  int kMax = 0;
  double c = 0.0;                  // 1 / sum_{k <= kMax} k^-2
  bool realVariables = false;      // polynomials in Re z, Im z (complex K)
  std::vector<Index> mk;           // dim P_k restricted to the grid (numeric rank)
  std::vector<double> lebesgue;    // max Lagrange modulus of each Fekete set
  std::vector<std::vector<Index>> rows;  // grid indices of each Fekete set

  /// Lambda_k m_k k^2 / c; bounds ||p||_K / ||p||_{L2(nu)} for deg p <= k.
  double explicitBound(int k) const;
};

BmConstruction constructBmMeasure(const CompactSetSpec& spec, int kMax,
                                  const FeketeOptions& options = {});

struct BmInequalityReport {
  int k = 0;
  Index trials = 0;
  double maxRatio = 0.0;  // max ||e^{-kQ} p||_K / ||e^{-kQ} p||_{L2(nu)}
  double bmConstant = 0.0;
  double explicitBound = std::numeric_limits<double>::quiet_NaN();
  Index christoffelViolations = 0;  // ratio > bmConstant (1 + 1e-9)
  Index explicitViolations = 0;     // ratio > explicitBound
  bool degenerate = false;          // some p vanishes in L2(nu) but not on K
};

/// Random polynomials with standard normal monomial coefficients. The
/// explicit bound is tested when `construction` is given and Q is zero.
BmInequalityReport verifyBmInequality(const DiscreteMeasure& nu, const CompactSetSpec& spec,
                                      const Weight& Q, int k, Index trials, std::uint64_t seed,
                                      const BmConstruction* construction = nullptr);

/// Ratio attained by the kernel section z -> K_k(z, z*) at the maximizer z*
/// of the Christoffel function, against the optimal constant.
struct KernelSectionCheck {
  int k = 0;
  double bmConstant = 0.0;
  double ratio = 0.0;
  double relativeGap = 0.0;
};

KernelSectionCheck kernelSectionCheck(const DiscreteMeasure& nu, const CompactSetSpec& spec,
                                      const Weight& Q, int k);

enum class BmVerdict { ConsistentWithBm, GrowthDetected };

struct BmReport {
  std::string weight;
  std::vector<int> ks;
  std::vector<double> mk;       // M_k (may be +inf)
  std::vector<double> mkRoot;   // M_k^(1/k)
  double slope = 0.0;           // least squares slope of log M_k over the top half
  BmVerdict verdict = BmVerdict::ConsistentWithBm;
};

inline constexpr double kBmSlopeThreshold = 0.01;

std::vector<BmReport> strongBmScan(const DiscreteMeasure& nu, const CompactSetSpec& spec,
                                   const std::vector<Weight>& weights, const std::vector<int>& ks);

enum class DensityStatus { Pass, Fail, Inconclusive };

struct MassDensityRow {
  Index center = 0;  // column of `centers`
  double radius = 0.0;
  double mass = 0.0;
  double bound = 0.0;  // r^T
  DensityStatus status = DensityStatus::Inconclusive;
};

struct MassDensityReport {
  double T = 0.0;
  double spacing = 0.0;  // largest nearest-neighbour distance between atoms
  std::vector<MassDensityRow> rows;
  double passFraction = 0.0;  // among conclusive rows
  DensityStatus verdict = DensityStatus::Inconclusive;
};

/// nu(closed ball(z0, r)) >= r^T at each center and radius; radii below the
/// atom spacing are inconclusive.
MassDensityReport massDensityCheck(const DiscreteMeasure& nu, const PointSet& centers, double T,
                                   const std::vector<double>& radii);

std::string toString(BmVerdict v);
std::string toString(DensityStatus s);

}  // namespace ldpot

#pragma once

#include "ldpot/core.hpp"
#include "ldpot/energy.hpp"
#include "ldpot/weight.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ldpot {

// Neighborhood functionals and sigma_k probabilities. For a neighborhood G
// of moment boxes and the atoms of nu,
//   I_k(G) = int_{G_N} |VDM^Q|^2 d nu^N,   J_k(G) = I_k(G)^(1/(2kN)),
//   sigma_k(G) = I_k(G) / Z_k.

enum class JMode {
  Auto,       // Enumerate when small, else Tilted
  Enumerate,  // exact sum over N-subsets of the atoms
  DirectMc,   // i.i.d. tuples from nu^N
  Dpp,        // exact draws from Prob_k, hit counting
  Tilted,     // exact draws from Prob_k for the weight Q + t, reweighted
};

inline constexpr double kEnumerationLimit = 1e6;

struct JEstimate {
  int k = 0;
  Index Nk = 0;
  JMode mode = JMode::Enumerate;
  double logZ = 0.0;
  double logIntegral = 0.0;  // log I_k(G); -inf on zero hits
  double logJ = 0.0;         // log I_k(G) / (2 k N)
  double logSigma = 0.0;     // log sigma_k(G)
  double relStderr = 0.0;    // stderr of I_k(G) relative to the estimate
  Index samples = 0;
  Index hits = 0;
  bool zeroFlag = false;
  /// One-sided 95% bound on log sigma_k(G) when no sample hit G.
  double logSigmaUpper = std::numeric_limits<double>::quiet_NaN();
  double J() const { return std::exp(logJ); }
};

struct JOptions {
  JMode mode = JMode::Auto;
  Index samples = 10000;
  std::uint64_t seed = 0;
  int tasks = 1;
  /// Tilt t(z) = sum_r tilt_r f_r(z) over the moment features of G, used by
  /// Tilted (and by Auto when enumeration is too large); empty means t = 0.
  Eigen::VectorXd tilt;
};

/// Number of N-subsets of an M-point support (as a double).
double subsetCount(Index m, Index n);

JEstimate jFunctionalK(const NeighborhoodSpec& G, const DiscreteMeasure& nu, const Weight& Q,
                       int k, const JOptions& options = {});

struct WEstimate {
  int k = 0;
  Index Nk = 0;
  double logVdmQ = -std::numeric_limits<double>::infinity();  // best feasible value
  double W = 0.0;            // exp(logVdmQ / (k N)); 0 when infeasible
  bool exact = false;        // found by enumeration
  bool zeroFlag = true;      // no feasible configuration found
  double bestViolation = 0;  // smallest moment-box violation reached
  Configuration config{PointSet::Zero(1, 1), 0};
};

struct WOptions {
  int restarts = 3;
  std::uint64_t seed = 0;
  Index maxSweeps = 200;
  double penalty = 1e6;
  bool allowEnumeration = true;
};

/// Largest |VDM^Q|^(1/(kN)) over grid configurations whose empirical measure
/// lies in G. Exact by enumeration when the grid is small, otherwise a
/// penalized exchange search (a lower bound).
WEstimate wFunctionalK(const NeighborhoodSpec& G, const CompactSetSpec& spec, const Weight& Q,
                       int k, const WOptions& options = {});

/// Smallest max-norm moment deviation from the center of G reached by a
/// swap descent over N-point grid configurations.
double feasibilityFloor(const NeighborhoodSpec& G, const PointSet& candidates, Index n,
                        std::uint64_t seed = 0);

/// Dominating point of a moment box: the minimizer of I^Q over the closed
/// box, its rate, and the tilt coefficients (box multipliers).
struct DominatingPoint {
  DiscreteMeasure mu{PointSet::Zero(1, 1), Eigen::VectorXd::Ones(1)};
  double rate = 0.0;  // 1/2 [I^Q(mu) - I^Q(mu_eq)]
  Eigen::VectorXd tilt;
  double kktResidual = 0.0;
};

DominatingPoint dominatingPoint(const NeighborhoodSpec& G, const CompactSetSpec& spec,
                                const Weight& Q, const EquilibriumResult& eq);

struct RateRow {
  int k = 0;
  Index Nk = 0;
  double estimate = 0.0;      // -log sigma_k(G_eps) / (2 k N)
  double stderr = 0.0;
  double estimateHalf = 0.0;  // same for G_{eps/2}
  double stderrHalf = 0.0;
  bool zeroFlag = false;
  bool zeroFlagHalf = false;
  JMode mode = JMode::Enumerate;
  double floor = 0.0;  // feasibility floor at this N
  bool feasible = true;
  double bracketMid() const { return 0.5 * (estimate + estimateHalf); }
};

struct RateEstimate {
  double epsilon = 0.0;
  int momentDegree = 0;
  std::vector<RateRow> rows;
  double prediction = 0.0;      // rate function at the target
  double infPrediction = 0.0;   // infimum of the rate over closed G_eps
  double infPredictionHalf = 0.0;
  /// Index of the largest k with finite, feasible estimates (-1 if none).
  int largestFeasible() const;
};

struct RateOptions {
  Index samples = 4000;
  std::uint64_t seed = 0;
  int tasks = 1;
  JMode mode = JMode::Auto;
};

RateEstimate rateEstimate(const DiscreteMeasure& target, const CompactSetSpec& spec,
                          const DiscreteMeasure& nu, const Weight& Q, const std::vector<int>& ks,
                          double epsilon, int momentDegree, const RateOptions& options = {});

struct ReportCheck {
  std::string name;
  int k = 0;
  double value = 0.0;
  double prediction = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct LdpReport {
  std::string configHash;
  std::vector<ReportCheck> checks;
  bool pass() const;
};

struct LdpReportConfig {
  std::vector<int> ks;
  double epsilon = 0.05;
  int momentDegree = 2;
  Index samples = 2000;
  std::uint64_t seed = 0;
  int tasks = 1;
  double eta = 0.1;
  /// Optional closed-form equilibrium CDF for a sup-distance check.
  std::optional<std::function<double(double)>> referenceCdf;
  std::string configHash;
};

/// Runs the internal consistency checks for one (K, nu, Q) configuration.
LdpReport ldpReport(const CompactSetSpec& spec, const DiscreteMeasure& nu, const Weight& Q,
                    const LdpReportConfig& config);

std::string toString(JMode mode);

}  // namespace ldpot

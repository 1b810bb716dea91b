#pragma once

#include "ldpot/core.hpp"
#include "ldpot/polynomials.hpp"
#include "ldpot/weight.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ldpot {

struct FeketeReport {
  int k = 0;
  Configuration config{PointSet::Zero(1, 1), 0};
  double logVdmQ = 0.0;
  double deltaQk = 0.0;     // exp(logVdmQ (n+1) / (n k N_k))
  double normalized = 0.0;  // deltaQk^(n/(n+1)) = |VDM^Q|^(1/(k N_k))
  Index iterations = 0;     // accepted exchanges
  Index sweeps = 0;
  bool converged = false;
  std::vector<double> objectiveTrace;  // log|VDM^Q| at every refactorization
  double lebesgue = 1.0;  // max over the grid of the Lagrange basis moduli
};

struct FeketeOptions {
  int restarts = 3;  // random starts in addition to the Leja start
  std::uint64_t seed = 0;
  Index maxSweeps = 200;
};

/// Greedy weighted Leja points: row-pivoted LU of the weighted orthonormal
/// basis on the candidate grid, ties to the lowest candidate index.
Configuration lejaSequence(const CompactSetSpec& spec, const Weight& Q, int k);

/// Single-point exchange search started from `start`. Start points that are
/// not grid candidates are appended to the candidate list.
FeketeReport feketeExchange(const Configuration& start, const CompactSetSpec& spec,
                            const Weight& Q, Index maxSweeps = 200);

/// Best of the Leja-started search and `restarts` seeded random starts.
FeketeReport feketePoints(const CompactSetSpec& spec, const Weight& Q, int k,
                          const FeketeOptions& options = {});

/// Limit estimates from the last three values of a sequence f_k.
struct Extrapolation {
  /// Fit of log f = a + b log(k+1)/k + c/k; returns exp(a).
  double logModel = 0.0;
  /// Richardson in 1/k: f = a + b/k + c/k^2; returns a.
  double richardson = 0.0;
};
Extrapolation extrapolateLimit(const std::vector<int>& ks, const std::vector<double>& values);

struct TransfiniteDiameter {
  std::vector<FeketeReport> reports;  // k = 1..kMax
  Extrapolation limit;                // of the normalized sequence
  bool monotone = false;              // normalized values nonincreasing in k
};

TransfiniteDiameter transfiniteDiameter(const CompactSetSpec& spec, const Weight& Q, int kMax,
                                        const FeketeOptions& options = {});

struct ConvergenceRow {
  int k = 0;
  double distance = 0.0;  // weak-* moment distance to the reference
};

struct FeketeConvergence {
  std::vector<ConvergenceRow> rows;
  bool decreasing = false;  // last distance below the first
};

/// Distance of Fekete empirical measures to a reference (the weighted
/// equilibrium measure on the grid when none is given; n = 1 only).
FeketeConvergence feketeEmpiricalConvergence(const CompactSetSpec& spec, const Weight& Q,
                                             const std::vector<int>& ks,
                                             std::optional<DiscreteMeasure> reference = std::nullopt,
                                             const FeketeOptions& options = {}, int degree = 4);

namespace detail {

/// Fekete-type rows on a weighted candidate grid, for callers that work with
/// a reduced (possibly real-variable) basis.
struct GridFekete {
  std::vector<Index> rows;
  double logAbsDet = 0.0;
  double lebesgue = 1.0;
  Index rank = 0;
};
GridFekete gridFekete(const PointSet& candidates, const Eigen::VectorXd& qValues, int k,
                      bool realVariables, const FeketeOptions& options);

}  // namespace detail

}  // namespace ldpot

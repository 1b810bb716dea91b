#pragma once

#include "ldpot/core.hpp"
#include "ldpot/fekete.hpp"
#include "ldpot/weight.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ldpot {

// Univariate logarithmic potential theory on discretized measures.

enum class EnergyMode {
  /// Sum over distinct atom pairs only; a single atom has energy 0.
  OffDiagonal,
  /// Atoms stand for uniform mass on their grid cells: the diagonal gets the
  /// exact self-energy 3/2 - log h of a segment of length h.
  Continuum,
};

/// p_mu(z) = sum_j m_j log(1/|z - a_j|); +inf at an atom of positive mass.
double logPotential(const DiscreteMeasure& mu, Complex z);

double energy(const DiscreteMeasure& mu, EnergyMode mode);
double weightedEnergy(const DiscreteMeasure& mu, const Weight& Q, EnergyMode mode);

/// Continuum-mode kernel: log(1/|z_i - z_j|) off the diagonal and
/// 3/2 - log h_i on it.
Eigen::MatrixXd logKernelMatrix(const PointSet& atoms, const Eigen::VectorXd& cells);

/// Linear constraints lo <= features * m <= hi on the grid masses.
struct MomentBox {
  Eigen::MatrixXd features;  // rows = constraints, cols = grid nodes
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct EquilibriumOptions {
  Index gradientIterations = 600;  // accelerated projected gradient warm-up
  Index polishIterations = 200;    // active-set refinements
  double tolerance = 1e-9;         // KKT violation accepted by the active set
  double targetResidual = 1e-7;
};

struct EquilibriumResult {
  DiscreteMeasure muEq{PointSet::Zero(1, 1), Eigen::VectorXd::Ones(1)};  // on the full grid
  double F = 0.0;              // Robin-type constant: p + Q = F on the support
  double IQmin = 0.0;          // weighted energy of muEq
  Eigen::VectorXd potential;   // cell-averaged p_muEq on the grid
  Eigen::VectorXd extremal;    // V = F - p on the grid
  double kktResidual = 0.0;
  Index iterations = 0;
  bool converged = false;
  Eigen::VectorXd multipliers;  // for MomentBox rows (tilt = features^T multipliers)
};

/// Minimizes m^T A m + 2 q^T m over the simplex (continuum kernel A).
EquilibriumResult equilibriumMeasure(const CompactSetSpec& spec, const Weight& Q,
                                     const EquilibriumOptions& options = {});

/// Grid-level solve with explicit weight values; infinite q entries are
/// excluded. `kernel` may be passed to reuse an assembled matrix.
EquilibriumResult equilibriumOnGrid(const PointSet& grid, const Eigen::VectorXd& cells,
                                    const Eigen::VectorXd& q,
                                    const EquilibriumOptions& options = {},
                                    const MomentBox* box = nullptr,
                                    const Eigen::MatrixXd* kernel = nullptr);

/// 1/2 [I^Q(mu) - I^Q(mu_eq)] in continuum mode. mu must live on the grid of
/// eq (atoms off the grid are rejected).
double rateFunction(const DiscreteMeasure& mu, const EquilibriumResult& eq, const Weight& Q);

struct WIdentityReport {
  double IQmin = 0.0;
  double predicted = 0.0;       // exp(-I^Q(mu_eq) / 2)
  double feketeEstimate = 0.0;  // extrapolated normalized diameter
  double relativeGap = 0.0;
};

WIdentityReport wEnergyIdentityCheck(const CompactSetSpec& spec, const Weight& Q, int kMax,
                                     const FeketeOptions& options = {});

struct ApproximationRow {
  int j = 0;
  double F = 0.0;
  double energy = 0.0;      // I(mu_j)
  double uIntegral = 0.0;   // integral of Q_j d mu_j
  double energyGap = 0.0;   // I(mu_j) - I(mu)
  double uGap = 0.0;        // integral Q_j d mu_j - integral u d mu
  double kktResidual = 0.0;
};

/// Weights Q_j = max(u, c_j) + 1/j^2 decreasing to u = -p_mu on the grid,
/// with c_j = min u + (max u - min u)/j^2, and their equilibrium data.
std::vector<ApproximationRow> monotoneWeightApproximation(const DiscreteMeasure& mu,
                                                          const CompactSetSpec& spec, int jMax);

// Reference measures on grids (masses integrate the density over each cell).

/// Interval-union grid measure from a cumulative distribution function.
DiscreteMeasure gridMeasure(const CompactSetSpec& spec, const std::function<double(double)>& cdf);
DiscreteMeasure arcsineMeasure(const CompactSetSpec& spec);  // spec: a single interval
DiscreteMeasure semicircleMeasure(const CompactSetSpec& spec, double radius);
DiscreteMeasure uniformMeasure(const CompactSetSpec& spec);  // cell-proportional masses
/// M Gauss-Chebyshev nodes on [lo, hi] with equal masses (no cells).
DiscreteMeasure chebyshevNodes(double lo, double hi, Index m);

double arcsineCdf(double x, double lo, double hi);
double semicircleCdf(double x, double radius);

/// Sup over cell boundaries of |cumulative grid mass - cdf| (real grids).
double cdfSupDistance(const DiscreteMeasure& mu, const std::function<double(double)>& cdf);

}  // namespace ldpot

#pragma once

#include "ldpot/core.hpp"
#include "ldpot/polynomials.hpp"

#include <vector>

namespace ldpot::detail {

/// Coordinates used as polynomial variables: the n complex coordinates, or
/// their 2n real and imaginary parts when realVariables is set.
Eigen::MatrixXcd polynomialVariables(const PointSet& points, bool realVariables);

/// Discrete orthonormal polynomials built by the Arnoldi (Stieltjes) process
/// on sample points with weights mu_j = mass_j * exp(-2k(Q_j - shift)).
///
/// Column t of `weighted` holds sqrt(mu_j) p_t(z_j); the columns are
/// orthonormal in C^M. p_t has leading monomial coefficient lc_t, and
/// sum_t log|lc_t| gives the Gram determinant of the kept monomials.
struct ArnoldiBasis {
  MonomialBasis monomials{1, 0};
  bool realVariables = false;
  int k = 0;
  double shift = 0.0;  // weight shift s; the true system is exp(k s) p_t

  std::vector<Index> monomial;  // monomial index of each kept function
  std::vector<Index> parent;    // kept index of the parent (-1 for t = 0)
  std::vector<int> variable;    // multiplying variable
  std::vector<Eigen::VectorXcd> h;  // coefficients against earlier kept functions
  std::vector<double> diag;         // normalization h_tt (diag[0] = norm of 1)
  std::vector<double> logLeading;   // log|lc_t|

  Eigen::MatrixXcd weighted;  // M x rank
  Eigen::VectorXd sqrtMu;

  Index rank() const { return static_cast<Index>(monomial.size()); }
  bool full() const { return rank() == monomials.size(); }
  double sumLogLeading() const;

  /// log det of the monomial Gram matrix for the unshifted weight; -inf when
  /// some monomial was dropped.
  double logDetGram() const;

  /// p_t(z) (shifted normalization) at new points; rows follow the points.
  Eigen::MatrixXcd evaluate(const PointSet& points) const;
};

/// Relative size below which a new direction counts as dependent.
inline constexpr double kArnoldiDropTolerance = 1e-10;

/// masses and qValues are per point; points with zero mass or infinite Q
/// carry no weight. The shift is min Q over weighted points.
ArnoldiBasis buildArnoldi(const PointSet& points, const Eigen::VectorXd& masses,
                          const Eigen::VectorXd& qValues, int k, bool realVariables = false,
                          double dropTolerance = kArnoldiDropTolerance);

/// log|VDM^Q| of the sample rows `rows` (one per kept function) given
/// log|det weighted(rows, :)|.
double logVdmQFromRows(const ArnoldiBasis& basis, const Eigen::VectorXd& masses,
                       const std::vector<Index>& rows, double logAbsDetRows);

}  // namespace ldpot::detail

#pragma once

#include "ldpot/core.hpp"
#include "ldpot/weight.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ldpot {

namespace detail {
struct ArnoldiBasis;
}

/// binom(n + k, k); throws when the value exceeds `cap`.
Index basisSize(int n, int k, Index cap = 5000);

/// Monomials of total degree <= k in n variables, graded lexicographically
/// (degree first, then descending lex on the exponents).
class MonomialBasis {
 public:
  MonomialBasis(int n, int k, Index cap = 5000);

  int n() const { return n_; }
  int k() const { return k_; }
  Index size() const { return static_cast<Index>(exponents_.size()); }
  const std::vector<int>& exponent(Index i) const { return exponents_[static_cast<std::size_t>(i)]; }
  int totalDegree(Index i) const;
  /// Sum of the total degrees of all basis elements.
  long long degreeSum() const;

  /// Index of alpha - e_var, or -1 when alpha_var == 0.
  Index lower(Index i, int var) const {
    return lower_[static_cast<std::size_t>(i)][static_cast<std::size_t>(var)];
  }
  /// Index of alpha + e_var, or -1 when the degree would exceed k.
  Index raise(Index i, int var) const {
    return raise_[static_cast<std::size_t>(i)][static_cast<std::size_t>(var)];
  }

  /// Values e_i(x_j): rows follow the points (n x M input), columns the basis.
  Eigen::MatrixXcd evaluate(const PointSet& points) const;

 private:
  int n_;
  int k_;
  std::vector<std::vector<int>> exponents_;
  std::vector<std::vector<Index>> lower_;
  std::vector<std::vector<Index>> raise_;
};

/// N_k points of C^n with an optional cached log|VDM^Q|.
class Configuration {
 public:
  Configuration(PointSet points, int k);

  const PointSet& points() const { return points_; }
  int k() const { return k_; }
  int dimension() const { return static_cast<int>(points_.rows()); }
  Index size() const { return points_.cols(); }

  /// Cached log|VDM^Q| for the weight with the given id, if any.
  std::optional<double> cached(const std::string& weightId) const;
  Configuration withCache(double logVdmQ, std::string weightId) const;

 private:
  PointSet points_;
  int k_;
  std::optional<double> logVdmQ_;
  std::string weightId_;
};

enum class VdmMethod {
  Arnoldi,     // orthogonal triangularization (default, stable at high degree)
  MonomialLu,  // column-scaled monomials with partially pivoted LU
};

/// log|det[e_i(x_j)]|, -inf for repeated points or a pivot below 1e-300.
double logAbsVdm(const PointSet& points, int k, VdmMethod method = VdmMethod::Arnoldi);
double logAbsVdm(const Configuration& config, VdmMethod method = VdmMethod::Arnoldi);

/// log|VDM| - k * sum_j Q(x_j); -inf if Q is +inf at some point.
double logAbsVdmWeighted(const Configuration& config, const Weight& Q);

/// Configuration with the weighted log-Vandermonde cached.
Configuration cacheWeighted(const Configuration& config, const Weight& Q);

/// G_ij = sum_atoms mass * e_i(z) conj(e_j(z)) exp(-2kQ(z)).
Eigen::MatrixXcd gramMatrix(const DiscreteMeasure& nu, const Weight& Q, int k,
                            const MonomialBasis& basis);

/// Orthonormal polynomials p_1..p_r with respect to
/// <f, g> = sum mass * f conj(g) exp(-2kQ). Two storage forms: explicit
/// monomial coefficients (from orthonormalize) or the Arnoldi recurrence
/// (from orthonormalSystem), which stays accurate at high degree.
class OrthonormalSystem {
 public:
  OrthonormalSystem(MonomialBasis basis, Eigen::MatrixXcd coefficients, Weight Q, int k);
  OrthonormalSystem(std::shared_ptr<const detail::ArnoldiBasis> arnoldi, Weight Q, int k);

  int k() const { return k_; }
  Index rank() const;
  const Weight& weight() const { return weight_; }

  /// p_j(z) exp(-kQ(z)); rows follow the points, columns the system.
  Eigen::MatrixXcd weightedValues(const PointSet& points) const;

  /// Monomial coefficients (columns = p_j). For the recurrence form the
  /// matrix is assembled on demand and may lose accuracy at high degree.
  Eigen::MatrixXcd coefficients() const;

  const detail::ArnoldiBasis* arnoldi() const { return arnoldi_.get(); }

 private:
  std::optional<MonomialBasis> basis_;
  Eigen::MatrixXcd coefficients_;
  std::shared_ptr<const detail::ArnoldiBasis> arnoldi_;
  Weight weight_;
  int k_;
};

/// Pivoted Cholesky of a Hermitian PSD Gram matrix; coefficient matrix
/// C with C^H G C = I on the numerical rank. Throws when G has an eigen
/// direction below -1e-10 (relative to its largest diagonal entry).
OrthonormalSystem orthonormalize(const Eigen::MatrixXcd& gram, const MonomialBasis& basis,
                                 const Weight& Q = Weight::zero(), int k = -1);

/// Orthonormal system built by Arnoldi orthogonalization over the atoms of nu.
/// realVariables treats C^n as R^2n (polynomials in Re z and Im z).
OrthonormalSystem orthonormalSystem(const DiscreteMeasure& nu, const Weight& Q, int k,
                                    bool realVariables = false);

/// sum_j |p_j(z)|^2 exp(-2kQ(z)).
double christoffel(const Point& z, const OrthonormalSystem& sys);
Eigen::VectorXd christoffel(const PointSet& points, const OrthonormalSystem& sys);

/// Numerical dimension of the degree-k polynomials restricted to the grid
/// of K (rank of the grid Vandermonde).
Index restrictedDimension(const CompactSetSpec& spec, int k, bool realVariables = false);

/// Optimal Bernstein-Markov constant max_K sqrt(christoffel); +inf when the
/// L2(nu) seminorm does not separate polynomials that differ on K.
double bmConstant(const CompactSetSpec& spec, const DiscreteMeasure& nu, const Weight& Q, int k);

}  // namespace ldpot

#include "ldpot/detail/arnoldi.hpp"

#include "ldpot/detail/linalg.hpp"

#include <cmath>

namespace ldpot::detail {

Eigen::MatrixXcd polynomialVariables(const PointSet& points, bool realVariables) {
  if (!realVariables) return points;
  const Index n = points.rows();
  Eigen::MatrixXcd vars(2 * n, points.cols());
  vars.topRows(n) = points.real().cast<Complex>();
  vars.bottomRows(n) = points.imag().cast<Complex>();
  return vars;
}

double ArnoldiBasis::sumLogLeading() const {
  double s = 0.0;
  for (double v : logLeading) s += v;
  return s;
}

double ArnoldiBasis::logDetGram() const {
  if (!full()) return -kInf;
  return -2.0 * sumLogLeading() - 2.0 * k * shift * static_cast<double>(rank());
}

Eigen::MatrixXcd ArnoldiBasis::evaluate(const PointSet& points) const {
  const Eigen::MatrixXcd vars = polynomialVariables(points, realVariables);
  Eigen::MatrixXcd p(points.cols(), rank());
  if (rank() == 0) return p;
  p.col(0).setConstant(1.0 / diag[0]);
  for (Index t = 1; t < rank(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    Eigen::VectorXcd v =
        vars.row(variable[ts]).transpose().cwiseProduct(p.col(parent[ts]));
    v.noalias() -= p.leftCols(t) * h[ts];
    p.col(t) = v / diag[ts];
  }
  return p;
}

ArnoldiBasis buildArnoldi(const PointSet& points, const Eigen::VectorXd& masses,
                          const Eigen::VectorXd& qValues, int k, bool realVariables,
                          double dropTolerance) {
  if (points.cols() != masses.size() || points.cols() != qValues.size()) {
    throw InvalidArgument("points, masses and weight values must have the same length");
  }
  if (k < 0) throw InvalidArgument("degree must be >= 0");
  const Index m = points.cols();
  const int vars = static_cast<int>(points.rows()) * (realVariables ? 2 : 1);

  ArnoldiBasis b;
  b.monomials = MonomialBasis(vars, k);
  b.realVariables = realVariables;
  b.k = k;

  // Shift by the smallest finite weight over charged points to keep
  // exp(-2kQ) in range.
  double shift = kInf;
  for (Index j = 0; j < m; ++j) {
    if (masses(j) > 0.0 && std::isfinite(qValues(j))) shift = std::min(shift, qValues(j));
  }
  if (!std::isfinite(shift)) {
    throw InvalidArgument("the weight annihilates all of the mass (Q = +inf everywhere)");
  }
  b.shift = shift;
  b.sqrtMu.resize(m);
  for (Index j = 0; j < m; ++j) {
    b.sqrtMu(j) = (masses(j) > 0.0 && std::isfinite(qValues(j)))
                      ? std::sqrt(masses(j)) * std::exp(-k * (qValues(j) - shift))
                      : 0.0;
  }

  const Eigen::MatrixXcd z = polynomialVariables(points, realVariables);
  const Index total = b.monomials.size();
  b.weighted.resize(m, total);
  std::vector<Index> keptIndex(static_cast<std::size_t>(total), -1);

  const double norm0 = b.sqrtMu.norm();
  b.weighted.col(0) = b.sqrtMu.cast<Complex>() / norm0;
  b.monomial.push_back(0);
  b.parent.push_back(-1);
  b.variable.push_back(-1);
  b.h.emplace_back();
  b.diag.push_back(norm0);
  b.logLeading.push_back(-std::log(norm0));
  keptIndex[0] = 0;

  for (Index t = 1; t < total; ++t) {
    Index parent = -1;
    int var = -1;
    for (int i = 0; i < vars; ++i) {
      const Index low = b.monomials.lower(t, i);
      if (low >= 0 && keptIndex[static_cast<std::size_t>(low)] >= 0) {
        parent = keptIndex[static_cast<std::size_t>(low)];
        var = i;
        break;
      }
    }
    // Every parent dependent: z^alpha is a combination of earlier monomials.
    if (parent < 0) continue;

    const Index r = b.rank();
    Eigen::VectorXcd v = z.row(var).transpose().cwiseProduct(b.weighted.col(parent));
    const double before = v.norm();
    auto basis = b.weighted.leftCols(r);
    Eigen::VectorXcd coef = basis.adjoint() * v;
    v.noalias() -= basis * coef;
    const Eigen::VectorXcd again = basis.adjoint() * v;
    v.noalias() -= basis * again;
    coef += again;
    const double norm = v.norm();
    if (!(before > 0.0) || norm < dropTolerance * before) continue;

    b.weighted.col(r) = v / norm;
    b.monomial.push_back(t);
    b.parent.push_back(parent);
    b.variable.push_back(var);
    b.h.push_back(coef);
    b.diag.push_back(norm);
    b.logLeading.push_back(b.logLeading[static_cast<std::size_t>(parent)] - std::log(norm));
    keptIndex[static_cast<std::size_t>(t)] = r;
  }
  b.weighted.conservativeResize(m, b.rank());
  return b;
}

double logVdmQFromRows(const ArnoldiBasis& basis, const Eigen::VectorXd& masses,
                       const std::vector<Index>& rows, double logAbsDetRows) {
  if (!std::isfinite(logAbsDetRows)) return -kInf;
  double logMass = 0.0;
  for (Index r : rows) logMass += std::log(masses(r));
  return logAbsDetRows - 0.5 * logMass -
         basis.k * basis.shift * static_cast<double>(rows.size()) - basis.sumLogLeading();
}

}  // namespace ldpot::detail

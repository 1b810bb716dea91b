#include "ldpot/polynomials.hpp"

#include "ldpot/detail/arnoldi.hpp"
#include "ldpot/detail/linalg.hpp"

#include <cmath>
#include <map>

namespace ldpot {

using detail::kInf;

Index basisSize(int n, int k, Index cap) {
  if (n < 1 || k < 0) throw InvalidArgument("monomial basis needs n >= 1 and k >= 0");
  // binom(n + k, k) built as a running product; each step stays integral.
  unsigned long long value = 1;
  for (int i = 1; i <= k; ++i) {
    value = value * static_cast<unsigned long long>(n + i) / static_cast<unsigned long long>(i);
    if (value > static_cast<unsigned long long>(cap)) {
      throw InvalidArgument("N_k = binom(" + std::to_string(n + k) + ", " + std::to_string(k) +
                            ") exceeds the basis cap " + std::to_string(cap));
    }
  }
  return static_cast<Index>(value);
}

namespace {

void gradedLexOfDegree(int vars, int total, std::vector<int>& current, int pos,
                       std::vector<std::vector<int>>& out) {
  if (pos == vars - 1) {
    current[static_cast<std::size_t>(pos)] = total;
    out.push_back(current);
    return;
  }
  for (int e = total; e >= 0; --e) {
    current[static_cast<std::size_t>(pos)] = e;
    gradedLexOfDegree(vars, total - e, current, pos + 1, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int k, Index cap) : n_(n), k_(k) {
  const Index size = basisSize(n, k, cap);
  exponents_.reserve(static_cast<std::size_t>(size));
  for (int d = 0; d <= k; ++d) {
    std::vector<int> current(static_cast<std::size_t>(n), 0);
    gradedLexOfDegree(n, d, current, 0, exponents_);
  }
  std::map<std::vector<int>, Index> position;
  for (std::size_t i = 0; i < exponents_.size(); ++i) position[exponents_[i]] = static_cast<Index>(i);
  lower_.assign(exponents_.size(), std::vector<Index>(static_cast<std::size_t>(n), -1));
  raise_.assign(exponents_.size(), std::vector<Index>(static_cast<std::size_t>(n), -1));
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    for (int v = 0; v < n; ++v) {
      auto e = exponents_[i];
      const auto vs = static_cast<std::size_t>(v);
      if (e[vs] > 0) {
        --e[vs];
        lower_[i][vs] = position.at(e);
        ++e[vs];
      }
      ++e[vs];
      if (auto it = position.find(e); it != position.end()) raise_[i][vs] = it->second;
    }
  }
}

int MonomialBasis::totalDegree(Index i) const {
  int d = 0;
  for (int e : exponent(i)) d += e;
  return d;
}

long long MonomialBasis::degreeSum() const {
  long long s = 0;
  for (Index i = 0; i < size(); ++i) s += totalDegree(i);
  return s;
}

Eigen::MatrixXcd MonomialBasis::evaluate(const PointSet& points) const {
  if (points.rows() != n_) throw InvalidArgument("points do not match the basis dimension");
  Eigen::MatrixXcd e(points.cols(), size());
  e.col(0).setOnes();
  for (Index i = 1; i < size(); ++i) {
    for (int v = 0; v < n_; ++v) {
      const Index low = lower(i, v);
      if (low >= 0) {
        e.col(i) = e.col(low).cwiseProduct(points.row(v).transpose());
        break;
      }
    }
  }
  return e;
}

// ---------------------------------------------------------------------------

Configuration::Configuration(PointSet points, int k) : points_(std::move(points)), k_(k) {
  if (points_.rows() < 1) throw InvalidArgument("configuration needs dimension >= 1");
  const Index expected = basisSize(static_cast<int>(points_.rows()), k);
  if (points_.cols() != expected) {
    throw InvalidArgument("configuration has " + std::to_string(points_.cols()) +
                          " points, N_k = " + std::to_string(expected));
  }
  if (!points_.allFinite()) throw InvalidArgument("configuration points must be finite");
}

std::optional<double> Configuration::cached(const std::string& weightId) const {
  if (logVdmQ_ && weightId_ == weightId) return logVdmQ_;
  return std::nullopt;
}

Configuration Configuration::withCache(double logVdmQ, std::string weightId) const {
  Configuration c = *this;
  c.logVdmQ_ = logVdmQ;
  c.weightId_ = std::move(weightId);
  return c;
}

namespace {

bool hasRepeatedPoint(const PointSet& pts) {
  for (Index a = 0; a < pts.cols(); ++a) {
    for (Index b = a + 1; b < pts.cols(); ++b) {
      if ((pts.col(a).array() == pts.col(b).array()).all()) return true;
    }
  }
  return false;
}

}  // namespace

double logAbsVdm(const PointSet& points, int k, VdmMethod method) {
  const int n = static_cast<int>(points.rows());
  const Index size = basisSize(n, k);
  if (points.cols() != size) throw InvalidArgument("need exactly N_k points");
  if (hasRepeatedPoint(points)) return -kInf;

  if (method == VdmMethod::MonomialLu) {
    Eigen::MatrixXcd e = MonomialBasis(n, k).evaluate(points);
    double logScale = 0.0;
    for (Index i = 0; i < e.cols(); ++i) {
      const double s = e.col(i).cwiseAbs().maxCoeff();
      if (s == 0.0) return -kInf;
      e.col(i) /= s;
      logScale += std::log(s);
    }
    return detail::logAbsDeterminant(e) + logScale;
  }

  const Eigen::VectorXd masses = Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
  const detail::ArnoldiBasis b =
      detail::buildArnoldi(points, masses, Eigen::VectorXd::Zero(size), k, false, 0.0);
  if (!b.full()) return -kInf;
  for (double d : b.diag) {
    if (d < 1e-300) return -kInf;
  }
  // The square weighted matrix has orthonormal columns, so |det| = 1 up to
  // rounding; keep the computed value for consistency.
  std::vector<Index> rows(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) rows[static_cast<std::size_t>(i)] = i;
  return detail::logVdmQFromRows(b, masses, rows, detail::logAbsDeterminant(b.weighted));
}

double logAbsVdm(const Configuration& config, VdmMethod method) {
  return logAbsVdm(config.points(), config.k(), method);
}

double logAbsVdmWeighted(const Configuration& config, const Weight& Q) {
  const std::string id = Q.id();
  if (auto c = config.cached(id)) return *c;
  const Eigen::VectorXd q = Q.evaluate(config.points());
  if (!q.allFinite()) return -kInf;
  const double base = logAbsVdm(config);
  if (!std::isfinite(base)) return -kInf;
  return base - config.k() * q.sum();
}

Configuration cacheWeighted(const Configuration& config, const Weight& Q) {
  return config.withCache(logAbsVdmWeighted(config, Q), Q.id());
}

Eigen::MatrixXcd gramMatrix(const DiscreteMeasure& nu, const Weight& Q, int k,
                            const MonomialBasis& basis) {
  const Eigen::VectorXd q = Q.evaluate(nu.atoms());
  Eigen::VectorXd w(nu.size());
  for (Index j = 0; j < nu.size(); ++j) {
    w(j) = std::isfinite(q(j)) ? nu.masses()(j) * std::exp(-2.0 * k * q(j)) : 0.0;
  }
  if (!(w.sum() > 0.0)) {
    throw InvalidArgument("the weight annihilates all of the mass (Q = +inf nu-a.e.)");
  }
  const Eigen::MatrixXcd e = basis.evaluate(nu.atoms());
  return e.transpose() * w.asDiagonal() * e.conjugate();
}

// ---------------------------------------------------------------------------

OrthonormalSystem::OrthonormalSystem(MonomialBasis basis, Eigen::MatrixXcd coefficients,
                                     Weight Q, int k)
    : basis_(std::move(basis)), coefficients_(std::move(coefficients)), weight_(std::move(Q)),
      k_(k) {}

OrthonormalSystem::OrthonormalSystem(std::shared_ptr<const detail::ArnoldiBasis> arnoldi,
                                     Weight Q, int k)
    : arnoldi_(std::move(arnoldi)), weight_(std::move(Q)), k_(k) {}

Index OrthonormalSystem::rank() const {
  return arnoldi_ ? arnoldi_->rank() : coefficients_.cols();
}

Eigen::MatrixXcd OrthonormalSystem::weightedValues(const PointSet& points) const {
  const Eigen::VectorXd q = weight_.evaluate(points);
  Eigen::MatrixXcd values;
  double shift = 0.0;
  if (arnoldi_) {
    values = arnoldi_->evaluate(points);
    shift = arnoldi_->shift;
  } else {
    values = basis_->evaluate(points) * coefficients_;
  }
  for (Index j = 0; j < points.cols(); ++j) {
    if (std::isfinite(q(j))) {
      values.row(j) *= std::exp(-k_ * (q(j) - shift));
    } else {
      values.row(j).setZero();
    }
  }
  return values;
}

Eigen::MatrixXcd OrthonormalSystem::coefficients() const {
  if (!arnoldi_) return coefficients_;
  const auto& b = *arnoldi_;
  const Index size = b.monomials.size();
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(size, b.rank());
  c(0, 0) = 1.0 / b.diag[0];
  for (Index t = 1; t < b.rank(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(size);
    const auto parentCol = c.col(b.parent[ts]);
    for (Index i = 0; i < size; ++i) {
      if (parentCol(i) != Complex(0.0)) v(b.monomials.raise(i, b.variable[ts])) += parentCol(i);
    }
    v -= c.leftCols(t) * b.h[ts];
    c.col(t) = v / b.diag[ts];
  }
  return c * std::exp(b.k * b.shift);
}

OrthonormalSystem orthonormalize(const Eigen::MatrixXcd& gram, const MonomialBasis& basis,
                                 const Weight& Q, int k) {
  const Index n = gram.rows();
  if (gram.cols() != n || n != basis.size()) {
    throw InvalidArgument("Gram matrix does not match the basis");
  }
  const double scale = gram.diagonal().real().cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw InvalidArgument("Gram matrix is zero");
  if ((gram - gram.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidArgument("Gram matrix is not Hermitian");
  }
  // Coefficients C with C^T G conj(C) = I, i.e. C^H G^T C = I: factor G^T.
  Eigen::MatrixXcd a = gram.transpose();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n, n);
  const double tol = 1e-10 * scale;
  Index rank = 0;
  for (; rank < n; ++rank) {
    // Pivot on the largest remaining diagonal entry (first index on ties).
    Index p = rank;
    for (Index i = rank + 1; i < n; ++i) {
      if (a(i, i).real() > a(p, p).real()) p = i;
    }
    const double pivot = a(p, p).real();
    if (pivot < -tol) throw InvalidArgument("Gram matrix is not positive semidefinite");
    if (pivot <= tol) {
      for (Index i = rank; i < n; ++i) {
        if (a(i, i).real() < -tol) throw InvalidArgument("Gram matrix is not positive semidefinite");
      }
      break;
    }
    if (p != rank) {
      a.row(p).swap(a.row(rank));
      a.col(p).swap(a.col(rank));
      l.row(p).swap(l.row(rank));
      std::swap(perm[static_cast<std::size_t>(p)], perm[static_cast<std::size_t>(rank)]);
    }
    const double d = std::sqrt(pivot);
    l(rank, rank) = d;
    for (Index i = rank + 1; i < n; ++i) l(i, rank) = a(i, rank) / d;
    for (Index i = rank + 1; i < n; ++i) {
      for (Index j = rank + 1; j < n; ++j) a(i, j) -= l(i, rank) * std::conj(l(j, rank));
    }
  }
  const Eigen::MatrixXcd l1 = l.topLeftCorner(rank, rank);
  const Eigen::MatrixXcd inv =
      l1.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(rank, rank)).adjoint();
  Eigen::MatrixXcd coef = Eigen::MatrixXcd::Zero(n, rank);
  for (Index i = 0; i < rank; ++i) coef.row(perm[static_cast<std::size_t>(i)]) = inv.row(i);
  return OrthonormalSystem(basis, std::move(coef), Q, k < 0 ? basis.k() : k);
}

OrthonormalSystem orthonormalSystem(const DiscreteMeasure& nu, const Weight& Q, int k,
                                    bool realVariables) {
  auto b = std::make_shared<detail::ArnoldiBasis>(detail::buildArnoldi(
      nu.atoms(), nu.masses(), Q.evaluate(nu.atoms()), k, realVariables));
  return OrthonormalSystem(std::move(b), Q, k);
}

double christoffel(const Point& z, const OrthonormalSystem& sys) {
  return christoffel(PointSet(z), sys)(0);
}

Eigen::VectorXd christoffel(const PointSet& points, const OrthonormalSystem& sys) {
  return sys.weightedValues(points).rowwise().squaredNorm();
}

Index restrictedDimension(const CompactSetSpec& spec, int k, bool realVariables) {
  const PointSet grid = discretize(spec);
  const Index m = grid.cols();
  return detail::buildArnoldi(grid, Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)),
                              Eigen::VectorXd::Zero(m), k, realVariables)
      .rank();
}

double bmConstant(const CompactSetSpec& spec, const DiscreteMeasure& nu, const Weight& Q, int k) {
  const OrthonormalSystem sys = orthonormalSystem(nu, Q, k);
  const PointSet grid = discretize(spec);
  const Index m = grid.cols();
  const Eigen::VectorXd qGrid = Q.evaluate(grid);
  const Index gridRank =
      detail::buildArnoldi(grid, Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)),
                           qGrid, k)
          .rank();
  if (sys.rank() < gridRank) return kInf;
  return std::sqrt(christoffel(grid, sys).maxCoeff());
}

}  // namespace ldpot

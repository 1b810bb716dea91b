#include "ldpot/bernstein_markov.hpp"

#include "ldpot/detail/linalg.hpp"
#include "ldpot/polynomials.hpp"

#include <cmath>

namespace ldpot {

using detail::kInf;

double BmConstruction::explicitBound(int k) const {
  if (k < 1 || k > kMax) throw InvalidArgument("explicit bound needs 1 <= k <= k_max");
  const auto i = static_cast<std::size_t>(k - 1);
  return lebesgue[i] * static_cast<double>(mk[i]) * k * k / c;
}

BmConstruction constructBmMeasure(const CompactSetSpec& spec, int kMax,
                                  const FeketeOptions& options) {
  if (kMax < 1) throw InvalidArgument("k_max must be >= 1");
  const PointSet grid = discretize(spec);
  const Index m = grid.cols();
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(m);
  BmConstruction out;
  out.kMax = kMax;
  out.realVariables = !spec.isReal();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  double series = 0.0;
  for (int k = 1; k <= kMax; ++k) {
    FeketeOptions o = options;
    o.seed = detail::substreamSeed(options.seed, static_cast<std::uint64_t>(k));
    const detail::GridFekete f = detail::gridFekete(grid, q, k, out.realVariables, o);
    const double share = 1.0 / (static_cast<double>(k) * k);
    series += share;
    const auto mk = static_cast<Index>(f.rows.size());
    for (Index r : f.rows) w(r) += share / static_cast<double>(mk);
    out.mk.push_back(mk);
    out.lebesgue.push_back(std::max(1.0, f.lebesgue));
    out.rows.push_back(f.rows);
  }
  out.c = 1.0 / series;

  std::vector<Index> keep;
  for (Index i = 0; i < m; ++i) {
    if (w(i) > 0.0) keep.push_back(i);
  }
  PointSet atoms(grid.rows(), static_cast<Index>(keep.size()));
  Eigen::VectorXd masses(static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    atoms.col(static_cast<Index>(i)) = grid.col(keep[i]);
    masses(static_cast<Index>(i)) = out.c * w(keep[i]);
  }
  out.nu = DiscreteMeasure::normalize(std::move(atoms), std::move(masses));
  return out;
}

namespace {

// exp(-k(Q - s)) with s the smallest finite value; 0 where Q is infinite.
Eigen::VectorXd dampingFactors(const Eigen::VectorXd& q, int k, double shift) {
  Eigen::VectorXd f(q.size());
  for (Index i = 0; i < q.size(); ++i) f(i) = std::isfinite(q(i)) ? std::exp(-k * (q(i) - shift)) : 0.0;
  return f;
}

double finiteMin(const Eigen::VectorXd& q) {
  double s = kInf;
  for (Index i = 0; i < q.size(); ++i) {
    if (std::isfinite(q(i))) s = std::min(s, q(i));
  }
  return std::isfinite(s) ? s : 0.0;
}

}  // namespace

BmInequalityReport verifyBmInequality(const DiscreteMeasure& nu, const CompactSetSpec& spec,
                                      const Weight& Q, int k, Index trials, std::uint64_t seed,
                                      const BmConstruction* construction) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  const PointSet grid = discretize(spec);
  const MonomialBasis basis(spec.dimension(), k);
  const Eigen::MatrixXcd onGrid = basis.evaluate(grid);
  const Eigen::MatrixXcd onNu = basis.evaluate(nu.atoms());
  const Eigen::VectorXd qGrid = Q.evaluate(grid);
  const double shift = finiteMin(qGrid);
  const Eigen::VectorXd dGrid = dampingFactors(qGrid, k, shift);
  const Eigen::VectorXd dNu = dampingFactors(Q.evaluate(nu.atoms()), k, shift);

  BmInequalityReport r;
  r.k = k;
  r.trials = trials;
  r.bmConstant = bmConstant(spec, nu, Q, k);
  if (construction && Q.isZero() && k >= 1 && k <= construction->kMax) {
    r.explicitBound = construction->explicitBound(k);
  }
  std::mt19937_64 rng(seed);
  Eigen::VectorXcd coeffs(basis.size());
  for (Index t = 0; t < trials; ++t) {
    for (Index i = 0; i < basis.size(); ++i) coeffs(i) = detail::standardNormal(rng);
    const double sup = ((onGrid * coeffs).cwiseAbs().array() * dGrid.array()).maxCoeff();
    const double l2 = std::sqrt(
        ((onNu * coeffs).cwiseAbs2().array() * dNu.array().square() * nu.masses().array()).sum());
    double ratio = kInf;
    if (l2 > 0.0) {
      ratio = sup / l2;
    } else if (sup > 0.0) {
      r.degenerate = true;
    } else {
      ratio = 0.0;
    }
    r.maxRatio = std::max(r.maxRatio, ratio);
    if (ratio > r.bmConstant * (1.0 + 1e-9)) ++r.christoffelViolations;
    if (std::isfinite(r.explicitBound) && ratio > r.explicitBound) ++r.explicitViolations;
  }
  if (std::isinf(r.bmConstant)) {
    // Random coefficients almost never land in the null space of the
    // seminorm; test a witness from it directly.
    Eigen::MatrixXcd a = (nu.masses().array().sqrt() * dNu.array()).matrix().asDiagonal() * onNu;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    const double tol = 1e-12 * std::max(1.0, s.size() ? s(0) : 0.0);
    double sup = 0.0;
    for (Index j = 0; j < basis.size(); ++j) {
      if (j < s.size() && s(j) > tol) continue;
      sup = std::max(sup, ((onGrid * svd.matrixV().col(j)).cwiseAbs().array() * dGrid.array()).maxCoeff());
    }
    if (sup > 1e-12) {
      r.degenerate = true;
      r.maxRatio = kInf;
    }
  }
  return r;
}

KernelSectionCheck kernelSectionCheck(const DiscreteMeasure& nu, const CompactSetSpec& spec,
                                      const Weight& Q, int k) {
  const OrthonormalSystem sys = orthonormalSystem(nu, Q, k);
  const PointSet grid = discretize(spec);
  const Eigen::MatrixXcd onGrid = sys.weightedValues(grid);
  Index best = 0;
  onGrid.rowwise().squaredNorm().maxCoeff(&best);
  const Eigen::VectorXcd anchor = onGrid.row(best).adjoint();
  const double sup = (onGrid * anchor).cwiseAbs().maxCoeff();
  const Eigen::VectorXcd atNu = sys.weightedValues(nu.atoms()) * anchor;
  const double l2 = std::sqrt((atNu.cwiseAbs2().array() * nu.masses().array()).sum());
  KernelSectionCheck c;
  c.k = k;
  c.bmConstant = bmConstant(spec, nu, Q, k);
  c.ratio = l2 > 0.0 ? sup / l2 : kInf;
  c.relativeGap = std::abs(c.ratio - c.bmConstant) / c.bmConstant;
  return c;
}

std::vector<BmReport> strongBmScan(const DiscreteMeasure& nu, const CompactSetSpec& spec,
                                   const std::vector<Weight>& weights, const std::vector<int>& ks) {
  std::vector<BmReport> out;
  for (const Weight& Q : weights) {
    BmReport r;
    r.weight = Q.source();
    r.ks = ks;
    for (int k : ks) {
      const double m = bmConstant(spec, nu, Q, k);
      r.mk.push_back(m);
      r.mkRoot.push_back(k > 0 ? std::pow(m, 1.0 / k) : m);
    }
    const std::size_t first = ks.size() >= 4 ? ks.size() / 2 : 0;
    const auto n = static_cast<double>(ks.size() - first);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    bool infinite = false;
    for (std::size_t i = first; i < ks.size(); ++i) {
      const double x = ks[i];
      const double y = std::log(r.mk[i]);
      if (!std::isfinite(y)) infinite = true;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (infinite) {
      r.slope = kInf;
    } else {
      r.slope = denom > 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    }
    r.verdict = r.slope > kBmSlopeThreshold ? BmVerdict::GrowthDetected : BmVerdict::ConsistentWithBm;
    out.push_back(std::move(r));
  }
  return out;
}

MassDensityReport massDensityCheck(const DiscreteMeasure& nu, const PointSet& centers, double T,
                                   const std::vector<double>& radii) {
  if (!(T > 0.0)) throw InvalidArgument("mass density exponent T must be > 0");
  if (centers.rows() != nu.atoms().rows()) throw InvalidArgument("centers have the wrong dimension");
  MassDensityReport rep;
  rep.T = T;
  const Index m = nu.size();
  for (Index i = 0; i < m; ++i) {
    double nearest = kInf;
    for (Index j = 0; j < m; ++j) {
      if (j != i) nearest = std::min(nearest, (nu.atoms().col(i) - nu.atoms().col(j)).norm());
    }
    if (std::isfinite(nearest)) rep.spacing = std::max(rep.spacing, nearest);
  }
  Index conclusive = 0;
  Index passed = 0;
  for (Index c = 0; c < centers.cols(); ++c) {
    for (double r : radii) {
      MassDensityRow row;
      row.center = c;
      row.radius = r;
      row.bound = std::pow(r, T);
      for (Index j = 0; j < m; ++j) {
        if ((nu.atoms().col(j) - centers.col(c)).norm() <= r * (1.0 + 1e-12)) row.mass += nu.masses()(j);
      }
      if (r < rep.spacing) {
        row.status = DensityStatus::Inconclusive;
      } else {
        ++conclusive;
        row.status = row.mass >= row.bound ? DensityStatus::Pass : DensityStatus::Fail;
        if (row.status == DensityStatus::Pass) ++passed;
      }
      rep.rows.push_back(row);
    }
  }
  rep.passFraction = conclusive > 0 ? static_cast<double>(passed) / static_cast<double>(conclusive) : 0.0;
  if (conclusive == 0) {
    rep.verdict = DensityStatus::Inconclusive;
  } else {
    rep.verdict = passed == conclusive ? DensityStatus::Pass : DensityStatus::Fail;
  }
  return rep;
}

std::string toString(BmVerdict v) {
  return v == BmVerdict::ConsistentWithBm ? "consistent_with_BM" : "growth_detected";
}

std::string toString(DensityStatus s) {
  switch (s) {
    case DensityStatus::Pass:
      return "pass";
    case DensityStatus::Fail:
      return "fail";
    default:
      return "inconclusive";
  }
}

}  // namespace ldpot

#include "ldpot/fekete.hpp"

#include "ldpot/detail/arnoldi.hpp"
#include "ldpot/detail/exchange.hpp"
#include "ldpot/detail/linalg.hpp"
#include "ldpot/energy.hpp"

#include <cmath>

namespace ldpot {

namespace {

struct Problem {
  PointSet candidates;
  Eigen::VectorXd masses;
  Eigen::VectorXd q;
  detail::ArnoldiBasis basis;
};

Problem makeProblem(PointSet candidates, const Weight& Q, int k, bool realVariables = false) {
  Problem p;
  const Index m = candidates.cols();
  p.masses = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  p.q = Q.evaluate(candidates);
  p.candidates = std::move(candidates);
  p.basis = detail::buildArnoldi(p.candidates, p.masses, p.q, k, realVariables);
  return p;
}

void requireUnisolvent(const Problem& p, int k) {
  if (!p.basis.full()) {
    throw InvalidArgument("the candidate grid supports only " + std::to_string(p.basis.rank()) +
                          " independent weighted monomials of degree <= " + std::to_string(k) +
                          ", N_k = " + std::to_string(p.basis.monomials.size()) +
                          " (too few candidates)");
  }
}

PointSet pickColumns(const PointSet& pts, const std::vector<Index>& rows) {
  PointSet out(pts.rows(), static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out.col(static_cast<Index>(i)) = pts.col(rows[i]);
  return out;
}

FeketeReport makeReport(const Problem& p, const Weight& Q, int k,
                        const detail::ExchangeResult& ex) {
  FeketeReport r;
  r.k = k;
  const int n = static_cast<int>(p.candidates.rows());
  const auto nk = static_cast<double>(ex.rows.size());
  r.logVdmQ = detail::logVdmQFromRows(p.basis, p.masses, ex.rows, ex.logAbsDet);
  const double offset = r.logVdmQ - ex.logAbsDet;
  for (double v : ex.trace) r.objectiveTrace.push_back(v + offset);
  if (k == 0) {
    r.deltaQk = std::exp(r.logVdmQ);
    r.normalized = r.deltaQk;
  } else {
    r.deltaQk = std::exp(r.logVdmQ * (n + 1) / (static_cast<double>(n) * k * nk));
    r.normalized = std::exp(r.logVdmQ / (k * nk));
  }
  r.iterations = ex.swaps;
  r.sweeps = ex.sweeps;
  r.converged = ex.converged;
  r.lebesgue = ex.maxCoefficient;
  r.config = Configuration(pickColumns(p.candidates, ex.rows), k).withCache(r.logVdmQ, Q.id());
  return r;
}

detail::ExchangeResult bestExchange(const Eigen::MatrixXcd& a, const FeketeOptions& options) {
  const Index r = a.cols();
  std::vector<Index> leja = detail::greedyRows(a);
  if (static_cast<Index>(leja.size()) < r) throw InvalidArgument("too few candidates");
  detail::ExchangeResult best = detail::maxvolExchange(a, leja, options.maxSweeps);
  for (int s = 0; s < options.restarts; ++s) {
    std::mt19937_64 rng(detail::substreamSeed(options.seed, static_cast<std::uint64_t>(s)));
    std::vector<Index> start = detail::greedyRows(a, &rng, 0.5);
    if (static_cast<Index>(start.size()) < r) continue;
    detail::ExchangeResult trial = detail::maxvolExchange(a, start, options.maxSweeps);
    if (trial.logAbsDet > best.logAbsDet) best = std::move(trial);
  }
  return best;
}

}  // namespace

Configuration lejaSequence(const CompactSetSpec& spec, const Weight& Q, int k) {
  const Problem p = makeProblem(discretize(spec), Q, k);
  requireUnisolvent(p, k);
  const std::vector<Index> rows = detail::greedyRows(p.basis.weighted);
  if (static_cast<Index>(rows.size()) < p.basis.rank()) throw InvalidArgument("too few candidates");
  const double logDet = detail::logAbsDetRows(p.basis.weighted, rows);
  return Configuration(pickColumns(p.candidates, rows), k)
      .withCache(detail::logVdmQFromRows(p.basis, p.masses, rows, logDet), Q.id());
}

FeketeReport feketeExchange(const Configuration& start, const CompactSetSpec& spec,
                            const Weight& Q, Index maxSweeps) {
  PointSet candidates = discretize(spec);
  if (candidates.rows() != start.points().rows()) {
    throw InvalidArgument("start configuration and set live in different dimensions");
  }
  std::vector<Index> rows;
  for (Index j = 0; j < start.size(); ++j) {
    Index found = -1;
    for (Index c = 0; c < candidates.cols(); ++c) {
      if ((candidates.col(c).array() == start.points().col(j).array()).all()) {
        found = c;
        break;
      }
    }
    if (found < 0) {
      candidates.conservativeResize(Eigen::NoChange, candidates.cols() + 1);
      candidates.col(candidates.cols() - 1) = start.points().col(j);
      found = candidates.cols() - 1;
    }
    rows.push_back(found);
  }
  const Problem p = makeProblem(std::move(candidates), Q, start.k());
  requireUnisolvent(p, start.k());
  const detail::ExchangeResult ex = detail::maxvolExchange(p.basis.weighted, rows, maxSweeps);
  return makeReport(p, Q, start.k(), ex);
}

FeketeReport feketePoints(const CompactSetSpec& spec, const Weight& Q, int k,
                          const FeketeOptions& options) {
  if (k < 0) throw InvalidArgument("degree must be >= 0");
  const Problem p = makeProblem(discretize(spec), Q, k);
  requireUnisolvent(p, k);
  return makeReport(p, Q, k, bestExchange(p.basis.weighted, options));
}

Extrapolation extrapolateLimit(const std::vector<int>& ks, const std::vector<double>& values) {
  if (ks.size() != values.size() || ks.empty()) {
    throw InvalidArgument("extrapolation needs matching, nonempty sequences");
  }
  const std::size_t m = std::min<std::size_t>(3, ks.size());
  const std::size_t first = ks.size() - m;
  Eigen::MatrixXd logDesign(m, m);
  Eigen::MatrixXd richDesign(m, m);
  Eigen::VectorXd logRhs(m);
  Eigen::VectorXd richRhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double k = ks[first + i];
    const auto r = static_cast<Index>(i);
    const double logTerms[3] = {1.0, std::log(k + 1.0) / k, 1.0 / k};
    const double richTerms[3] = {1.0, 1.0 / k, 1.0 / (k * k)};
    for (std::size_t c = 0; c < m; ++c) {
      logDesign(r, static_cast<Index>(c)) = logTerms[c];
      richDesign(r, static_cast<Index>(c)) = richTerms[c];
    }
    logRhs(r) = std::log(values[first + i]);
    richRhs(r) = values[first + i];
  }
  Extrapolation e;
  e.logModel = std::exp(logDesign.fullPivLu().solve(logRhs)(0));
  e.richardson = richDesign.fullPivLu().solve(richRhs)(0);
  return e;
}

TransfiniteDiameter transfiniteDiameter(const CompactSetSpec& spec, const Weight& Q, int kMax,
                                        const FeketeOptions& options) {
  if (kMax < 2) throw InvalidArgument("transfinite diameter needs k_max >= 2");
  TransfiniteDiameter out;
  std::vector<int> ks;
  std::vector<double> values;
  for (int k = 1; k <= kMax; ++k) {
    FeketeOptions o = options;
    o.seed = detail::substreamSeed(options.seed, static_cast<std::uint64_t>(k));
    out.reports.push_back(feketePoints(spec, Q, k, o));
    ks.push_back(k);
    values.push_back(out.reports.back().normalized);
  }
  out.limit = extrapolateLimit(ks, values);
  out.monotone = true;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] * (1.0 + 1e-12)) out.monotone = false;
  }
  return out;
}

FeketeConvergence feketeEmpiricalConvergence(const CompactSetSpec& spec, const Weight& Q,
                                             const std::vector<int>& ks,
                                             std::optional<DiscreteMeasure> reference,
                                             const FeketeOptions& options, int degree) {
  if (!reference) {
    if (spec.dimension() != 1) {
      throw InvalidArgument("a reference measure is required for n >= 2");
    }
    reference = equilibriumMeasure(spec, Q).muEq;
  }
  FeketeConvergence out;
  for (int k : ks) {
    FeketeOptions o = options;
    o.seed = detail::substreamSeed(options.seed, static_cast<std::uint64_t>(k));
    const FeketeReport r = feketePoints(spec, Q, k, o);
    out.rows.push_back({k, weakStarDistance(empiricalMeasure(r.config.points()), *reference, degree)});
  }
  out.decreasing = out.rows.size() >= 2 && out.rows.back().distance < out.rows.front().distance;
  return out;
}

namespace detail {

GridFekete gridFekete(const PointSet& candidates, const Eigen::VectorXd& qValues, int k,
                      bool realVariables, const FeketeOptions& options) {
  const Index m = candidates.cols();
  const Eigen::VectorXd masses = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  const ArnoldiBasis basis = buildArnoldi(candidates, masses, qValues, k, realVariables);
  const ExchangeResult ex = bestExchange(basis.weighted, options);
  GridFekete out;
  out.rows = ex.rows;
  out.logAbsDet = ex.logAbsDet;
  out.lebesgue = ex.maxCoefficient;
  out.rank = basis.rank();
  return out;
}

}  // namespace detail

}  // namespace ldpot

#include "ldpot/ldp.hpp"

#include "ldpot/detail/arnoldi.hpp"
#include "ldpot/detail/exchange.hpp"
#include "ldpot/detail/linalg.hpp"
#include "ldpot/ensembles.hpp"
#include "ldpot/fekete.hpp"
#include "ldpot/polynomials.hpp"

#include <cmath>
#include <thread>

namespace ldpot {

using detail::kInf;

double subsetCount(Index m, Index n) {
  if (n < 0 || n > m) return 0.0;
  return std::exp(std::lgamma(m + 1.0) - std::lgamma(n + 1.0) - std::lgamma(m - n + 1.0));
}

std::string toString(JMode mode) {
  switch (mode) {
    case JMode::Auto:
      return "auto";
    case JMode::Enumerate:
      return "enumerate";
    case JMode::DirectMc:
      return "direct_mc";
    case JMode::Dpp:
      return "dpp";
    case JMode::Tilted:
      return "tilted";
  }
  return "unknown";
}

namespace {

// Calls f(rows) for every increasing n-subset of {0..m-1} starting with `first`.
template <typename F>
void forEachSubsetFrom(Index m, Index n, Index first, F&& f) {
  std::vector<Index> rows(static_cast<std::size_t>(n));
  rows[0] = first;
  if (n == 1) {
    f(rows);
    return;
  }
  if (m - first < n) return;
  for (Index i = 1; i < n; ++i) rows[static_cast<std::size_t>(i)] = first + i;
  while (true) {
    f(rows);
    Index i = n - 1;
    while (i >= 1 && rows[static_cast<std::size_t>(i)] == m - n + i) --i;
    if (i < 1) return;
    ++rows[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < n; ++j) rows[static_cast<std::size_t>(j)] = rows[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Runs work(first) for every first element, spread over `tasks` threads
// (first elements assigned round-robin). Results are kept per first element
// so the reduction order does not depend on the task count.
template <typename Work>
void parallelFirsts(Index m, int tasks, Work work) {
  if (tasks <= 1) {
    for (Index first = 0; first < m; ++first) work(first);
    return;
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < tasks; ++t) {
    threads.emplace_back([&, t]() {
      for (Index first = t; first < m; first += tasks) work(first);
    });
  }
  for (auto& th : threads) th.join();
}

Eigen::VectorXd subsetMoments(const Eigen::MatrixXd& features, const std::vector<Index>& rows) {
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(features.rows());
  for (Index r : rows) mom += features.col(r);
  return mom / static_cast<double>(rows.size());
}

// Max over the open box of N * sum_r tilt_r * moment_r.
double maxTiltSum(const NeighborhoodSpec& G, const Eigen::VectorXd& tilt, Index n) {
  if (tilt.size() == 0) return 0.0;
  double s = 0.0;
  for (Index r = 0; r < tilt.size(); ++r) {
    const double c = G.centerMoments()(r);
    s += std::max(tilt(r) * (c - G.epsilon()), tilt(r) * (c + G.epsilon()));
  }
  return static_cast<double>(n) * s;
}

struct WeightedMean {
  double logMean = -kInf;
  double relStderr = 0.0;
};

// log of the mean of exp(logValues) over `total` draws (non-hits count as 0).
WeightedMean logMeanOf(const std::vector<double>& logValues, Index total) {
  WeightedMean out;
  if (logValues.empty()) return out;
  const double top = *std::max_element(logValues.begin(), logValues.end());
  double s1 = 0.0;
  double s2 = 0.0;
  for (double v : logValues) {
    const double e = std::exp(v - top);
    s1 += e;
    s2 += e * e;
  }
  const double n = static_cast<double>(total);
  const double mean = s1 / n;
  const double var = std::max(0.0, s2 / n - mean * mean);
  out.logMean = top + std::log(mean);
  out.relStderr = std::sqrt(var / n) / mean;
  return out;
}

}  // namespace

JEstimate jFunctionalK(const NeighborhoodSpec& G, const DiscreteMeasure& nu, const Weight& Q,
                       int k, const JOptions& options) {
  if (G.center().dimension() != nu.dimension()) {
    throw InvalidArgument("neighborhood and nu live in different dimensions");
  }
  const Eigen::VectorXd q = Q.evaluate(nu.atoms());
  const detail::ArnoldiBasis basis = detail::buildArnoldi(nu.atoms(), nu.masses(), q, k);
  const Index nk = basis.monomials.size();
  const Index m = nu.size();
  const double speed = 2.0 * k * static_cast<double>(nk);
  const Eigen::MatrixXd features = momentFeatures(nu.atoms(), G.indices());

  JEstimate est;
  est.k = k;
  est.Nk = nk;
  est.mode = options.mode;
  if (est.mode == JMode::Auto) {
    est.mode = subsetCount(m, nk) <= kEnumerationLimit ? JMode::Enumerate : JMode::Tilted;
  }
  const double logDet = basis.logDetGram();
  est.logZ = std::isfinite(logDet) ? detail::logFactorial(static_cast<double>(nk)) + logDet : -kInf;
  auto finish = [&](double logSigma) {
    est.logSigma = logSigma;
    est.logIntegral = est.logZ + logSigma;
    est.logJ = est.logIntegral / speed;
    est.zeroFlag = !std::isfinite(logSigma);
  };
  if (!std::isfinite(est.logZ)) {
    // |VDM^Q| vanishes nu^N-almost everywhere.
    est.logSigma = std::numeric_limits<double>::quiet_NaN();
    est.logIntegral = -kInf;
    est.logJ = -kInf;
    est.zeroFlag = true;
    return est;
  }

  if (est.mode == JMode::Enumerate) {
    if (subsetCount(m, nk) > kEnumerationLimit) {
      throw InvalidArgument("support too large for enumeration");
    }
    std::vector<double> partial(static_cast<std::size_t>(m), 0.0);
    std::vector<Index> hits(static_cast<std::size_t>(m), 0);
    std::vector<Index> seen(static_cast<std::size_t>(m), 0);
    parallelFirsts(m, options.tasks, [&](Index first) {
      double acc = 0.0;
      Index h = 0;
      Index s = 0;
      forEachSubsetFrom(m, nk, first, [&](const std::vector<Index>& rows) {
        ++s;
        if (!G.containsMoments(subsetMoments(features, rows))) return;
        const double ld = detail::logAbsDetRows(basis.weighted, rows);
        if (std::isfinite(ld)) {
          acc += std::exp(2.0 * ld);
          ++h;
        }
      });
      partial[static_cast<std::size_t>(first)] = acc;
      hits[static_cast<std::size_t>(first)] = h;
      seen[static_cast<std::size_t>(first)] = s;
    });
    double sigma = 0.0;
    for (Index i = 0; i < m; ++i) {
      sigma += partial[static_cast<std::size_t>(i)];
      est.hits += hits[static_cast<std::size_t>(i)];
      est.samples += seen[static_cast<std::size_t>(i)];
    }
    finish(sigma > 0.0 ? std::log(sigma) : -kInf);
    return est;
  }

  if (options.samples < 1) throw InvalidArgument("samples must be >= 1");
  est.samples = options.samples;
  std::vector<double> logValues;

  if (est.mode == JMode::DirectMc) {
    // I_k(G) = E_{nu^N}[|VDM^Q|^2 1_G].
    std::vector<double> cumulative(static_cast<std::size_t>(m));
    double run = 0.0;
    for (Index i = 0; i < m; ++i) {
      run += nu.masses()(i);
      cumulative[static_cast<std::size_t>(i)] = run;
    }
    std::mt19937_64 rng(options.seed);
    std::vector<Index> rows(static_cast<std::size_t>(nk));
    for (Index s = 0; s < options.samples; ++s) {
      for (auto& r : rows) {
        const double u = detail::uniform01(rng) * run;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        r = std::min<Index>(static_cast<Index>(it - cumulative.begin()), m - 1);
      }
      std::vector<Index> sorted = rows;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
      if (!G.containsMoments(subsetMoments(features, rows))) continue;
      const double ld = detail::logAbsDetRows(basis.weighted, rows);
      if (!std::isfinite(ld)) continue;
      logValues.push_back(2.0 * detail::logVdmQFromRows(basis, nu.masses(), rows, ld));
    }
    est.hits = static_cast<Index>(logValues.size());
    const WeightedMean wm = logMeanOf(logValues, options.samples);
    est.relStderr = wm.relStderr;
    finish(wm.logMean - est.logZ);
    if (est.zeroFlag) {
      // No hit: I_k(G) <= (3/n) sup_G |VDM^Q|^2, bounded by the Fekete value.
      const detail::ExchangeResult ex = detail::maxvolExchange(
          basis.weighted, detail::greedyRows(basis.weighted), 200);
      const double supLog = 2.0 * detail::logVdmQFromRows(basis, nu.masses(), ex.rows, ex.logAbsDet);
      est.logSigmaUpper = std::log(3.0 / static_cast<double>(options.samples)) + supLog - est.logZ;
    }
    return est;
  }

  // Exact Prob_k draws for the weight Q + t:
  // I_k(G) = Z_{Q+t} E_{Q+t}[exp(2k sum_j t(x_j)) 1_G].
  Eigen::VectorXd t = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd tiltCoeffs;
  if (est.mode == JMode::Tilted && options.tilt.size() > 0) {
    if (options.tilt.size() != features.rows()) throw InvalidArgument("tilt length mismatch");
    tiltCoeffs = options.tilt;
    t = features.transpose() * tiltCoeffs;
  }
  const Eigen::VectorXd qt = q + t;
  const double logZt = partitionFunction(nu, qt, k).logZ;
  const EnsembleSample sample =
      sampleDpp(nu, qt, Q.id() + "+tilt", k, options.samples, options.seed, options.tasks);
  for (const auto& rows : sample.atomIndices) {
    if (!G.containsMoments(subsetMoments(features, rows))) continue;
    double st = 0.0;
    for (Index r : rows) st += t(r);
    logValues.push_back(2.0 * k * st);
  }
  est.hits = static_cast<Index>(logValues.size());
  const WeightedMean wm = logMeanOf(logValues, options.samples);
  est.relStderr = wm.relStderr;
  finish(logZt - est.logZ + wm.logMean);
  if (est.zeroFlag) {
    est.logSigmaUpper = std::log(3.0 / static_cast<double>(options.samples)) + logZt - est.logZ +
                        2.0 * k * maxTiltSum(G, tiltCoeffs, nk);
  }
  return est;
}

namespace {

struct SearchState {
  std::vector<Index> rows;
  double logDet = -kInf;
  Eigen::VectorXd moments;
  double violation = kInf;
};

// Steepest single-swap ascent on log|det| - penalty * violation.
SearchState penalizedExchange(const Eigen::MatrixXcd& a, const Eigen::MatrixXd& features,
                              const NeighborhoodSpec& G, std::vector<Index> start,
                              double penalty, Index maxIterations) {
  const Index m = a.rows();
  const Index n = a.cols();
  SearchState s;
  s.rows = std::move(start);
  s.logDet = detail::logAbsDetRows(a, s.rows);
  s.moments = subsetMoments(features, s.rows);
  s.violation = G.violation(s.moments);
  std::vector<char> inSet(static_cast<std::size_t>(m), 0);
  for (Index r : s.rows) inSet[static_cast<std::size_t>(r)] = 1;
  for (Index it = 0; it < maxIterations; ++it) {
    const Eigen::MatrixXcd b = detail::lagrangeCoefficients(a, s.rows);
    const double current = s.logDet - penalty * s.violation;
    double bestGain = 1e-12 * std::max(1.0, std::abs(current));
    Index bestC = -1;
    Index bestJ = -1;
    for (Index j = 0; j < n; ++j) {
      const Eigen::VectorXd out = features.col(s.rows[static_cast<std::size_t>(j)]);
      for (Index c = 0; c < m; ++c) {
        if (inSet[static_cast<std::size_t>(c)]) continue;
        const double mag = std::abs(b(c, j));
        if (!(mag > 0.0)) continue;
        const Eigen::VectorXd mom = s.moments + (features.col(c) - out) / static_cast<double>(n);
        const double value = s.logDet + std::log(mag) - penalty * G.violation(mom);
        if (value - current > bestGain) {
          bestGain = value - current;
          bestC = c;
          bestJ = j;
        }
      }
    }
    if (bestC < 0) break;
    auto& slot = s.rows[static_cast<std::size_t>(bestJ)];
    s.moments += (features.col(bestC) - features.col(slot)) / static_cast<double>(n);
    inSet[static_cast<std::size_t>(slot)] = 0;
    inSet[static_cast<std::size_t>(bestC)] = 1;
    slot = bestC;
    s.logDet = detail::logAbsDetRows(a, s.rows);
    s.violation = G.violation(s.moments);
  }
  return s;
}

}  // namespace

WEstimate wFunctionalK(const NeighborhoodSpec& G, const CompactSetSpec& spec, const Weight& Q,
                       int k, const WOptions& options) {
  if (options.restarts < 1) throw InvalidArgument("restarts must be >= 1");
  const PointSet grid = discretize(spec);
  const Index m = grid.cols();
  const Eigen::VectorXd masses = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  const detail::ArnoldiBasis basis = detail::buildArnoldi(grid, masses, Q.evaluate(grid), k);
  if (!basis.full()) throw InvalidArgument("too few candidates for degree " + std::to_string(k));
  const Index nk = basis.rank();
  const Eigen::MatrixXd features = momentFeatures(grid, G.indices());

  WEstimate w;
  w.k = k;
  w.Nk = nk;
  w.bestViolation = kInf;
  std::vector<Index> bestRows;
  auto consider = [&](const std::vector<Index>& rows, double logDet, const Eigen::VectorXd& mom) {
    const double viol = G.violation(mom);
    w.bestViolation = std::min(w.bestViolation, viol);
    if (!std::isfinite(logDet) || !G.containsMoments(mom)) return;
    const double value = detail::logVdmQFromRows(basis, masses, rows, logDet);
    if (value > w.logVdmQ) {
      w.logVdmQ = value;
      bestRows = rows;
    }
  };

  if (options.allowEnumeration && subsetCount(m, nk) <= kEnumerationLimit) {
    w.exact = true;
    for (Index first = 0; first < m; ++first) {
      forEachSubsetFrom(m, nk, first, [&](const std::vector<Index>& rows) {
        const Eigen::VectorXd mom = subsetMoments(features, rows);
        if (!G.containsMoments(mom)) {
          w.bestViolation = std::min(w.bestViolation, G.violation(mom));
          return;
        }
        consider(rows, detail::logAbsDetRows(basis.weighted, rows), mom);
      });
    }
  } else {
    const Index maxIterations = options.maxSweeps * nk;
    std::vector<std::vector<Index>> starts;
    starts.push_back(detail::maxvolExchange(basis.weighted, detail::greedyRows(basis.weighted),
                                            options.maxSweeps)
                         .rows);
    for (int r = 1; r < options.restarts; ++r) {
      std::mt19937_64 rng(detail::substreamSeed(options.seed, static_cast<std::uint64_t>(r)));
      starts.push_back(detail::greedyRows(basis.weighted, &rng, 0.5));
    }
    for (auto& start : starts) {
      if (static_cast<Index>(start.size()) < nk) continue;
      const SearchState s =
          penalizedExchange(basis.weighted, features, G, start, options.penalty, maxIterations);
      consider(s.rows, s.logDet, s.moments);
    }
  }
  if (!bestRows.empty()) {
    w.zeroFlag = false;
    w.W = std::exp(w.logVdmQ / (k * static_cast<double>(nk)));
    PointSet pts(grid.rows(), nk);
    for (Index i = 0; i < nk; ++i) pts.col(i) = grid.col(bestRows[static_cast<std::size_t>(i)]);
    w.config = Configuration(std::move(pts), k).withCache(w.logVdmQ, Q.id());
  }
  return w;
}

double feasibilityFloor(const NeighborhoodSpec& G, const PointSet& candidates, Index n,
                        std::uint64_t seed) {
  const Index m = candidates.cols();
  if (n < 1 || n > m) throw InvalidArgument("need 1 <= N <= number of candidates");
  const Eigen::MatrixXd features = momentFeatures(candidates, G.indices());
  const Eigen::VectorXd& c = G.centerMoments();
  auto deviation = [&](const Eigen::VectorXd& mom) { return (mom - c).cwiseAbs().maxCoeff(); };
  double best = kInf;
  std::mt19937_64 rng(seed);
  for (int restart = 0; restart < 4; ++restart) {
    std::vector<Index> rows;
    if (restart == 0) {
      for (Index i = 0; i < n; ++i) rows.push_back(std::min<Index>(m - 1, (2 * i + 1) * m / (2 * n)));
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      for (Index i = 0; static_cast<Index>(rows.size()) < n; ++i) {
        if (std::find(rows.begin(), rows.end(), i) == rows.end()) rows.push_back(i);
      }
    } else {
      std::vector<Index> all(static_cast<std::size_t>(m));
      for (Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
      for (Index i = 0; i < n; ++i) {
        const auto j = i + static_cast<Index>(detail::uniformIndex(rng, static_cast<std::uint64_t>(m - i)));
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
      }
      rows.assign(all.begin(), all.begin() + n);
    }
    std::vector<char> inSet(static_cast<std::size_t>(m), 0);
    for (Index r : rows) inSet[static_cast<std::size_t>(r)] = 1;
    Eigen::VectorXd mom = subsetMoments(features, rows);
    double current = deviation(mom);
    for (Index it = 0; it < 100 * n; ++it) {
      double bestValue = current;
      Index bestC = -1;
      Index bestJ = -1;
      for (Index j = 0; j < n; ++j) {
        for (Index cand = 0; cand < m; ++cand) {
          if (inSet[static_cast<std::size_t>(cand)]) continue;
          const double v = deviation(
              mom + (features.col(cand) - features.col(rows[static_cast<std::size_t>(j)])) /
                        static_cast<double>(n));
          if (v < bestValue - 1e-15) {
            bestValue = v;
            bestC = cand;
            bestJ = j;
          }
        }
      }
      if (bestC < 0) break;
      auto& slot = rows[static_cast<std::size_t>(bestJ)];
      mom += (features.col(bestC) - features.col(slot)) / static_cast<double>(n);
      inSet[static_cast<std::size_t>(slot)] = 0;
      inSet[static_cast<std::size_t>(bestC)] = 1;
      slot = bestC;
      current = deviation(mom);
    }
    best = std::min(best, current);
  }
  return best;
}

DominatingPoint dominatingPoint(const NeighborhoodSpec& G, const CompactSetSpec& spec,
                                const Weight& Q, const EquilibriumResult& eq) {
  const PointSet grid = discretize(spec);
  MomentBox box;
  box.features = momentFeatures(grid, G.indices());
  box.lo = G.centerMoments().array() - G.epsilon();
  box.hi = G.centerMoments().array() + G.epsilon();
  EquilibriumOptions opts;
  opts.polishIterations = 400;
  const EquilibriumResult r = equilibriumOnGrid(grid, cellSizes(spec), Q.evaluate(grid), opts, &box);
  DominatingPoint d;
  d.mu = r.muEq;
  d.rate = std::max(0.0, 0.5 * (r.IQmin - eq.IQmin));
  d.tilt = r.multipliers;
  d.kktResidual = r.kktResidual;
  return d;
}

int RateEstimate::largestFeasible() const {
  for (int i = static_cast<int>(rows.size()) - 1; i >= 0; --i) {
    const RateRow& r = rows[static_cast<std::size_t>(i)];
    if (r.feasible && !r.zeroFlag && !r.zeroFlagHalf) return i;
  }
  return -1;
}

RateEstimate rateEstimate(const DiscreteMeasure& target, const CompactSetSpec& spec,
                          const DiscreteMeasure& nu, const Weight& Q, const std::vector<int>& ks,
                          double epsilon, int momentDegree, const RateOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be > 0");
  if (spec.dimension() != 1) throw InvalidArgument("rate estimates are implemented for n = 1");
  RateEstimate out;
  out.epsilon = epsilon;
  out.momentDegree = momentDegree;
  const EquilibriumResult eq = equilibriumMeasure(spec, Q);
  out.prediction = std::max(0.0, rateFunction(target, eq, Q));
  const NeighborhoodSpec G(target, momentDegree, epsilon);
  const NeighborhoodSpec half = G.withEpsilon(0.5 * epsilon);
  const DominatingPoint dp = dominatingPoint(G, spec, Q, eq);
  const DominatingPoint dpHalf = dominatingPoint(half, spec, Q, eq);
  out.infPrediction = dp.rate;
  out.infPredictionHalf = dpHalf.rate;

  for (int k : ks) {
    RateRow row;
    row.k = k;
    JOptions jo;
    jo.mode = options.mode;
    jo.samples = options.samples;
    jo.tasks = options.tasks;
    jo.seed = detail::substreamSeed(options.seed, static_cast<std::uint64_t>(2 * k));
    jo.tilt = dp.tilt;
    const JEstimate full = jFunctionalK(G, nu, Q, k, jo);
    jo.seed = detail::substreamSeed(options.seed, static_cast<std::uint64_t>(2 * k + 1));
    jo.tilt = dpHalf.tilt;
    const JEstimate h = jFunctionalK(half, nu, Q, k, jo);
    row.Nk = full.Nk;
    row.mode = full.mode;
    const double speed = 2.0 * k * static_cast<double>(full.Nk);
    auto fill = [&](const JEstimate& e, double& value, double& err, bool& flag) {
      flag = e.zeroFlag;
      value = -(e.zeroFlag ? e.logSigmaUpper : e.logSigma) / speed;
      err = e.relStderr / speed;
    };
    fill(full, row.estimate, row.stderr, row.zeroFlag);
    fill(h, row.estimateHalf, row.stderrHalf, row.zeroFlagHalf);
    row.floor = feasibilityFloor(G, nu.atoms(), full.Nk, options.seed);
    row.feasible = row.floor < 0.5 * epsilon;
    out.rows.push_back(row);
  }
  return out;
}

bool LdpReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ReportCheck& c) { return c.pass; });
}

LdpReport ldpReport(const CompactSetSpec& spec, const DiscreteMeasure& nu, const Weight& Q,
                    const LdpReportConfig& config) {
  LdpReport rep;
  rep.configHash = config.configHash;
  if (config.ks.empty()) return rep;
  const int kTop = config.ks.back();
  const bool univariate = spec.dimension() == 1;

  std::optional<EquilibriumResult> eq;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  if (univariate) {
    eq = equilibriumMeasure(spec, Q);
    predicted = std::exp(-0.5 * eq->IQmin);
    rep.checks.push_back({"equilibrium_kkt", 0, eq->kktResidual, 0.0, 1e-6, eq->kktResidual < 1e-6});
    if (config.referenceCdf) {
      const double d = cdfSupDistance(eq->muEq, *config.referenceCdf);
      rep.checks.push_back({"equilibrium_reference_cdf", 0, d, 0.0, 0.01, d < 0.01});
    }
  }
  if (kTop >= 2 && univariate) {
    FeketeOptions fo;
    fo.seed = config.seed;
    const TransfiniteDiameter td = transfiniteDiameter(spec, Q, kTop, fo);
    const double gap = std::abs(td.limit.logModel - predicted) / predicted;
    rep.checks.push_back({"transfinite_diameter", kTop, td.limit.logModel, predicted, 0.02, gap < 0.02});
  }
  {
    // Z_k^(1/(2kN)) carries an O(log k / k) factorial bias, so the check is
    // made on the extrapolated limit when three or more k are given.
    std::vector<int> zk;
    std::vector<double> zv;
    bool finite = true;
    for (int k : config.ks) {
      if (k < 1) continue;
      const PartitionFunction z = partitionFunction(nu, Q, k);
      finite = finite && std::isfinite(z.logZ);
      zk.push_back(k);
      zv.push_back(z.normalized);
    }
    double value = zv.empty() ? std::numeric_limits<double>::quiet_NaN() : zv.back();
    double tol = 0.1;
    if (finite && zv.size() >= 3) {
      value = extrapolateLimit(zk, zv).logModel;
      tol = 0.02;
    }
    const bool ok = finite && !zv.empty() &&
                    (!univariate || std::abs(value - predicted) / predicted < tol);
    rep.checks.push_back({"partition_function", kTop, value, predicted, tol, ok});
  }
  if (univariate) {
    const int kTail = std::min(kTop, 8);
    const EnsembleSample s = sampleDpp(nu, Q, kTail, config.samples,
                                       detail::substreamSeed(config.seed, 101), config.tasks);
    if (config.eta < predicted) {
      const TailBoundReport t = tailBoundCheck(s, config.eta, predicted);
      rep.checks.push_back({"tail_bound", kTail, t.empirical, t.bound, 2.0 * t.stderr, t.pass});
    }
    RateOptions ro;
    ro.samples = config.samples;
    ro.seed = detail::substreamSeed(config.seed, 202);
    ro.tasks = config.tasks;
    const RateEstimate r =
        rateEstimate(eq->muEq, spec, nu, Q, config.ks, config.epsilon, config.momentDegree, ro);
    const int i = r.largestFeasible();
    if (i < 0) {
      rep.checks.push_back({"rate_at_equilibrium", kTop, std::numeric_limits<double>::quiet_NaN(),
                            0.0, 0.02, false});
    } else {
      const RateRow& row = r.rows[static_cast<std::size_t>(i)];
      rep.checks.push_back({"rate_at_equilibrium", row.k, row.estimate, 0.0, 0.02,
                            std::abs(row.estimate) < 0.02});
    }
  }
  return rep;
}

}  // namespace ldpot

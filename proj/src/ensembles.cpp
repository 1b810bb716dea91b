#include "ldpot/ensembles.hpp"

#include "ldpot/detail/arnoldi.hpp"
#include "ldpot/detail/exchange.hpp"
#include "ldpot/detail/linalg.hpp"

#include <cmath>
#include <optional>
#include <thread>

namespace ldpot {

using detail::kInf;

PartitionFunction partitionFunction(const DiscreteMeasure& nu, const Eigen::VectorXd& qValues,
                                    int k) {
  const detail::ArnoldiBasis b = detail::buildArnoldi(nu.atoms(), nu.masses(), qValues, k);
  PartitionFunction z;
  z.k = k;
  z.Nk = b.monomials.size();
  const double logDet = b.logDetGram();
  z.logZ = std::isfinite(logDet) ? detail::logFactorial(static_cast<double>(z.Nk)) + logDet : -kInf;
  z.normalized = k == 0 ? std::exp(z.logZ) : std::exp(z.logZ / (2.0 * k * static_cast<double>(z.Nk)));
  return z;
}

PartitionFunction partitionFunction(const DiscreteMeasure& nu, const Weight& Q, int k) {
  return partitionFunction(nu, Q.evaluate(nu.atoms()), k);
}

namespace {

struct Kernel {
  detail::ArnoldiBasis basis;
  Eigen::VectorXd masses;
};

Kernel fullRankKernel(const DiscreteMeasure& nu, const Eigen::VectorXd& qValues, int k) {
  Kernel kern{detail::buildArnoldi(nu.atoms(), nu.masses(), qValues, k), nu.masses()};
  if (!kern.basis.full()) {
    throw InvalidArgument("the kernel has rank " + std::to_string(kern.basis.rank()) +
                          " < N_k = " + std::to_string(kern.basis.monomials.size()) +
                          " on the support of nu");
  }
  return kern;
}

Configuration makeConfig(const Kernel& kern, const DiscreteMeasure& nu, const std::vector<Index>& rows,
                         int k, const std::string& weightId) {
  PointSet pts(nu.atoms().rows(), static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) pts.col(static_cast<Index>(i)) = nu.atoms().col(rows[i]);
  const double logDet = detail::logAbsDetRows(kern.basis.weighted, rows);
  return Configuration(std::move(pts), k)
      .withCache(detail::logVdmQFromRows(kern.basis, kern.masses, rows, logDet), weightId);
}

// One exact draw: repeatedly pick a row with probability proportional to its
// squared norm, then restrict the basis to functions vanishing there.
std::vector<Index> drawProjectionDpp(const Eigen::MatrixXcd& phi, std::mt19937_64& rng) {
  Eigen::MatrixXcd v = phi;
  const Index m = v.rows();
  std::vector<Index> picked;
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  while (v.cols() > 0) {
    Eigen::VectorXd w = v.rowwise().squaredNorm();
    for (Index i : picked) w(i) = 0.0;
    const double total = w.sum();
    double target = detail::uniform01(rng) * total;
    Index choice = m - 1;
    for (Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)] || w(i) <= 0.0) continue;
      target -= w(i);
      choice = i;
      if (target < 0.0) break;
    }
    picked.push_back(choice);
    used[static_cast<std::size_t>(choice)] = 1;
    if (v.cols() == 1) break;

    // Householder reflector H with H x = alpha e_1, x = conj(row); the other
    // columns of V H span the functions vanishing at the chosen atom.
    Eigen::VectorXcd x = v.row(choice).adjoint();
    const double norm = x.norm();
    const Complex phase = std::abs(x(0)) > 0.0 ? x(0) / std::abs(x(0)) : Complex(1.0);
    Eigen::VectorXcd u = x;
    u(0) += phase * norm;
    const double uu = u.squaredNorm();
    Eigen::MatrixXcd vh = v - (2.0 / uu) * (v * u) * u.adjoint();
    v = vh.rightCols(v.cols() - 1);
  }
  return picked;
}

template <typename Work>
void runTasks(int tasks, Index count, Work work) {
  if (tasks < 1) throw InvalidArgument("tasks must be >= 1");
  std::vector<std::thread> threads;
  const Index base = count / tasks;
  const Index extra = count % tasks;
  Index offset = 0;
  for (int t = 0; t < tasks; ++t) {
    const Index n = base + (t < extra ? 1 : 0);
    threads.emplace_back(work, t, offset, n);
    offset += n;
  }
  for (auto& th : threads) th.join();
}

}  // namespace

EnsembleSample sampleDpp(const DiscreteMeasure& nu, const Eigen::VectorXd& qValues,
                         const std::string& weightId, int k, Index count, std::uint64_t seed,
                         int tasks) {
  const Kernel kern = fullRankKernel(nu, qValues, k);
  EnsembleSample out;
  out.k = k;
  out.sampler = Sampler::DppExact;
  out.seed = seed;
  out.tasks = tasks;
  out.nuId = nu.id();
  out.weightId = weightId;
  out.atomIndices.assign(static_cast<std::size_t>(count), {});
  std::vector<std::optional<Configuration>> configs(static_cast<std::size_t>(count));
  runTasks(tasks, count, [&](int task, Index offset, Index n) {
    std::mt19937_64 rng(detail::substreamSeed(seed, static_cast<std::uint64_t>(task)));
    for (Index i = 0; i < n; ++i) {
      std::vector<Index> rows = drawProjectionDpp(kern.basis.weighted, rng);
      const auto slot = static_cast<std::size_t>(offset + i);
      configs[slot] = makeConfig(kern, nu, rows, k, weightId);
      out.atomIndices[slot] = std::move(rows);
    }
  });
  for (auto& c : configs) out.configs.push_back(std::move(*c));
  return out;
}

EnsembleSample sampleDpp(const DiscreteMeasure& nu, const Weight& Q, int k, Index count,
                         std::uint64_t seed, int tasks) {
  return sampleDpp(nu, Q.evaluate(nu.atoms()), Q.id(), k, count, seed, tasks);
}

EnsembleSample sampleMcmc(const DiscreteMeasure& nu, const Weight& Q, int k, Index count,
                          Index burnIn, Index thin, std::uint64_t seed, int tasks) {
  if (thin < 1) throw InvalidArgument("thin must be >= 1");
  if (burnIn < 0) throw InvalidArgument("burn_in must be >= 0");
  const Kernel kern = fullRankKernel(nu, Q.evaluate(nu.atoms()), k);
  const Eigen::MatrixXcd& a = kern.basis.weighted;
  const Index m = a.rows();
  const Index nk = a.cols();
  const std::vector<Index> start = detail::greedyRows(a);
  if (static_cast<Index>(start.size()) < nk ||
      !std::isfinite(detail::logAbsDetRows(a, start))) {
    throw InvalidArgument("no configuration of positive probability to start from");
  }

  EnsembleSample out;
  out.k = k;
  out.sampler = Sampler::Mcmc;
  out.seed = seed;
  out.tasks = tasks;
  out.nuId = nu.id();
  out.weightId = Q.id();
  out.atomIndices.assign(static_cast<std::size_t>(count), {});
  std::vector<std::optional<Configuration>> configs(static_cast<std::size_t>(count));
  std::vector<Index> proposedPerTask(static_cast<std::size_t>(tasks), 0);
  std::vector<Index> acceptedPerTask(static_cast<std::size_t>(tasks), 0);
  const std::string weightId = Q.id();

  runTasks(tasks, count, [&](int task, Index offset, Index n) {
    std::mt19937_64 rng(detail::substreamSeed(seed, static_cast<std::uint64_t>(task)));
    std::vector<Index> rows = start;
    std::vector<char> inSet(static_cast<std::size_t>(m), 0);
    for (Index r : rows) inSet[static_cast<std::size_t>(r)] = 1;
    auto refactor = [&]() {
      Eigen::MatrixXcd sub(nk, nk);
      for (Index i = 0; i < nk; ++i) sub.row(i) = a.row(rows[static_cast<std::size_t>(i)]);
      return Eigen::MatrixXcd(sub.partialPivLu().inverse());
    };
    Eigen::MatrixXcd inv = refactor();
    Index proposed = 0;
    Index accepted = 0;
    Index sinceRefactor = 0;
    auto step = [&]() {
      ++proposed;
      const auto j = static_cast<Index>(detail::uniformIndex(rng, static_cast<std::uint64_t>(nk)));
      const auto c = static_cast<Index>(detail::uniformIndex(rng, static_cast<std::uint64_t>(m)));
      const double u = detail::uniform01(rng);
      if (c == rows[static_cast<std::size_t>(j)]) {
        ++accepted;
        return;
      }
      if (inSet[static_cast<std::size_t>(c)]) return;
      const Eigen::RowVectorXcd bc = a.row(c) * inv;
      const Complex pivot = bc(j);
      const double ratio = std::norm(pivot);
      if (!(u < ratio)) return;
      ++accepted;
      Eigen::RowVectorXcd delta = bc;
      delta(j) -= 1.0;
      const Eigen::VectorXcd colJ = inv.col(j);
      inv.noalias() -= colJ * (delta / pivot);
      inSet[static_cast<std::size_t>(rows[static_cast<std::size_t>(j)])] = 0;
      inSet[static_cast<std::size_t>(c)] = 1;
      rows[static_cast<std::size_t>(j)] = c;
      if (++sinceRefactor >= 256) {
        inv = refactor();
        sinceRefactor = 0;
      }
    };
    for (Index s = 0; s < burnIn; ++s) step();
    for (Index i = 0; i < n; ++i) {
      for (Index s = 0; s < thin; ++s) step();
      const auto slot = static_cast<std::size_t>(offset + i);
      configs[slot] = makeConfig(kern, nu, rows, k, weightId);
      out.atomIndices[slot] = rows;
    }
    proposedPerTask[static_cast<std::size_t>(task)] = proposed;
    acceptedPerTask[static_cast<std::size_t>(task)] = accepted;
  });
  for (auto& c : configs) out.configs.push_back(std::move(*c));
  Index proposed = 0;
  Index accepted = 0;
  for (int t = 0; t < tasks; ++t) {
    proposed += proposedPerTask[static_cast<std::size_t>(t)];
    accepted += acceptedPerTask[static_cast<std::size_t>(t)];
  }
  out.acceptanceRate = proposed > 0 ? static_cast<double>(accepted) / static_cast<double>(proposed)
                                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

Eigen::VectorXd inclusionIntensity(const DiscreteMeasure& nu, const Weight& Q, int k) {
  const detail::ArnoldiBasis b =
      detail::buildArnoldi(nu.atoms(), nu.masses(), Q.evaluate(nu.atoms()), k);
  return b.weighted.rowwise().squaredNorm();
}

TailBoundReport tailBoundCheck(const EnsembleSample& sample, double eta, double deltaBar) {
  if (!(eta > 0.0) || !(deltaBar > eta)) {
    throw InvalidArgument("tail bound needs 0 < eta < delta_bar");
  }
  TailBoundReport r;
  r.eta = eta;
  r.deltaBar = deltaBar;
  r.total = static_cast<Index>(sample.configs.size());
  if (r.total == 0) throw InvalidArgument("empty sample");
  const auto nk = static_cast<double>(sample.configs.front().size());
  const double speed = 2.0 * sample.k * nk;
  r.bound = std::exp(speed * std::log1p(-eta / (2.0 * deltaBar)));
  const double threshold = speed * std::log(deltaBar - eta);
  for (const auto& c : sample.configs) {
    const auto cached = c.cached(sample.weightId);
    if (!cached) throw InvalidArgument("sample lacks cached Vandermonde values");
    if (2.0 * *cached < threshold) ++r.outside;
  }
  const double n = static_cast<double>(r.total);
  r.empirical = static_cast<double>(r.outside) / n;
  r.stderr = std::sqrt(r.empirical * (1.0 - r.empirical) / n);
  r.pass = r.empirical <= r.bound + 2.0 * r.stderr;
  return r;
}

std::vector<DiscreteMeasure> pushforwardSigmaK(const EnsembleSample& sample) {
  std::vector<DiscreteMeasure> out;
  out.reserve(sample.configs.size());
  for (const auto& c : sample.configs) out.push_back(empiricalMeasure(c.points()));
  return out;
}

}  // namespace ldpot

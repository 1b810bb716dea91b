#include <doctest.h>

#include "ldpot/energy.hpp"
#include "ldpot/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace ldpot;

namespace {

double logPairProduct(const std::vector<Complex>& z) {
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = i + 1; j < z.size(); ++j) s += std::log(std::abs(z[i] - z[j]));
  return s;
}

// Sum over ordered N-tuples of atoms of prod(mass) |VDM^Q|^2 (n = 1).
double bruteForceZ(const DiscreteMeasure& nu, const Weight& Q, int k) {
  const Index m = nu.size();
  const int N = k + 1;
  std::vector<Index> t(static_cast<std::size_t>(N), 0);
  double total = 0.0;
  for (;;) {
    std::vector<Complex> z;
    double w = 1.0, q = 0.0;
    for (Index a : t) {
      z.push_back(nu.atoms()(0, a));
      w *= nu.masses()(a);
      q += Q(nu.atoms().col(a));
    }
    const double lv = logPairProduct(z) - k * q;
    if (std::isfinite(lv)) total += w * std::exp(2 * lv);
    int p = 0;
    while (p < N && ++t[static_cast<std::size_t>(p)] == m) t[static_cast<std::size_t>(p++)] = 0;
    if (p == N) break;
  }
  return total;
}

// Exact Prob_k over N-subsets of a univariate support, by enumeration.
std::map<std::vector<Index>, double> enumerateProbK(const DiscreteMeasure& nu, int k) {
  const Index m = nu.size();
  const int N = k + 1;
  std::map<std::vector<Index>, double> out;
  std::vector<Index> s(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) s[static_cast<std::size_t>(i)] = i;
  double total = 0.0;
  for (;;) {
    std::vector<Complex> z;
    double w = 1.0;
    for (Index a : s) z.push_back(nu.atoms()(0, a)), w *= nu.masses()(a);
    const double p = w * std::exp(2 * logPairProduct(z));
    out[s] = p;
    total += p;
    int i = N - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == m - N + i) --i;
    if (i < 0) break;
    ++s[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < N; ++j) s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
  }
  for (auto& [key, p] : out) p /= total;
  return out;
}

std::vector<Index> sorted(std::vector<Index> v) {
  std::sort(v.begin(), v.end());
  return v;
}

DiscreteMeasure randomSupport(Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  PointSet pts(1, m);
  Eigen::VectorXd w(m);
  for (Index j = 0; j < m; ++j) {
    pts(0, j) = std::polar(1.0 - 0.3 * (j % 3), 2 * std::numbers::pi * j / m);
    w(j) = u(rng);
  }
  return DiscreteMeasure::normalize(pts, w);
}

// Total variation between empirical pair co-occurrence frequencies and the
// exact ones derived from Prob_k.
double pairTv(const std::vector<std::vector<Index>>& draws,
              const std::map<std::vector<Index>, double>& exact, Index m) {
  Eigen::MatrixXd emp = Eigen::MatrixXd::Zero(m, m), ref = Eigen::MatrixXd::Zero(m, m);
  for (const auto& d : draws) {
    auto s = sorted(d);
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) emp(s[i], s[j]) += 1.0;
  }
  for (const auto& [s, p] : exact)
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t j = i + 1; j < s.size(); ++j) ref(s[i], s[j]) += p;
  emp /= emp.sum();
  ref /= ref.sum();
  return 0.5 * (emp - ref).cwiseAbs().sum();
}

}  // namespace

TEST_CASE("partition function against ordered-tuple enumeration") {
  SUBCASE("small supports, several weights") {
    for (int k : {1, 2, 3}) {
      auto nu = randomSupport(8 + k, 17 + k);
      for (const char* q : {"0", "x^2", "abs(y) + x/2"}) {
        auto Q = Weight::parse(q);
        const double ref = bruteForceZ(nu, Q, k);
        auto z = partitionFunction(nu, Q, k);
        CHECK(z.Nk == k + 1);
        CHECK(std::exp(z.logZ) == doctest::Approx(ref).epsilon(1e-8));
      }
    }
  }
  SUBCASE("25 points, N = 5") {
    auto nu = randomSupport(25, 5);
    auto probs = enumerateProbK(nu, 4);  // normalizing sum is Z / N!
    double subsetSum = 0.0;
    for (const auto& [s, p] : probs) {
      std::vector<Complex> z;
      double w = 1.0;
      for (Index a : s) z.push_back(nu.atoms()(0, a)), w *= nu.masses()(a);
      subsetSum += w * std::exp(2 * logPairProduct(z));
    }
    auto z = partitionFunction(nu, Weight::zero(), 4);
    CHECK(z.logZ == doctest::Approx(std::log(subsetSum) + std::lgamma(6.0)).epsilon(1e-8 / std::abs(z.logZ)));
  }
  SUBCASE("two variables") {
    // nu on 7 points of C^2, k = 1: N = 3 and Z = 3! det G.
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    PointSet p(2, 7);
    for (Index j = 0; j < 7; ++j) p(0, j) = Complex(g(rng), g(rng)), p(1, j) = Complex(g(rng), g(rng));
    auto nu = DiscreteMeasure::uniform(p);
    double ref = 0.0;
    for (Index a = 0; a < 7; ++a)
      for (Index b = 0; b < 7; ++b)
        for (Index c = 0; c < 7; ++c) {
          Eigen::Matrix3cd V;
          V << 1, 1, 1, p(0, a), p(0, b), p(0, c), p(1, a), p(1, b), p(1, c);
          ref += std::norm(V.determinant()) / 343.0;
        }
    CHECK(std::exp(partitionFunction(nu, Weight::zero(), 1).logZ) == doctest::Approx(ref).epsilon(1e-8));
  }
  SUBCASE("circle, k = 1") {
    auto nu = DiscreteMeasure::uniform(discretize(CompactSetSpec::circle(0.0, 1.0, 64)));
    CHECK(std::exp(partitionFunction(nu, Weight::zero(), 1).logZ) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("single atom") {
    auto z = partitionFunction(DiscreteMeasure::dirac(Point::Zero(1)), Weight::zero(), 2);
    CHECK(z.logZ == -std::numeric_limits<double>::infinity());
  }
}

TEST_CASE("normalized partition function on the circle") {
  // Monomials are orthonormal for M > 2k, so Z_k = N_k! exactly and the
  // normalized value (N!)^(1/(2kN)) tends to 1 only like log k / (2k).
  auto nu = DiscreteMeasure::uniform(discretize(CompactSetSpec::circle(0.0, 1.0, 256)));
  double prev = 1e300;
  for (int k : {4, 8, 15, 50, 100}) {
    const auto z = partitionFunction(nu, Weight::zero(), k);
    CHECK(z.logZ == doctest::Approx(std::lgamma(k + 2.0)).epsilon(1e-10));
    CHECK(z.normalized == doctest::Approx(std::exp(std::lgamma(k + 2.0) / (2.0 * k * (k + 1)))).epsilon(1e-12));
    CHECK(z.normalized - 1.0 < prev);
    prev = z.normalized - 1.0;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("dpp sampler") {
  SUBCASE("three atoms, k = 1") {
    PointSet p(1, 3);
    p << Complex(-1), Complex(0), Complex(1);
    auto nu = DiscreteMeasure::uniform(p);
    const Index n = 60000;
    auto s = sampleDpp(nu, Weight::zero(), 1, n, 123);
    std::map<std::vector<Index>, double> freq;
    for (const auto& d : s.atomIndices) freq[sorted(d)] += 1.0 / n;
    const std::map<std::vector<Index>, double> exact = {{{0, 2}, 2.0 / 3}, {{0, 1}, 1.0 / 6}, {{1, 2}, 1.0 / 6}};
    CHECK(freq.size() == 3);
    for (const auto& [key, pr] : exact) {
      CHECK(std::abs(freq[key] - pr) < 4 * std::sqrt(pr * (1 - pr) / n));
    }
    // Oracle agreement with the independent enumeration.
    auto e = enumerateProbK(nu, 1);
    CHECK(e[{0, 2}] == doctest::Approx(2.0 / 3));
  }
  SUBCASE("minimal support is drawn with certainty") {
    auto nu = randomSupport(4, 3);
    auto s = sampleDpp(nu, Weight::zero(), 3, 50, 1);
    for (const auto& d : s.atomIndices) CHECK(sorted(d) == std::vector<Index>{0, 1, 2, 3});
  }
  SUBCASE("distinct points and cached values") {
    auto nu = randomSupport(30, 8);
    auto Q = Weight::parse("x^2/3");
    auto s = sampleDpp(nu, Q, 4, 200, 77, 3);
    CHECK(s.configs.size() == 200);
    CHECK(s.tasks == 3);
    for (std::size_t i = 0; i < s.configs.size(); ++i) {
      const auto d = sorted(s.atomIndices[i]);
      CHECK(std::adjacent_find(d.begin(), d.end()) == d.end());
      const auto cached = s.configs[i].cached(Q.id());
      REQUIRE(cached.has_value());
      CHECK(*cached == doctest::Approx(logAbsVdmWeighted(s.configs[i], Q)).epsilon(1e-10));
    }
  }
  SUBCASE("reproducible for a fixed seed and task count") {
    auto nu = randomSupport(20, 9);
    auto a = sampleDpp(nu, Weight::zero(), 2, 100, 5, 2);
    auto b = sampleDpp(nu, Weight::zero(), 2, 100, 5, 2);
    CHECK(a.atomIndices == b.atomIndices);
    auto c = sampleDpp(nu, Weight::zero(), 2, 100, 6, 2);
    CHECK(a.atomIndices != c.atomIndices);
  }
}

TEST_CASE("one-point intensity") {
  auto nu = randomSupport(20, 31);
  auto Q = Weight::parse("x^2");
  const int k = 3;
  Eigen::VectorXd rho = inclusionIntensity(nu, Q, k);
  CHECK(rho.sum() == doctest::Approx(k + 1.0).epsilon(1e-10));
  CHECK(rho.maxCoeff() <= 1.0 + 1e-10);

  // Oracle: inclusion probabilities from the enumerated law.
  const Index m = nu.size();
  const int N = k + 1;
  Eigen::VectorXd incl = Eigen::VectorXd::Zero(m);
  {
    std::vector<Index> s(N);
    for (int i = 0; i < N; ++i) s[i] = i;
    double total = 0.0;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
    for (;;) {
      std::vector<Complex> z;
      double w = 1.0, q = 0.0;
      for (Index a : s) z.push_back(nu.atoms()(0, a)), w *= nu.masses()(a), q += Q(nu.atoms().col(a));
      const double p = w * std::exp(2 * (logPairProduct(z) - k * q));
      total += p;
      for (Index a : s) acc(a) += p;
      int i = N - 1;
      while (i >= 0 && s[i] == m - N + i) --i;
      if (i < 0) break;
      ++s[i];
      for (int j = i + 1; j < N; ++j) s[j] = s[j - 1] + 1;
    }
    incl = acc / total;
  }
  CHECK((rho - incl).cwiseAbs().maxCoeff() < 1e-10);

  // Sampled marginals against the exact ones. Twenty atoms at 3 sigma each
  // would fail one seed in twenty, so the per-atom bound is 4 sigma.
  const Index n = 10000;
  auto s = sampleDpp(nu, Q, k, n, 2024);
  Eigen::VectorXd hits = Eigen::VectorXd::Zero(m);
  for (const auto& d : s.atomIndices)
    for (Index a : d) hits(a) += 1.0;
  Index bad = 0;
  for (Index a = 0; a < m; ++a) {
    const double se = std::sqrt(incl(a) * (1 - incl(a)) / n);
    if (std::abs(hits(a) / n - incl(a)) > 4 * se) ++bad;
  }
  CHECK(bad == 0);
  Eigen::VectorXd meanMass = Eigen::VectorXd::Zero(m);
  auto emp = pushforwardSigmaK(s);
  for (const auto& mu : emp)
    for (Index j = 0; j < mu.size(); ++j)
      for (Index a = 0; a < m; ++a)
        if (mu.atoms()(0, j) == nu.atoms()(0, a)) meanMass(a) += mu.masses()(j) / n;
  CHECK((meanMass - incl / N).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("pushforward") {
  EnsembleSample s;
  s.k = 1;
  PointSet p(1, 2);
  p << Complex(0), Complex(1);
  s.configs.push_back(Configuration(p, 1));
  auto mu = pushforwardSigmaK(s);
  REQUIRE(mu.size() == 1);
  CHECK(mu[0].masses()(0) == doctest::Approx(0.5));
  CHECK(mu[0].masses()(1) == doctest::Approx(0.5));
}

TEST_CASE("pair frequencies, exact sampler and metropolis chain") {
  auto nu = randomSupport(20, 44);
  const int k = 2;
  auto exact = enumerateProbK(nu, k);

  auto dpp = sampleDpp(nu, Weight::zero(), k, 100000, 99);
  CHECK(pairTv(dpp.atomIndices, exact, nu.size()) < 0.03);

  auto mc = sampleMcmc(nu, Weight::zero(), k, 100000, 2000, 1, 99);
  CHECK(mc.acceptanceRate > 0.0);
  CHECK(mc.acceptanceRate < 1.0);
  CHECK(pairTv(mc.atomIndices, exact, nu.size()) < 0.05);

  auto absorbed = sampleMcmc(randomSupport(3, 1), Weight::zero(), 2, 100, 10, 1, 3);
  for (const auto& d : absorbed.atomIndices) CHECK(sorted(d) == std::vector<Index>{0, 1, 2});
}

TEST_CASE("tail bound") {
  auto nu = DiscreteMeasure::uniform(discretize(CompactSetSpec::circle(0.0, 1.0, 128)));
  auto s = sampleDpp(nu, Weight::zero(), 4, 300, 8);
  CHECK_THROWS_AS(tailBoundCheck(s, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(tailBoundCheck(s, 0.0, 1.0), InvalidArgument);
  auto tiny = tailBoundCheck(s, 1e-9, 1.0);
  CHECK(tiny.bound == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(tiny.pass);
  auto r = tailBoundCheck(s, 0.1, 1.0);
  CHECK(r.bound == doctest::Approx(std::pow(0.95, 2 * 4 * 5)).epsilon(1e-12));
  CHECK(r.total == 300);
}

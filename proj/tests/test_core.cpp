#include <doctest.h>

#include "ldpot/core.hpp"
#include "ldpot/energy.hpp"
#include "ldpot/weight.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ldpot;

namespace {

PointSet realPoints(std::initializer_list<double> xs) {
  PointSet p(1, static_cast<Index>(xs.size()));
  Index j = 0;
  for (double x : xs) p(0, j++) = Complex(x, 0.0);
  return p;
}

}  // namespace

TEST_CASE("weight parsing") {
  CHECK(Weight::parse("0").isZero());
  Point z(1);
  z(0) = Complex(3.0, 2.0);
  CHECK(Weight::parse("x^2")(z) == doctest::Approx(9.0));
  CHECK(Weight::parse("x^2/2 + y")(z) == doctest::Approx(6.5));
  CHECK(Weight::parse("abs(x) - log(r)")(z) == doctest::Approx(3.0 - std::log(std::sqrt(13.0))));
  CHECK(Weight::parse("-x")(z) == doctest::Approx(-3.0));
  try {
    Weight::parse("log(");
    FAIL("expected a parse error");
  } catch (const WeightParseError& e) {
    CHECK(e.offset() == 4);
  }
  CHECK_THROWS_AS(Weight::parse("foo(x)"), WeightParseError);
  CHECK_THROWS_AS(Weight::parse("x +"), WeightParseError);

  // log(0) is -inf: a domain error, not a silent exclusion.
  Point origin = Point::Zero(1);
  CHECK_THROWS(Weight::parse("log(x)")(origin));
  // Same source text, same id.
  CHECK(Weight::parse("x^2").id() == Weight::parse("x^2").id());
  CHECK(Weight::parse("x^2").id() != Weight::parse("x^2/2").id());
}

TEST_CASE("discretize") {
  SUBCASE("interval") {
    PointSet p = discretize(CompactSetSpec::interval(-1, 1, 2));
    REQUIRE(p.cols() == 5);
    const double expect[] = {-1, -0.5, 0, 0.5, 1};
    for (Index j = 0; j < 5; ++j) CHECK(std::abs(p(0, j) - Complex(expect[j])) < 1e-15);
    Eigen::VectorXd h = cellSizes(CompactSetSpec::interval(-1, 1, 2));
    CHECK(h.sum() == doctest::Approx(2.0));
    CHECK(h(0) == doctest::Approx(0.25));
    CHECK(h(2) == doctest::Approx(0.5));
  }
  SUBCASE("circle") {
    PointSet p = discretize(CompactSetSpec::circle(0.0, 1.0, 4));
    REQUIRE(p.cols() == 4);
    const Complex expect[] = {1.0, Complex(0, 1), -1.0, Complex(0, -1)};
    for (Index j = 0; j < 4; ++j) CHECK(std::abs(p(0, j) - expect[j]) < 1e-15);
  }
  SUBCASE("torus") {
    PointSet p = discretize(CompactSetSpec::torusGrid(2, 3));
    CHECK(p.rows() == 2);
    CHECK(p.cols() == 9);
    CHECK((p.cwiseAbs().array() - 1.0).abs().maxCoeff() < 1e-15);
  }
  SUBCASE("overlapping intervals drop duplicates") {
    auto spec = CompactSetSpec::intervals({{-1, 0}, {0, 1}}, 2);
    CHECK(discretize(spec).cols() == 5);
  }
  SUBCASE("bad input") {
    CHECK_THROWS_AS(CompactSetSpec::interval(1, -1, 10), InvalidArgument);
    CHECK_THROWS_AS(CompactSetSpec::circle(0.0, 1.0, 0), InvalidArgument);
  }
}

TEST_CASE("discrete measures validate mass") {
  CHECK_THROWS_AS(DiscreteMeasure(realPoints({0, 1}), Eigen::Vector2d(0.5, 0.6)), InvalidArgument);
  CHECK_THROWS_AS(DiscreteMeasure(realPoints({0, 1}), Eigen::Vector2d(1.5, -0.5)), InvalidArgument);
  auto mu = DiscreteMeasure::normalize(realPoints({0, 1, 2}), Eigen::Vector3d(1, 1, 2));
  CHECK(mu.masses()(2) == doctest::Approx(0.5));
  CHECK(mu.support(0.3).size() == 1);
}

TEST_CASE("moments") {
  const int a1[] = {1}, a2[] = {2}, zero[] = {0};
  CHECK(moment(DiscreteMeasure::dirac(Point::Zero(1)), a1, zero) == 0.0);
  CHECK(moment(DiscreteMeasure::uniform(realPoints({-1, 1})), a2, zero) == doctest::Approx(1.0));
  auto roots = DiscreteMeasure::uniform(discretize(CompactSetSpec::circle(0.0, 1.0, 4)));
  CHECK(std::abs(moment(roots, a1, zero)) < 1e-15);

  // Feature rows are (Re z)^a (Im z)^b: check against a direct evaluation.
  auto idx = momentIndices(1, 3);
  CHECK(idx.size() == 10);  // pairs (a, b) with a + b <= 3
  PointSet z(1, 1);
  z(0, 0) = Complex(0.3, -0.7);
  Eigen::MatrixXd f = momentFeatures(z, idx);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double v = std::pow(0.3, idx[r].alpha[0]) * std::pow(-0.7, idx[r].beta[0]);
    CHECK(f(static_cast<Index>(r), 0) == doctest::Approx(v));
  }
}

TEST_CASE("neighborhoods") {
  auto d0 = DiscreteMeasure::dirac(Point::Zero(1));
  Point one(1);
  one(0) = 1.0;
  auto d1 = DiscreteMeasure::dirac(one);
  CHECK(inNeighborhood(d0, NeighborhoodSpec(d0, 3, 1e-6)));
  CHECK_FALSE(inNeighborhood(d1, NeighborhoodSpec(d0, 1, 0.5)));

  // Arcsine on two different grids agrees in its first moments.
  auto coarse = arcsineMeasure(CompactSetSpec::interval(-1, 1, 1000));
  auto fine = arcsineMeasure(CompactSetSpec::interval(-1, 1, 500));
  NeighborhoodSpec G(coarse, 4, 0.01);
  CHECK(inNeighborhood(fine, G));
  CHECK(G.withEpsilon(0.02).epsilon() == 0.02);
  CHECK(G.violation(G.centerMoments()) == 0.0);
}

TEST_CASE("weak star distance") {
  auto d0 = DiscreteMeasure::dirac(Point::Zero(1));
  Point one(1);
  one(0) = 1.0;
  auto d1 = DiscreteMeasure::dirac(one);
  CHECK(weakStarDistance(d0, d0) == 0.0);
  CHECK(weakStarDistance(d0, d1, 1) == doctest::Approx(0.5));

  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    PointSet a(1, 5), b(1, 7);
    for (Index j = 0; j < a.cols(); ++j) a(0, j) = Complex(g(rng), g(rng));
    for (Index j = 0; j < b.cols(); ++j) b(0, j) = Complex(g(rng), g(rng));
    auto mu = empiricalMeasure(a), sigma = empiricalMeasure(b);
    CHECK(weakStarDistance(mu, sigma) == doctest::Approx(weakStarDistance(sigma, mu)).epsilon(1e-14));
  }
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hexDigest(0xabcULL) == "0000000000000abc");
}

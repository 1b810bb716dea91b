#include <doctest.h>

#include "ldpot/energy.hpp"
#include "ldpot/polynomials.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace ldpot;

namespace {

double pairwiseLogProduct(const PointSet& p) {
  double s = 0.0;
  for (Index i = 0; i < p.cols(); ++i)
    for (Index j = i + 1; j < p.cols(); ++j) s += std::log(std::abs(p(0, i) - p(0, j)));
  return s;
}

// Gauss-Legendre rule on [0, 1] by Golub-Welsch.
DiscreteMeasure gaussLegendre01(Index m) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m, m);
  for (Index i = 1; i < m; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  PointSet x(1, m);
  Eigen::VectorXd w(m);
  for (Index i = 0; i < m; ++i) {
    x(0, i) = Complex(0.5 * (es.eigenvalues()(i) + 1.0), 0.0);
    w(i) = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return DiscreteMeasure::normalize(x, w);
}

PointSet onePoint(Complex z) {
  PointSet p(1, 1);
  p(0, 0) = z;
  return p;
}

Point pt(Complex z) {
  Point p(1);
  p(0) = z;
  return p;
}

}  // namespace

TEST_CASE("monomial basis") {
  CHECK(basisSize(1, 3) == 4);
  CHECK(basisSize(2, 1) == 3);
  CHECK(basisSize(1, 0) == 1);
  CHECK(basisSize(3, 4) == 35);
  CHECK_THROWS_AS(basisSize(4, 200), InvalidArgument);

  MonomialBasis b1(1, 3);
  for (Index i = 0; i < 4; ++i) CHECK(b1.exponent(i)[0] == i);

  // Degree sum identity: sum deg = n/(n+1) k N_k.
  for (int n = 1; n <= 3; ++n) {
    for (int k = 0; k <= 6; ++k) {
      MonomialBasis b(n, k);
      CHECK(static_cast<double>(b.degreeSum()) * (n + 1) == doctest::Approx(double(n) * k * b.size()));
    }
  }
  MonomialBasis b2(2, 2);
  for (Index i = 0; i < b2.size(); ++i) {
    for (int v = 0; v < 2; ++v) {
      if (b2.lower(i, v) >= 0) CHECK(b2.raise(b2.lower(i, v), v) == i);
    }
  }
}

TEST_CASE("log abs vdm: one-variable oracle") {
  PointSet p(1, 2);
  p << Complex(0), Complex(1);
  CHECK(std::abs(logAbsVdm(p, 1)) < 1e-14);

  PointSet roots(1, 3);
  for (int j = 0; j < 3; ++j) roots(0, j) = std::polar(1.0, 2 * std::numbers::pi * j / 3);
  CHECK(logAbsVdm(roots, 2) == doctest::Approx(std::log(3 * std::sqrt(3.0))).epsilon(1e-12));
  CHECK(logAbsVdm(roots, 2) == doctest::Approx(1.647918).epsilon(1e-6));

  PointSet rep(1, 3);
  rep << Complex(0.1), Complex(0.5), Complex(0.1);
  CHECK(std::isinf(logAbsVdm(rep, 2)));
  CHECK(logAbsVdm(rep, 2) < 0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 50; ++t) {
    const int k = 1 + t % 11;
    PointSet z(1, k + 1);
    for (Index j = 0; j <= k; ++j) z(0, j) = Complex(u(rng), u(rng));
    const double ref = pairwiseLogProduct(z);
    CHECK(logAbsVdm(z, k) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(logAbsVdm(z, k, VdmMethod::MonomialLu) == doctest::Approx(ref).epsilon(1e-9));
  }
  PointSet wrong(1, 4);
  wrong << Complex(0), Complex(1), Complex(2), Complex(3);
  CHECK_THROWS_AS(logAbsVdm(wrong, 2), InvalidArgument);
}

TEST_CASE("log abs vdm: two variables against a direct determinant") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int k = 1; k <= 3; ++k) {
    MonomialBasis b(2, k);
    PointSet z(2, b.size());
    for (Index j = 0; j < z.cols(); ++j) z(0, j) = Complex(g(rng), g(rng)), z(1, j) = Complex(g(rng), g(rng));
    Eigen::MatrixXcd V(b.size(), b.size());
    for (Index i = 0; i < b.size(); ++i)
      for (Index j = 0; j < z.cols(); ++j)
        V(i, j) = std::pow(z(0, j), b.exponent(i)[0]) * std::pow(z(1, j), b.exponent(i)[1]);
    const double ref = std::log(std::abs(V.fullPivLu().determinant()));
    CHECK(logAbsVdm(z, k) == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("weighted vdm") {
  PointSet p(1, 2);
  p << Complex(-1), Complex(1);
  Configuration c(p, 1);
  CHECK(logAbsVdmWeighted(c, Weight::zero()) == doctest::Approx(logAbsVdm(c)));
  CHECK(logAbsVdmWeighted(c, Weight::parse("x^2")) == doctest::Approx(std::log(2.0) - 2.0));
  // NaN from the expression counts as +inf: the configuration is annihilated.
  PointSet q(1, 2);
  q << Complex(-1), Complex(0.5);
  CHECK(logAbsVdmWeighted(Configuration(q, 1), Weight::parse("log(x)")) ==
        -std::numeric_limits<double>::infinity());
  auto cached = cacheWeighted(c, Weight::parse("x^2"));
  CHECK(cached.cached(Weight::parse("x^2").id()).value() == doctest::Approx(std::log(2.0) - 2.0));
  CHECK_FALSE(cached.cached(Weight::zero().id()).has_value());
}

TEST_CASE("gram matrix") {
  auto circle = DiscreteMeasure::uniform(discretize(CompactSetSpec::circle(0.0, 1.0, 64)));
  for (int k : {0, 3, 10}) {
    MonomialBasis b(1, k);
    auto G = gramMatrix(circle, Weight::zero(), k, b);
    CHECK((G - Eigen::MatrixXcd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() < 1e-12);
  }
  Point z0(1);
  z0(0) = Complex(0.3, 0.4);
  auto G1 = gramMatrix(DiscreteMeasure::dirac(z0), Weight::zero(), 3, MonomialBasis(1, 3));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G1);
  CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));

  // Direct summation oracle with a weight.
  auto nu = DiscreteMeasure::uniform(discretize(CompactSetSpec::interval(-1, 1, 3)));
  auto Q = Weight::parse("x^2");
  MonomialBasis b(1, 2);
  auto G = gramMatrix(nu, Q, 2, b);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      Complex s = 0;
      for (Index a = 0; a < nu.size(); ++a) {
        const Complex x = nu.atoms()(0, a);
        Complex xi = 1.0, xj = 1.0;
        for (Index e = 0; e < i; ++e) xi *= x;
        for (Index e = 0; e < j; ++e) xj *= x;
        s += nu.masses()(a) * xi * std::conj(xj) * std::exp(-4.0 * x.real() * x.real());
      }
      CHECK(std::abs(G(i, j) - s) < 1e-14);
    }
}

TEST_CASE("orthonormalize") {
  MonomialBasis b3(1, 3);
  auto id = orthonormalize(Eigen::MatrixXcd::Identity(4, 4), b3);
  CHECK(id.rank() == 4);
  auto C = id.coefficients();
  CHECK((C.adjoint() * C - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
  // Coefficients are the identity up to unimodular column factors (and order).
  CHECK((C.cwiseAbs().colwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);

  Eigen::MatrixXcd four(1, 1);
  four(0, 0) = 4.0;
  CHECK(std::abs(orthonormalize(four, MonomialBasis(1, 0)).coefficients()(0, 0)) == doctest::Approx(0.5));

  // Three atoms: the Gram matrix of degree 5 has exactly three eigenvalues
  // above tolerance.
  auto nu = DiscreteMeasure::uniform(discretize(CompactSetSpec::interval(0, 1, 2)));
  MonomialBasis b5(1, 5);
  auto G = gramMatrix(nu, Weight::zero(), 5, b5);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  const Index expected = (es.eigenvalues().array() > 1e-10 * es.eigenvalues().maxCoeff()).count();
  CHECK(expected == 3);
  auto sys = orthonormalize(G, b5);
  CHECK(sys.rank() == expected);
  auto Cs = sys.coefficients();
  CHECK((Cs.adjoint() * G * Cs - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);

  Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(orthonormalize(bad, MonomialBasis(1, 1)), InvalidArgument);
}

TEST_CASE("orthonormal systems agree") {
  auto nu = arcsineMeasure(CompactSetSpec::interval(-1, 1, 50));
  auto Q = Weight::parse("x^2/2");
  const int k = 6;
  MonomialBasis b(1, k);
  auto viaGram = orthonormalize(gramMatrix(nu, Q, k, b), b, Q, k);
  auto viaArnoldi = orthonormalSystem(nu, Q, k);
  PointSet probe = discretize(CompactSetSpec::interval(-1.5, 1.5, 7));
  Eigen::VectorXd a = christoffel(probe, viaGram), c = christoffel(probe, viaArnoldi);
  CHECK((a - c).cwiseAbs().maxCoeff() < 1e-8 * c.cwiseAbs().maxCoeff());
  // Orthonormality in L2(nu e^{-2kQ}) of the weighted values.
  Eigen::MatrixXcd P = viaArnoldi.weightedValues(nu.atoms());
  Eigen::MatrixXcd M = P.adjoint() * nu.masses().asDiagonal() * P;
  CHECK((M - Eigen::MatrixXcd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("christoffel function oracles") {
  auto nu = arcsineMeasure(CompactSetSpec::interval(-1, 1, 50));
  auto s0 = orthonormalSystem(nu, Weight::zero(), 0);
  CHECK(christoffel(pt(0.3), s0) == doctest::Approx(1.0));
  CHECK(christoffel(pt(Complex(5, 2)), s0) == doctest::Approx(1.0));

  // Shifted Legendre: K_k(0, 0) = sum (2j+1) = (k+1)^2, exact with Gauss nodes.
  auto gl = gaussLegendre01(40);
  for (int k : {1, 5, 20}) {
    auto sys = orthonormalSystem(gl, Weight::zero(), k);
    CHECK(christoffel(pt(0.0), sys) == doctest::Approx((k + 1.0) * (k + 1.0)).epsilon(1e-9));
    CHECK(christoffel(pt(1.0), sys) == doctest::Approx((k + 1.0) * (k + 1.0)).epsilon(1e-9));
  }
  // Chebyshev: K_k(1, 1) = 2k + 1 under the arcsine law (Gauss-Chebyshev nodes).
  auto cheb = chebyshevNodes(-1, 1, 120);
  for (int k : {1, 10, 50}) {
    auto sys = orthonormalSystem(cheb, Weight::zero(), k);
    CHECK(christoffel(pt(1.0), sys) == doctest::Approx(2.0 * k + 1).epsilon(1e-9));
    CHECK(christoffel(pt(-1.0), sys) == doctest::Approx(2.0 * k + 1).epsilon(1e-9));
  }
}

TEST_CASE("bernstein-markov constant") {
  auto K = CompactSetSpec::interval(-1, 1, 200);
  auto cheb = chebyshevNodes(-1, 1, 200);
  const double m50 = bmConstant(K, cheb, Weight::zero(), 50);
  CHECK(m50 == doctest::Approx(std::sqrt(101.0)).epsilon(1e-8));
  CHECK(std::pow(m50, 1.0 / 50) == doctest::Approx(1.0472).epsilon(1e-4));

  auto point = CompactSetSpec::pointCloud(onePoint(Complex(0.2, 0.1)));
  auto dpt = DiscreteMeasure::dirac(onePoint(Complex(0.2, 0.1)).col(0));
  for (int k : {0, 1, 7}) CHECK(bmConstant(point, dpt, Weight::zero(), k) == doctest::Approx(1.0));

  auto d0 = DiscreteMeasure::dirac(Point::Zero(1));
  CHECK(bmConstant(K, d0, Weight::zero(), 0) == doctest::Approx(1.0));
  CHECK(std::isinf(bmConstant(K, d0, Weight::zero(), 1)));

  CHECK(restrictedDimension(K, 10) == 11);
  CHECK(restrictedDimension(CompactSetSpec::circle(0.0, 1.0, 16), 10, true) == 16);
}

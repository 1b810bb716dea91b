#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace ldpot::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log|det M| from a partially pivoted LU; -inf when a pivot falls below
/// `floor` in magnitude.
template <typename Derived>
double logAbsDeterminant(const Eigen::MatrixBase<Derived>& m, double floor = 1e-300) {
  using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (m.rows() == 0) return 0.0;
  Eigen::PartialPivLU<Matrix> lu(m.eval());
  double acc = 0.0;
  const auto& u = lu.matrixLU();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double p = std::abs(u(i, i));
    if (!(p >= floor)) return -kInf;
    acc += std::log(p);
  }
  return acc;
}

/// Numerically stable log(sum(exp(v))).
template <typename Derived>
double logSumExp(const Eigen::DenseBase<Derived>& v) {
  if (v.size() == 0) return -kInf;
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((v.derived().array() - top).exp().sum());
}

/// Euclidean projection onto the probability simplex restricted to the
/// coordinates where `allowed` is true (others are forced to zero).
inline Eigen::VectorXd projectSimplex(const Eigen::VectorXd& v, const std::vector<char>& allowed) {
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) u.push_back(v(i));
  }
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (allowed[static_cast<std::size_t>(i)]) out(i) = std::max(v(i) - theta, 0.0);
  }
  return out;
}

/// splitmix64 finalizer, used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substreamSeed(std::uint64_t seed, std::uint64_t task) {
  return splitmix64(splitmix64(seed) ^ splitmix64(task + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0, 1) built from the top 53 bits; identical on every
/// platform, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t uniformIndex(std::mt19937_64& rng, std::uint64_t n) {
  // Lemire-style rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

/// Standard normal via Box-Muller on uniform01 (portable across libraries).
inline double standardNormal(std::mt19937_64& rng) {
  double u1;
  do {
    u1 = uniform01(rng);
  } while (u1 <= 0.0);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

inline double logFactorial(double n) { return std::lgamma(n + 1.0); }

}  // namespace ldpot::detail

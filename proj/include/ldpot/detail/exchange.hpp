#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace ldpot::detail {

using Index = Eigen::Index;

/// Greedy row selection by LU with row partial pivoting on the columns of
/// `a` (ties go to the smaller row index). With `rng`, each pivot is drawn
/// uniformly among rows within `relaxation` of the best; this gives random
/// nondegenerate starts. Returns fewer rows than columns when `a` is rank
/// deficient.
std::vector<Index> greedyRows(const Eigen::MatrixXcd& a, std::mt19937_64* rng = nullptr,
                              double relaxation = 0.5);

/// log|det a(rows, :)|.
double logAbsDetRows(const Eigen::MatrixXcd& a, const std::vector<Index>& rows);

struct ExchangeResult {
  std::vector<Index> rows;
  double logAbsDet = 0.0;
  Index swaps = 0;
  Index sweeps = 0;
  bool converged = false;
  std::vector<double> trace;  // log|det| after each refactorization
  double maxCoefficient = 1.0;  // max |B| at exit (Lagrange-basis sup on the rows)
};

/// Single-row exchange (maxvol) on a tall matrix: swaps the row whose
/// Lagrange coefficient |B(c, j)| with B = a a_S^{-1} is largest while it
/// exceeds 1 + tol. B is rank-one updated per swap and recomputed from a
/// fresh factorization at the start of every sweep.
ExchangeResult maxvolExchange(const Eigen::MatrixXcd& a, std::vector<Index> start,
                              Index maxSweeps, double tol = 1e-12);

/// Lagrange coefficients B = a a(rows, :)^{-1}.
Eigen::MatrixXcd lagrangeCoefficients(const Eigen::MatrixXcd& a, const std::vector<Index>& rows);

}  // namespace ldpot::detail

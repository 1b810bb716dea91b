#include "ldpot/detail/exchange.hpp"

#include "ldpot/detail/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ldpot::detail {

std::vector<Index> greedyRows(const Eigen::MatrixXcd& a, std::mt19937_64* rng,
                              double relaxation) {
  const Index m = a.rows();
  const Index r = std::min(a.rows(), a.cols());
  Eigen::MatrixXcd res = a;
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::vector<Index> rows;
  for (Index t = 0; t < r; ++t) {
    Index best = -1;
    double bestAbs = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      const double v = std::abs(res(i, t));
      if (v > bestAbs) {
        bestAbs = v;
        best = i;
      }
    }
    if (best < 0 || bestAbs == 0.0) break;
    if (rng) {
      std::vector<Index> pool;
      for (Index i = 0; i < m; ++i) {
        if (!used[static_cast<std::size_t>(i)] && std::abs(res(i, t)) >= relaxation * bestAbs) {
          pool.push_back(i);
        }
      }
      best = pool[uniformIndex(*rng, pool.size())];
    }
    used[static_cast<std::size_t>(best)] = 1;
    rows.push_back(best);
    if (t + 1 < a.cols()) {
      const Eigen::RowVectorXcd pivotRow = res.row(best).tail(a.cols() - t - 1) / res(best, t);
      const Eigen::VectorXcd factors = res.col(t);
      res.rightCols(a.cols() - t - 1).noalias() -= factors * pivotRow;
    }
  }
  return rows;
}

double logAbsDetRows(const Eigen::MatrixXcd& a, const std::vector<Index>& rows) {
  Eigen::MatrixXcd sub(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Index>(i)) = a.row(rows[i]);
  return logAbsDeterminant(sub);
}

Eigen::MatrixXcd lagrangeCoefficients(const Eigen::MatrixXcd& a, const std::vector<Index>& rows) {
  Eigen::MatrixXcd sub(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) sub.row(static_cast<Index>(i)) = a.row(rows[i]);
  // B = a sub^{-1}  <=>  B^T = sub^{-T} a^T
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sub.transpose());
  return lu.solve(a.transpose()).transpose();
}

ExchangeResult maxvolExchange(const Eigen::MatrixXcd& a, std::vector<Index> start,
                              Index maxSweeps, double tol) {
  const Index n = a.cols();
  if (static_cast<Index>(start.size()) != n) {
    throw std::invalid_argument("exchange start must have one row per column");
  }
  ExchangeResult out;
  out.rows = std::move(start);
  out.logAbsDet = logAbsDetRows(a, out.rows);
  if (!std::isfinite(out.logAbsDet)) throw std::invalid_argument("exchange start is degenerate");
  out.trace.push_back(out.logAbsDet);

  for (Index sweep = 0; sweep < maxSweeps; ++sweep) {
    Eigen::MatrixXcd b = lagrangeCoefficients(a, out.rows);
    if (sweep > 0) {
      // Drift control: re-anchor the objective on a fresh factorization.
      out.logAbsDet = logAbsDetRows(a, out.rows);
      out.trace.push_back(out.logAbsDet);
    }
    ++out.sweeps;
    Index swapsThisSweep = 0;
    for (Index s = 0; s < std::max<Index>(n, 1); ++s) {
      Index c = 0;
      Index j = 0;
      const double best = b.cwiseAbs().maxCoeff(&c, &j);
      out.maxCoefficient = best;
      if (!(best > 1.0 + tol)) break;
      const std::complex<double> pivot = b(c, j);
      Eigen::RowVectorXcd rowC = b.row(c);
      rowC(j) -= 1.0;
      const Eigen::VectorXcd colJ = b.col(j);
      b.noalias() -= colJ * (rowC / pivot);
      out.rows[static_cast<std::size_t>(j)] = c;
      out.logAbsDet += std::log(std::abs(pivot));
      ++out.swaps;
      ++swapsThisSweep;
    }
    if (swapsThisSweep == 0) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    const Eigen::MatrixXcd b = lagrangeCoefficients(a, out.rows);
    out.maxCoefficient = b.cwiseAbs().maxCoeff();
    out.converged = !(out.maxCoefficient > 1.0 + tol);
    out.logAbsDet = logAbsDetRows(a, out.rows);
    out.trace.push_back(out.logAbsDet);
  }
  return out;
}

}  // namespace ldpot::detail

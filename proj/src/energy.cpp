#include "ldpot/energy.hpp"

#include "ldpot/detail/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace ldpot {

using detail::kInf;

namespace {

void requireUnivariate(const DiscreteMeasure& mu) {
  if (mu.dimension() != 1) throw InvalidArgument("logarithmic energy is implemented for n = 1");
}

constexpr double kSegmentSelfEnergy = 1.5;

}  // namespace

double logPotential(const DiscreteMeasure& mu, Complex z) {
  requireUnivariate(mu);
  double p = 0.0;
  for (Index j = 0; j < mu.size(); ++j) {
    const double m = mu.masses()(j);
    if (m == 0.0) continue;
    const double d = std::abs(z - mu.atoms()(0, j));
    if (d == 0.0) return kInf;
    p -= m * std::log(d);
  }
  return p;
}

double energy(const DiscreteMeasure& mu, EnergyMode mode) {
  requireUnivariate(mu);
  const auto& a = mu.atoms();
  const auto& m = mu.masses();
  double total = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    if (m(i) == 0.0) continue;
    for (Index j = i + 1; j < mu.size(); ++j) {
      if (m(j) == 0.0) continue;
      const double d = std::abs(a(0, i) - a(0, j));
      if (d == 0.0) return kInf;
      total -= 2.0 * m(i) * m(j) * std::log(d);
    }
  }
  if (mode == EnergyMode::Continuum) {
    if (!mu.cells()) throw InvalidArgument("continuum energy needs grid cell sizes");
    const auto& h = *mu.cells();
    for (Index i = 0; i < mu.size(); ++i) {
      if (m(i) == 0.0) continue;
      if (!(h(i) > 0.0)) return kInf;
      total += m(i) * m(i) * (kSegmentSelfEnergy - std::log(h(i)));
    }
  }
  return total;
}

double weightedEnergy(const DiscreteMeasure& mu, const Weight& Q, EnergyMode mode) {
  const double base = energy(mu, mode);
  const Eigen::VectorXd q = Q.evaluate(mu.atoms());
  double integral = 0.0;
  for (Index i = 0; i < mu.size(); ++i) {
    if (mu.masses()(i) == 0.0) continue;
    if (!std::isfinite(q(i))) return kInf;
    integral += mu.masses()(i) * q(i);
  }
  return base + 2.0 * integral;
}

Eigen::MatrixXd logKernelMatrix(const PointSet& atoms, const Eigen::VectorXd& cells) {
  if (atoms.rows() != 1) throw InvalidArgument("logarithmic kernel is implemented for n = 1");
  const Index m = atoms.cols();
  if (cells.size() != m) throw InvalidArgument("cell sizes must match the atoms");
  Eigen::MatrixXd a(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = j + 1; i < m; ++i) {
      const double v = -std::log(std::abs(atoms(0, i) - atoms(0, j)));
      a(i, j) = v;
      a(j, i) = v;
    }
    a(j, j) = cells(j) > 0.0 ? kSegmentSelfEnergy - std::log(cells(j)) : kInf;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Simplex QP: min m^T A m + 2 q^T m, m >= 0, sum m = 1, lo <= C m <= hi.

namespace {

struct QpResult {
  Eigen::VectorXd m;
  Eigen::VectorXd phi;  // A m + q + C^T lambda
  Eigen::VectorXd lambda;
  double F = 0.0;
  double residual = kInf;
  Index iterations = 0;
  bool converged = false;
};

double largestEigenvalue(const Eigen::MatrixXd& a, const std::vector<char>& allowed) {
  const Index m = a.rows();
  Eigen::VectorXd v(m);
  for (Index i = 0; i < m; ++i) v(i) = allowed[static_cast<std::size_t>(i)] ? 1.0 + 0.01 * (i % 7) : 0.0;
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 60; ++it) {
    Eigen::VectorXd w = a * v;
    for (Index i = 0; i < m; ++i) {
      if (!allowed[static_cast<std::size_t>(i)]) w(i) = 0.0;
    }
    lambda = w.norm();
    if (!(lambda > 0.0)) break;
    v = w / lambda;
  }
  return lambda;
}

Eigen::VectorXd boxExcess(const MomentBox* box, const Eigen::VectorXd& m) {
  if (!box) return {};
  const Eigen::VectorXd c = box->features * m;
  return c - c.cwiseMax(box->lo).cwiseMin(box->hi);
}

// Accelerated projected gradient with adaptive restart; box constraints
// enter through a quadratic penalty (this phase only finds the support).
Eigen::VectorXd gradientPhase(const Eigen::MatrixXd& a, const Eigen::VectorXd& q,
                              const std::vector<char>& allowed, const MomentBox* box,
                              Index iterations) {
  const Index m = a.rows();
  Index count = 0;
  for (char c : allowed) count += c ? 1 : 0;
  Eigen::VectorXd x(m);
  for (Index i = 0; i < m; ++i) {
    x(i) = allowed[static_cast<std::size_t>(i)] ? 1.0 / static_cast<double>(count) : 0.0;
  }
  const double lambdaA = largestEigenvalue(a, allowed);
  double rho = 0.0;
  double lip = 2.0 * lambdaA;
  if (box && box->features.rows() > 0) {
    const double fnorm = box->features.squaredNorm();
    rho = lambdaA / std::max(fnorm, 1e-300) * 50.0;
    lip += 2.0 * rho * fnorm;
  }
  const double step = 1.0 / (1.05 * lip);
  Eigen::VectorXd y = x;
  double t = 1.0;
  for (Index it = 0; it < iterations; ++it) {
    Eigen::VectorXd g = 2.0 * (a * y + q);
    if (box && rho > 0.0) g += 2.0 * rho * box->features.transpose() * boxExcess(box, y);
    const Eigen::VectorXd next = detail::projectSimplex(y - step * g, allowed);
    if (g.dot(next - x) > 0.0) {
      // Restart: momentum points uphill.
      t = 1.0;
      y = x;
      continue;
    }
    const double tNext = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / tNext) * (next - x);
    x = next;
    t = tNext;
  }
  return x;
}

struct ActiveConstraint {
  Index row;
  bool upper;
};

QpResult activeSetPolish(const Eigen::MatrixXd& a, const Eigen::VectorXd& q,
                         const std::vector<char>& allowed, const MomentBox* box,
                         const Eigen::VectorXd& start, const EquilibriumOptions& opt) {
  const Index m = a.rows();
  std::vector<Index> support;
  const double top = start.maxCoeff();
  for (Index i = 0; i < m; ++i) {
    if (allowed[static_cast<std::size_t>(i)] && start(i) > 1e-9 * top) support.push_back(i);
  }
  std::vector<ActiveConstraint> active;
  if (box) {
    const Eigen::VectorXd c = box->features * start;
    const Eigen::VectorXd width = box->hi - box->lo;
    for (Index r = 0; r < c.size(); ++r) {
      if (c(r) >= box->hi(r) - 1e-3 * width(r)) active.push_back({r, true});
      else if (c(r) <= box->lo(r) + 1e-3 * width(r)) active.push_back({r, false});
    }
  }

  auto residualOf = [&](const Eigen::VectorXd& mass, const Eigen::VectorXd& phi, double F) {
    double residual = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (!allowed[static_cast<std::size_t>(i)]) continue;
      if (mass(i) > 0.0) residual = std::max(residual, std::abs(phi(i) - F));
      residual = std::max(residual, F - phi(i));
    }
    if (box) residual = std::max(residual, boxExcess(box, mass).cwiseAbs().maxCoeff());
    return residual;
  };

  // The warm start stands in when the polish takes no accepted step.
  QpResult res;
  res.m = start;
  res.lambda = Eigen::VectorXd::Zero(box ? box->features.rows() : 0);
  res.phi = a * start + q;
  res.F = start.dot(res.phi) / std::max(start.sum(), 1e-300);
  res.residual = residualOf(res.m, res.phi, res.F);
  std::set<std::vector<Index>> seen;
  bool singleRemoval = false;

  for (Index it = 0; it < opt.polishIterations; ++it) {
    res.iterations = it + 1;
    const auto s = static_cast<Index>(support.size());
    const auto na = static_cast<Index>(active.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1 + na, s + 1 + na);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1 + na);
    for (Index i = 0; i < s; ++i) {
      for (Index j = 0; j < s; ++j) kkt(i, j) = a(support[i], support[j]);
      kkt(i, s) = -1.0;
      kkt(s, i) = 1.0;
      rhs(i) = -q(support[i]);
      for (Index r = 0; r < na; ++r) {
        const double f = box->features(active[r].row, support[i]);
        kkt(i, s + 1 + r) = f;
        kkt(s + 1 + r, i) = f;
      }
    }
    rhs(s) = 1.0;
    for (Index r = 0; r < na; ++r) {
      rhs(s + 1 + r) = active[r].upper ? box->hi(active[r].row) : box->lo(active[r].row);
    }
    const Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs);

    Eigen::VectorXd mass = Eigen::VectorXd::Zero(m);
    for (Index i = 0; i < s; ++i) mass(support[i]) = sol(i);
    const double F = sol(s);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(res.lambda.size());
    for (Index r = 0; r < na; ++r) lambda(active[r].row) = sol(s + 1 + r);

    // Primal feasibility: drop negative masses.
    std::vector<Index> negative;
    for (Index i = 0; i < s; ++i) {
      if (sol(i) < 0.0) negative.push_back(i);
    }
    if (!negative.empty()) {
      if (singleRemoval) {
        Index worst = negative.front();
        for (Index i : negative) {
          if (sol(i) < sol(worst)) worst = i;
        }
        negative = {worst};
      }
      std::vector<Index> kept;
      std::size_t cursor = 0;
      for (Index i = 0; i < s; ++i) {
        if (cursor < negative.size() && negative[cursor] == i) {
          ++cursor;
          continue;
        }
        kept.push_back(support[i]);
      }
      support = std::move(kept);
      if (!seen.insert(support).second) singleRemoval = true;
      continue;
    }

    Eigen::VectorXd phi = a * mass + q;
    if (box) phi += box->features.transpose() * lambda;

    // Dual feasibility: add nodes where the potential dips below F.
    std::vector<Index> add;
    std::vector<char> inSupport(static_cast<std::size_t>(m), 0);
    for (Index i : support) inSupport[static_cast<std::size_t>(i)] = 1;
    for (Index i = 0; i < m; ++i) {
      if (allowed[static_cast<std::size_t>(i)] && !inSupport[static_cast<std::size_t>(i)] &&
          phi(i) < F - opt.tolerance) {
        add.push_back(i);
      }
    }
    bool changed = !add.empty();
    if (changed) {
      support.insert(support.end(), add.begin(), add.end());
      std::sort(support.begin(), support.end());
    }

    if (!changed && box) {
      const Eigen::VectorXd c = box->features * mass;
      for (Index r = 0; r < c.size() && !changed; ++r) {
        const bool isActive = std::any_of(active.begin(), active.end(),
                                          [&](const ActiveConstraint& x) { return x.row == r; });
        if (isActive) continue;
        if (c(r) > box->hi(r) + opt.tolerance) {
          active.push_back({r, true});
          changed = true;
        } else if (c(r) < box->lo(r) - opt.tolerance) {
          active.push_back({r, false});
          changed = true;
        }
      }
      if (!changed) {
        for (std::size_t r = 0; r < active.size(); ++r) {
          const double l = lambda(active[r].row);
          if ((active[r].upper && l < 0.0) || (!active[r].upper && l > 0.0)) {
            active.erase(active.begin() + static_cast<std::ptrdiff_t>(r));
            changed = true;
            break;
          }
        }
      }
    }

    res.m = mass;
    res.phi = phi;
    res.lambda = lambda;
    res.F = F;
    res.residual = residualOf(mass, phi, F);
    if (!changed) {
      res.converged = res.residual <= opt.targetResidual;
      return res;
    }
  }
  return res;
}

QpResult solveQp(const Eigen::MatrixXd& a, const Eigen::VectorXd& q,
                 const std::vector<char>& allowed, const MomentBox* box,
                 const EquilibriumOptions& opt) {
  Eigen::VectorXd qq = q;
  bool clean = true;
  for (Index i = 0; i < q.size(); ++i) {
    if (!allowed[static_cast<std::size_t>(i)]) {
      qq(i) = 0.0;
      clean = false;
    }
  }
  if (clean) {
    const Eigen::VectorXd warm = gradientPhase(a, qq, allowed, box, opt.gradientIterations);
    return activeSetPolish(a, qq, allowed, box, warm, opt);
  }
  // Excluded nodes may carry infinite self-energy; keep them out of products.
  Eigen::MatrixXd masked = a;
  for (Index i = 0; i < q.size(); ++i) {
    if (!allowed[static_cast<std::size_t>(i)]) {
      masked.row(i).setZero();
      masked.col(i).setZero();
    }
  }
  const Eigen::VectorXd warm = gradientPhase(masked, qq, allowed, box, opt.gradientIterations);
  QpResult res = activeSetPolish(masked, qq, allowed, box, warm, opt);
  return res;
}

}  // namespace

EquilibriumResult equilibriumOnGrid(const PointSet& grid, const Eigen::VectorXd& cells,
                                    const Eigen::VectorXd& q, const EquilibriumOptions& options,
                                    const MomentBox* box, const Eigen::MatrixXd* kernel) {
  if (grid.rows() != 1) throw InvalidArgument("equilibrium measures are implemented for n = 1");
  const Index m = grid.cols();
  if (cells.size() != m || q.size() != m) throw InvalidArgument("grid data length mismatch");
  if (box && box->features.cols() != m) throw InvalidArgument("moment box does not match grid");
  Eigen::MatrixXd owned;
  if (!kernel) {
    owned = logKernelMatrix(grid, cells);
    kernel = &owned;
  }
  std::vector<char> allowed(static_cast<std::size_t>(m), 0);
  Index count = 0;
  for (Index i = 0; i < m; ++i) {
    if (std::isfinite(q(i)) && cells(i) > 0.0) {
      allowed[static_cast<std::size_t>(i)] = 1;
      ++count;
    }
  }
  if (count == 0) throw InvalidArgument("no grid node has finite weight and positive cell");

  const QpResult qp = solveQp(*kernel, q, allowed, box, options);

  EquilibriumResult r;
  Eigen::VectorXd masses = qp.m.cwiseMax(0.0);
  r.muEq = DiscreteMeasure::normalize(grid, masses, cells);
  const Eigen::VectorXd& mm = r.muEq.masses();
  r.potential = *kernel * mm;
  for (Index i = 0; i < m; ++i) {
    if (!allowed[static_cast<std::size_t>(i)]) {
      // Rows of excluded nodes may carry an infinite diagonal; recompute.
      double p = 0.0;
      for (Index j = 0; j < m; ++j) {
        if (j != i && mm(j) > 0.0) p += (*kernel)(i, j) * mm(j);
      }
      r.potential(i) = p;
    }
  }
  r.F = qp.F;
  double qIntegral = 0.0;
  for (Index i = 0; i < m; ++i) {
    if (mm(i) > 0.0) qIntegral += mm(i) * q(i);
  }
  r.IQmin = mm.dot(r.potential) + 2.0 * qIntegral;
  r.extremal = r.F - r.potential.array();
  r.kktResidual = qp.residual;
  r.iterations = options.gradientIterations + qp.iterations;
  r.converged = qp.converged;
  r.multipliers = qp.lambda;
  return r;
}

EquilibriumResult equilibriumMeasure(const CompactSetSpec& spec, const Weight& Q,
                                     const EquilibriumOptions& options) {
  if (spec.dimension() != 1) throw InvalidArgument("equilibrium measures are implemented for n = 1");
  const PointSet grid = discretize(spec);
  return equilibriumOnGrid(grid, cellSizes(spec), Q.evaluate(grid), options);
}

namespace {

// Grid index of every atom of mu, or throws for atoms off the grid.
std::vector<Index> gridIndices(const DiscreteMeasure& mu, const PointSet& grid) {
  std::vector<Index> idx;
  for (Index j = 0; j < mu.size(); ++j) {
    Index found = -1;
    double best = kInf;
    for (Index g = 0; g < grid.cols(); ++g) {
      const double d = std::abs(grid(0, g) - mu.atoms()(0, j));
      if (d < best) {
        best = d;
        found = g;
      }
    }
    const double scale = std::max(1.0, std::abs(mu.atoms()(0, j)));
    if (best > 1e-9 * scale) {
      throw InvalidArgument("measure has an atom off the grid of K");
    }
    idx.push_back(found);
  }
  return idx;
}

}  // namespace

double rateFunction(const DiscreteMeasure& mu, const EquilibriumResult& eq, const Weight& Q) {
  requireUnivariate(mu);
  const PointSet& grid = eq.muEq.atoms();
  const std::vector<Index> idx = gridIndices(mu, grid);
  const Eigen::VectorXd& gridCells = *eq.muEq.cells();
  Eigen::VectorXd cells(mu.size());
  for (Index j = 0; j < mu.size(); ++j) cells(j) = gridCells(idx[static_cast<std::size_t>(j)]);
  const DiscreteMeasure onGrid(mu.atoms(), mu.masses(), cells);
  return 0.5 * (weightedEnergy(onGrid, Q, EnergyMode::Continuum) - eq.IQmin);
}

WIdentityReport wEnergyIdentityCheck(const CompactSetSpec& spec, const Weight& Q, int kMax,
                                     const FeketeOptions& options) {
  WIdentityReport r;
  const EquilibriumResult eq = equilibriumMeasure(spec, Q);
  r.IQmin = eq.IQmin;
  r.predicted = std::exp(-0.5 * eq.IQmin);
  r.feketeEstimate = transfiniteDiameter(spec, Q, kMax, options).limit.logModel;
  r.relativeGap = std::abs(r.feketeEstimate - r.predicted) / r.predicted;
  return r;
}

std::vector<ApproximationRow> monotoneWeightApproximation(const DiscreteMeasure& mu,
                                                          const CompactSetSpec& spec, int jMax) {
  if (jMax < 1) throw InvalidArgument("j_max must be >= 1");
  if (spec.dimension() != 1) throw InvalidArgument("monotone approximation is implemented for n = 1");
  const PointSet grid = discretize(spec);
  const Eigen::VectorXd cells = cellSizes(spec);
  const std::vector<Index> idx = gridIndices(mu, grid);
  Eigen::VectorXd m = Eigen::VectorXd::Zero(grid.cols());
  for (Index j = 0; j < mu.size(); ++j) m(idx[static_cast<std::size_t>(j)]) += mu.masses()(j);

  const Eigen::MatrixXd a = logKernelMatrix(grid, cells);
  for (Index i = 0; i < grid.cols(); ++i) {
    if (m(i) > 0.0 && !(cells(i) > 0.0)) throw InvalidArgument("measure has infinite energy");
  }
  Eigen::VectorXd u(grid.cols());
  for (Index i = 0; i < grid.cols(); ++i) {
    double p = 0.0;
    for (Index j = 0; j < grid.cols(); ++j) {
      if (m(j) > 0.0) p += a(i, j) * m(j);
    }
    u(i) = -p;
  }
  double energyMu = 0.0;
  for (Index i = 0; i < grid.cols(); ++i) {
    if (m(i) > 0.0) energyMu -= m(i) * u(i);
  }
  if (!std::isfinite(energyMu)) throw InvalidArgument("measure has infinite energy");
  const double uIntegralMu = m.dot(u);
  const double umin = u.minCoeff();
  const double umax = u.maxCoeff();

  std::vector<ApproximationRow> rows;
  for (int j = 1; j <= jMax; ++j) {
    const double jj = static_cast<double>(j) * j;
    const double cj = umin + (umax - umin) / jj;
    const Eigen::VectorXd qj = u.cwiseMax(cj).array() + 1.0 / jj;
    const EquilibriumResult eq = equilibriumOnGrid(grid, cells, qj, {}, nullptr, &a);
    ApproximationRow row;
    row.j = j;
    row.F = eq.F;
    const Eigen::VectorXd& mj = eq.muEq.masses();
    row.uIntegral = mj.dot(qj);
    row.energy = eq.IQmin - 2.0 * row.uIntegral;
    row.energyGap = row.energy - energyMu;
    row.uGap = row.uIntegral - uIntegralMu;
    row.kktResidual = eq.kktResidual;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reference measures.

double arcsineCdf(double x, double lo, double hi) {
  const double t = std::clamp((2.0 * x - lo - hi) / (hi - lo), -1.0, 1.0);
  return 0.5 + std::asin(t) / std::numbers::pi;
}

double semicircleCdf(double x, double radius) {
  const double t = std::clamp(x, -radius, radius);
  const double r2 = radius * radius;
  return 0.5 + (t * std::sqrt(r2 - t * t) + r2 * std::asin(t / radius)) / (std::numbers::pi * r2);
}

DiscreteMeasure gridMeasure(const CompactSetSpec& spec, const std::function<double(double)>& cdf) {
  if (spec.kind() != CompactSetSpec::Kind::IntervalUnion) {
    throw InvalidArgument("grid measures from a CDF need an interval union");
  }
  const PointSet grid = discretize(spec);
  const Index m = grid.cols();
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(m);
  for (const auto& part : spec.parts()) {
    const double length = part.hi - part.lo;
    const Index steps = length == 0.0 ? 0 : std::max<Index>(1, std::llround(spec.resolution() * length));
    for (Index j = 0; j <= steps; ++j) {
      const double h = steps ? length / static_cast<double>(steps) : 0.0;
      const double x = (j == steps) ? part.hi : part.lo + static_cast<double>(j) * h;
      const double left = j == 0 ? part.lo : x - 0.5 * h;
      const double right = j == steps ? part.hi : x + 0.5 * h;
      for (Index g = 0; g < m; ++g) {
        if (grid(0, g).real() == x) {
          weights(g) += cdf(right) - cdf(left);
          break;
        }
      }
    }
  }
  return DiscreteMeasure::normalize(grid, weights.cwiseMax(0.0), cellSizes(spec));
}

DiscreteMeasure arcsineMeasure(const CompactSetSpec& spec) {
  if (spec.kind() != CompactSetSpec::Kind::IntervalUnion || spec.parts().size() != 1) {
    throw InvalidArgument("arcsine measure needs a single interval");
  }
  const double lo = spec.parts()[0].lo;
  const double hi = spec.parts()[0].hi;
  return gridMeasure(spec, [=](double x) { return arcsineCdf(x, lo, hi); });
}

DiscreteMeasure semicircleMeasure(const CompactSetSpec& spec, double radius) {
  return gridMeasure(spec, [=](double x) { return semicircleCdf(x, radius); });
}

DiscreteMeasure uniformMeasure(const CompactSetSpec& spec) {
  const PointSet grid = discretize(spec);
  if (spec.kind() == CompactSetSpec::Kind::PointCloud || spec.kind() == CompactSetSpec::Kind::TorusGrid) {
    return DiscreteMeasure::uniform(grid);
  }
  const Eigen::VectorXd cells = cellSizes(spec);
  return DiscreteMeasure::normalize(grid, cells, cells);
}

DiscreteMeasure chebyshevNodes(double lo, double hi, Index m) {
  if (m < 1) throw InvalidArgument("need at least one node");
  PointSet atoms(1, m);
  for (Index j = 0; j < m; ++j) {
    const double t = std::cos((2.0 * static_cast<double>(j) + 1.0) * std::numbers::pi /
                              (2.0 * static_cast<double>(m)));
    atoms(0, j) = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
  }
  return DiscreteMeasure::uniform(atoms);
}

double cdfSupDistance(const DiscreteMeasure& mu, const std::function<double(double)>& cdf) {
  requireUnivariate(mu);
  std::vector<Index> order(static_cast<std::size_t>(mu.size()));
  for (Index i = 0; i < mu.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return mu.atoms()(0, a).real() < mu.atoms()(0, b).real();
  });
  double cumulative = 0.0;
  double worst = 0.0;
  for (std::size_t t = 0; t < order.size(); ++t) {
    const double x = mu.atoms()(0, order[t]).real();
    cumulative += mu.masses()(order[t]);
    const double edge = t + 1 < order.size()
                            ? 0.5 * (x + mu.atoms()(0, order[t + 1]).real())
                            : x;
    worst = std::max(worst, std::abs(cumulative - cdf(edge)));
  }
  return worst;
}

}  // namespace ldpot

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "greenchain/lp_solver.hpp"

namespace oracle {

using greenchain::lp::LpProblem;
using greenchain::lp::LpSolution;
using greenchain::lp::RowSense;

/// Random LP over a finite box, feasible by construction around a hidden point.
inline LpProblem random_box_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> coef(-5.0, 5.0), unit(0.0, 1.0);
  LpProblem p;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    double lo = std::round(coef(rng) * 4) / 4;
    double hi = lo + 0.5 + std::round(unit(rng) * 16) / 4;
    p.add_column("x" + std::to_string(j), std::round(coef(rng) * 8) / 8, lo, hi);
    x0[j] = lo + unit(rng) * (hi - lo);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> row;
    double ax = 0.0;
    for (int j = 0; j < n; ++j) {
      double a = std::round(coef(rng) * 4) / 4;
      if (a == 0.0) continue;
      row.emplace_back(j, a);
      ax += a * x0[j];
    }
    double pick = unit(rng);
    RowSense sense = pick < 0.45 ? RowSense::LessEqual : pick < 0.9 ? RowSense::GreaterEqual : RowSense::Equal;
    double slack = std::round(unit(rng) * 8) / 4;
    double rhs = sense == RowSense::LessEqual ? ax + slack : sense == RowSense::GreaterEqual ? ax - slack : ax;
    p.add_row("r" + std::to_string(i), sense, rhs, row);
  }
  return p;
}

/// Minimum over all basic solutions: every choice of n active hyperplanes
/// among rows and bounds. Returns +inf when no vertex is feasible.
inline double vertex_enumeration(const LpProblem& p) {
  const int n = p.num_columns();
  struct Plane {
    Eigen::VectorXd a;
    double b;
  };
  std::vector<Plane> planes;
  for (const auto& r : p.rows()) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (auto [j, v] : r.coefficients) a[j] += v;
    planes.push_back({a, r.rhs});
  }
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[j] = 1.0;
    planes.push_back({e, p.column(j).lower});
    planes.push_back({e, p.column(j).upper});
  }
  auto feasible = [&](const Eigen::VectorXd& x) {
    const double tol = 1e-9;
    for (int j = 0; j < n; ++j)
      if (x[j] < p.column(j).lower - tol || x[j] > p.column(j).upper + tol) return false;
    for (const auto& r : p.rows()) {
      double ax = 0.0;
      for (auto [j, v] : r.coefficients) ax += v * x[j];
      double scale = 1.0 + std::abs(r.rhs);
      if (r.sense == RowSense::LessEqual && ax > r.rhs + tol * scale) return false;
      if (r.sense == RowSense::GreaterEqual && ax < r.rhs - tol * scale) return false;
      if (r.sense == RowSense::Equal && std::abs(ax - r.rhs) > tol * scale) return false;
    }
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  const int k = static_cast<int>(planes.size());
  std::vector<int> pick(n);
  // Iterate over all n-subsets of planes.
  std::vector<bool> mask(k, false);
  std::fill(mask.begin(), mask.begin() + std::min(n, k), true);
  do {
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    int row = 0;
    for (int t = 0; t < k && row < n; ++t)
      if (mask[t]) {
        A.row(row) = planes[t].a.transpose();
        b[row] = planes[t].b;
        ++row;
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (lu.rank() < n) continue;
    Eigen::VectorXd x = lu.solve(b);
    if (!feasible(x)) continue;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += p.column(j).cost * x[j];
    best = std::min(best, obj);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

struct DualityReport {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;               ///< relative
  double max_complementarity = 0.0;
  double max_dual_sign_violation = 0.0;
  double max_primal_violation = 0.0;
};

/// Recomputes the Lagrangian dual bound from the row duals alone.
/// Assumes every column has finite bounds.
inline DualityReport duality_report(const LpProblem& p, const LpSolution& s) {
  DualityReport r;
  const int n = p.num_columns();
  std::vector<double> d(n);
  for (int j = 0; j < n; ++j) d[j] = p.column(j).cost;
  for (int i = 0; i < p.num_rows(); ++i)
    for (auto [j, v] : p.row(i).coefficients) d[j] -= v * s.duals[i];
  for (int j = 0; j < n; ++j) r.primal_objective += p.column(j).cost * s.primal[j];
  for (int i = 0; i < p.num_rows(); ++i) r.dual_objective += p.row(i).rhs * s.duals[i];
  for (int j = 0; j < n; ++j) r.dual_objective += d[j] > 0 ? d[j] * p.column(j).lower : d[j] * p.column(j).upper;
  r.gap = std::abs(r.primal_objective - r.dual_objective) / (1.0 + std::abs(r.primal_objective));
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& row = p.row(i);
    double ax = 0.0;
    for (auto [j, v] : row.coefficients) ax += v * s.primal[j];
    double slack = row.rhs - ax;
    r.max_complementarity = std::max(r.max_complementarity, std::abs(slack * s.duals[i]));
    double sign_violation = 0.0, primal_violation = 0.0;
    if (row.sense == RowSense::LessEqual) {
      sign_violation = std::max(0.0, s.duals[i]);
      primal_violation = std::max(0.0, -slack);
    } else if (row.sense == RowSense::GreaterEqual) {
      sign_violation = std::max(0.0, -s.duals[i]);
      primal_violation = std::max(0.0, slack);
    } else {
      primal_violation = std::abs(slack);
    }
    r.max_dual_sign_violation = std::max(r.max_dual_sign_violation, sign_violation);
    r.max_primal_violation = std::max(r.max_primal_violation, primal_violation);
  }
  for (int j = 0; j < n; ++j)
    r.max_primal_violation = std::max({r.max_primal_violation, p.column(j).lower - s.primal[j],
                                       s.primal[j] - p.column(j).upper});
  return r;
}

}  // namespace oracle

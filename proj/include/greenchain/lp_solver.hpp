#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "greenchain/error.hpp"

namespace greenchain::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, Equal, GreaterEqual };

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct Column {
  std::string name;
  double cost = 0.0;
  double lower = 0.0;
  double upper = kInf;
};

struct Row {
  std::string name;
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
  std::vector<std::pair<int, double>> coefficients;  ///< (column, value)
};

/// Minimisation problem: min c'x  s.t.  rows, lower <= x <= upper.
class LpProblem {
 public:
  int add_column(std::string name, double cost, double lower = 0.0, double upper = kInf) {
    columns_.push_back({std::move(name), cost, lower, upper});
    return static_cast<int>(columns_.size()) - 1;
  }

  int add_row(std::string name, RowSense sense, double rhs, std::vector<std::pair<int, double>> coefficients = {}) {
    rows_.push_back({std::move(name), sense, rhs, std::move(coefficients)});
    return static_cast<int>(rows_.size()) - 1;
  }

  void add_coefficient(int row, int column, double value) { rows_.at(row).coefficients.emplace_back(column, value); }
  void set_rhs(int row, double rhs) { rows_.at(row).rhs = rhs; }
  void set_cost(int column, double cost) { columns_.at(column).cost = cost; }
  void set_bounds(int column, double lower, double upper) {
    columns_.at(column).lower = lower;
    columns_.at(column).upper = upper;
  }

  int num_columns() const { return static_cast<int>(columns_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const Column& column(int j) const { return columns_.at(j); }
  const Row& row(int i) const { return rows_.at(i); }
  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<Row>& rows() const { return rows_; }

  /// Throws std::invalid_argument for malformed problems.
  void check() const {
    for (const auto& c : columns_) {
      if (!std::isfinite(c.cost)) throw std::invalid_argument("column " + c.name + ": non-finite cost");
      if (std::isnan(c.lower) || std::isnan(c.upper) || c.lower > c.upper || c.lower == kInf || c.upper == -kInf)
        throw std::invalid_argument("column " + c.name + ": invalid bounds");
    }
    for (const auto& r : rows_) {
      if (!std::isfinite(r.rhs)) throw std::invalid_argument("row " + r.name + ": non-finite rhs");
      for (const auto& [j, v] : r.coefficients) {
        if (j < 0 || j >= num_columns()) throw std::invalid_argument("row " + r.name + ": bad column index");
        if (!std::isfinite(v)) throw std::invalid_argument("row " + r.name + ": non-finite coefficient");
      }
    }
  }

 private:
  std::vector<Column> columns_;
  std::vector<Row> rows_;
};

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-8;
  double pivot_tol = 1e-10;
  int max_iterations = 0;  ///< 0 picks a limit from the problem size
  int refinement_rounds = 3;
  bool scale = true;
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> primal;
  std::vector<double> duals;  ///< d objective / d rhs, one per row
  std::vector<double> reduced_costs;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
};

/// Piece of the optimal value function when one row's rhs grows.
struct RhsSegment {
  double length = 0.0;              ///< rhs increase covered
  double slope = 0.0;               ///< d objective / d rhs on the piece
  std::vector<double> direction;    ///< d x / d rhs for every column
};

/// Bounded-variable revised simplex with an explicit basis inverse.
/// Row i gets a logical s_i with a_i x + s_i = b_i.
class RevisedSimplex {
 public:
  explicit RevisedSimplex(const LpProblem& p, SolverOptions opt = {}) : opt_(opt) {
    p.check();
    n_ = p.num_columns();
    m_ = p.num_rows();
    N_ = n_ + m_;
    build_matrix(p);
    setup_scaling(p);
    init_basis();
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations : 50 * (N_ + 10);
  }

  LpStatus solve();
  LpStatus status() const { return status_; }
  LpSolution solution() const;
  int iterations() const { return iter_; }

  /// Changes bounds while keeping the basis; call solve() again if needed.
  void set_column_bounds(int j, double lower, double upper);

  /// Raises the rhs of `row` from its current value by up to `max_increase`,
  /// pivoting with the dual simplex at every breakpoint. Requires an optimal basis.
  /// Stops early once the problem turns infeasible.
  std::vector<RhsSegment> parametric_rhs(int row, double max_increase = kInf);

 private:
  enum class State : std::uint8_t { Basic, AtLower, AtUpper, AtZero };
  enum class Check { Ok, Refactor, Iterate };

  void build_matrix(const LpProblem& p);
  void setup_scaling(const LpProblem& p);
  void init_basis();

  double& binv(int i, int k) { return binv_[static_cast<std::size_t>(i) * m_ + k]; }
  double binv(int i, int k) const { return binv_[static_cast<std::size_t>(i) * m_ + k]; }

  void ftran(int j, std::vector<double>& out) const;
  double dot_column(const std::vector<double>& v, int j) const;
  void recompute_primal();
  void compute_duals(const std::vector<double>& cost);
  void reinvert();
  void repair_basis(const Eigen::MatrixXd& B);
  LpStatus run();
  Check verify();
  int choose_entering(const std::vector<double>& d, bool bland) const;
  void pivot(int r, int q, State leaving_state, bool update_duals);
  bool infeasible_basics(std::vector<double>& phase_cost) const;
  double cost_of(int j) const { return j < n_ ? cost_[j] : 0.0; }

  SolverOptions opt_;
  int n_ = 0, m_ = 0, N_ = 0;
  std::vector<int> col_start_, row_idx_;
  std::vector<double> val_;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1.0;
  std::vector<double> cost_, lo_, hi_, b_;

  std::vector<double> x_;
  std::vector<State> state_;
  std::vector<int> basis_, pos_;
  std::vector<double> binv_;
  std::vector<double> y_, d_, weight_;
  std::vector<double> alpha_, rowvec_, arow_;

  LpStatus status_ = LpStatus::Infeasible;
  bool solved_ = false;
  int iter_ = 0, max_iter_ = 0, since_refactor_ = 0;
};

inline void RevisedSimplex::build_matrix(const LpProblem& p) {
  std::vector<std::vector<std::pair<int, double>>> cols(n_);
  for (int i = 0; i < m_; ++i)
    for (const auto& [j, v] : p.row(i).coefficients) cols[j].emplace_back(i, v);
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) {
    auto& c = cols[j];
    std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < c.size();) {
      int i = c[k].first;
      double v = 0.0;
      for (; k < c.size() && c[k].first == i; ++k) v += c[k].second;
      if (v != 0.0) {
        row_idx_.push_back(i);
        val_.push_back(v);
      }
    }
    col_start_[j + 1] = static_cast<int>(row_idx_.size());
  }
}

inline void RevisedSimplex::setup_scaling(const LpProblem& p) {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
  if (opt_.scale && !val_.empty()) {
    // Entries far below their row or column maximum are ignored when picking
    // factors, otherwise a round-off sized coefficient drags the scale by
    // many orders of magnitude.
    constexpr double kIgnore = 1e-9;
    for (int pass = 0; pass < 6; ++pass) {
      std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
      for (int j = 0; j < n_; ++j)
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
          rmax[row_idx_[k]] = std::max(rmax[row_idx_[k]], std::abs(val_[k]) * row_scale_[row_idx_[k]] * col_scale_[j]);
      for (int j = 0; j < n_; ++j)
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          double a = std::abs(val_[k]) * row_scale_[row_idx_[k]] * col_scale_[j];
          if (a >= kIgnore * rmax[row_idx_[k]]) rmin[row_idx_[k]] = std::min(rmin[row_idx_[k]], a);
        }
      for (int i = 0; i < m_; ++i)
        if (rmax[i] > 0) row_scale_[i] *= pow2(1.0 / std::sqrt(rmin[i] * rmax[i]));
      for (int j = 0; j < n_; ++j) {
        double cmin = kInf, cmax = 0.0;
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
          cmax = std::max(cmax, std::abs(val_[k]) * row_scale_[row_idx_[k]] * col_scale_[j]);
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
          double a = std::abs(val_[k]) * row_scale_[row_idx_[k]] * col_scale_[j];
          if (a >= kIgnore * cmax) cmin = std::min(cmin, a);
        }
        if (cmax > 0) col_scale_[j] *= pow2(1.0 / std::sqrt(cmin * cmax));
      }
    }
  }
  for (int j = 0; j < n_; ++j)
    for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) val_[k] *= row_scale_[row_idx_[k]] * col_scale_[j];

  double cmax = 0.0;
  for (int j = 0; j < n_; ++j) cmax = std::max(cmax, std::abs(p.column(j).cost * col_scale_[j]));
  obj_scale_ = (opt_.scale && cmax > 0) ? pow2(1.0 / cmax) : 1.0;

  cost_.assign(n_, 0.0);
  lo_.assign(N_, 0.0);
  hi_.assign(N_, 0.0);
  b_.assign(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto& c = p.column(j);
    cost_[j] = obj_scale_ * c.cost * col_scale_[j];
    lo_[j] = c.lower / col_scale_[j];
    hi_[j] = c.upper / col_scale_[j];
  }
  for (int i = 0; i < m_; ++i) {
    const auto& r = p.row(i);
    b_[i] = r.rhs * row_scale_[i];
    switch (r.sense) {
      case RowSense::LessEqual: lo_[n_ + i] = 0.0; hi_[n_ + i] = kInf; break;
      case RowSense::GreaterEqual: lo_[n_ + i] = -kInf; hi_[n_ + i] = 0.0; break;
      case RowSense::Equal: lo_[n_ + i] = 0.0; hi_[n_ + i] = 0.0; break;
    }
  }
}

inline void RevisedSimplex::init_basis() {
  x_.assign(N_, 0.0);
  state_.assign(N_, State::AtLower);
  pos_.assign(N_, -1);
  basis_.resize(m_);
  for (int j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) {
      state_[j] = State::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      state_[j] = State::AtUpper;
      x_[j] = hi_[j];
    } else {
      state_[j] = State::AtZero;
      x_[j] = 0.0;
    }
  }
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    pos_[n_ + i] = i;
    state_[n_ + i] = State::Basic;
  }
  binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
  for (int i = 0; i < m_; ++i) binv(i, i) = 1.0;
  y_.assign(m_, 0.0);
  d_.assign(N_, 0.0);
  weight_.assign(N_, 1.0);
  alpha_.assign(m_, 0.0);
  rowvec_.assign(m_, 0.0);
  arow_.assign(N_, 0.0);
  recompute_primal();
}

inline void RevisedSimplex::ftran(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= n_) {
    const int k = j - n_;
    for (int i = 0; i < m_; ++i) out[i] = binv(i, k);
    return;
  }
  for (int t = col_start_[j]; t < col_start_[j + 1]; ++t) {
    const int k = row_idx_[t];
    const double v = val_[t];
    for (int i = 0; i < m_; ++i) out[i] += v * binv(i, k);
  }
}

inline double RevisedSimplex::dot_column(const std::vector<double>& v, int j) const {
  if (j >= n_) return v[j - n_];
  double s = 0.0;
  for (int t = col_start_[j]; t < col_start_[j + 1]; ++t) s += v[row_idx_[t]] * val_[t];
  return s;
}

inline void RevisedSimplex::recompute_primal() {
  std::vector<double> rhs(b_);
  for (int j = 0; j < N_; ++j) {
    if (state_[j] == State::Basic || x_[j] == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] -= x_[j];
      continue;
    }
    for (int t = col_start_[j]; t < col_start_[j + 1]; ++t) rhs[row_idx_[t]] -= val_[t] * x_[j];
  }
  std::vector<int> nz;
  for (int k = 0; k < m_; ++k)
    if (rhs[k] != 0.0) nz.push_back(k);
  for (int i = 0; i < m_; ++i) {
    const double* row = &binv_[static_cast<std::size_t>(i) * m_];
    double s = 0.0;
    for (int k : nz) s += row[k] * rhs[k];
    x_[basis_[i]] = s;
  }
}

/// y = c_B' B^-1 and reduced costs for every variable.
inline void RevisedSimplex::compute_duals(const std::vector<double>& cost) {
  std::fill(y_.begin(), y_.end(), 0.0);
  for (int i = 0; i < m_; ++i) {
    const double c = cost[basis_[i]];
    if (c == 0.0) continue;
    const double* row = &binv_[static_cast<std::size_t>(i) * m_];
    for (int k = 0; k < m_; ++k) y_[k] += c * row[k];
  }
  for (int j = 0; j < N_; ++j) d_[j] = state_[j] == State::Basic ? 0.0 : cost[j] - dot_column(y_, j);
}

/// Swaps dependent basis columns for slacks of the rows they leave uncovered.
/// The dropped structurals go to their nearest finite bound.
inline void RevisedSimplex::repair_basis(const Eigen::MatrixXd& B) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  lu.setThreshold(1e-11);
  const int rank = static_cast<int>(lu.rank());
  if (rank == m_) throw NumericalFailure("basis matrix is singular; rescale the instance");
  // Row k of the factor is row P[k] of B.
  const Eigen::PermutationMatrix<Eigen::Dynamic> Pinv = lu.permutationP().inverse();
  const auto& P = Pinv.indices();
  const auto& Q = lu.permutationQ().indices();
  for (int k = rank; k < m_; ++k) {
    const int i = Q[k];
    const int row = P[k];
    const int j = basis_[i];
    const int slack = n_ + row;
    if (state_[slack] == State::Basic) throw NumericalFailure("basis repair failed; rescale the instance");
    if (std::isfinite(lo_[j]) && (!std::isfinite(hi_[j]) || std::abs(x_[j] - lo_[j]) <= std::abs(hi_[j] - x_[j]))) {
      state_[j] = State::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      state_[j] = State::AtUpper;
      x_[j] = hi_[j];
    } else {
      state_[j] = State::AtZero;
      x_[j] = 0.0;
    }
    pos_[j] = -1;
    basis_[i] = slack;
    pos_[slack] = i;
    state_[slack] = State::Basic;
  }
}

inline void RevisedSimplex::reinvert() {
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[i];
    if (j >= n_) {
      trip.emplace_back(j - n_, i, 1.0);
    } else {
      for (int t = col_start_[j]; t < col_start_[j + 1]; ++t) trip.emplace_back(row_idx_[t], i, val_[t]);
    }
  }
  Eigen::SparseMatrix<double> B(m_, m_);
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(B);
  lu.factorize(B);
  if (lu.info() != Eigen::Success) {
    repair_basis(Eigen::MatrixXd(B));
    reinvert();
    return;
  }
  Eigen::MatrixXd inv = lu.solve(Eigen::MatrixXd::Identity(m_, m_));
  if (lu.info() != Eigen::Success || !inv.allFinite())
    throw NumericalFailure("basis inversion failed; rescale the instance");
  for (int i = 0; i < m_; ++i)
    for (int k = 0; k < m_; ++k) {
      double v = inv(i, k);
      binv(i, k) = std::abs(v) < 1e-15 ? 0.0 : v;
    }
  since_refactor_ = 0;
}

/// Marks basic variables outside their bounds with phase-one costs.
inline bool RevisedSimplex::infeasible_basics(std::vector<double>& phase_cost) const {
  std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
  bool any = false;
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[i];
    if (x_[j] < lo_[j] - opt_.feasibility_tol) {
      phase_cost[j] = -1.0;
      any = true;
    } else if (x_[j] > hi_[j] + opt_.feasibility_tol) {
      phase_cost[j] = 1.0;
      any = true;
    }
  }
  return any;
}

inline int RevisedSimplex::choose_entering(const std::vector<double>& d, bool bland) const {
  int best = -1;
  double best_score = 0.0;
  const double tol = opt_.optimality_tol;
  for (int j = 0; j < N_; ++j) {
    const State s = state_[j];
    if (s == State::Basic || lo_[j] == hi_[j]) continue;
    const double dj = d[j];
    bool eligible = (s == State::AtLower && dj < -tol) || (s == State::AtUpper && dj > tol) ||
                    (s == State::AtZero && std::abs(dj) > tol);
    if (!eligible) continue;
    if (bland) return j;
    const double score = dj * dj / weight_[j];
    if (best < 0 || score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

inline void RevisedSimplex::pivot(int r, int q, State leaving_state, bool update_duals) {
  const int p = basis_[r];
  const double ar = alpha_[r];
  std::copy(&binv_[static_cast<std::size_t>(r) * m_], &binv_[static_cast<std::size_t>(r) * m_] + m_, rowvec_.begin());

  // Pivot row over nonbasic columns, for dual and devex updates.
  for (int j = 0; j < N_; ++j) arow_[j] = state_[j] == State::Basic ? 0.0 : dot_column(rowvec_, j);

  if (update_duals) {
    const double td = d_[q] / ar;
    for (int j = 0; j < N_; ++j)
      if (state_[j] != State::Basic && arow_[j] != 0.0) d_[j] -= td * arow_[j];
    d_[q] = 0.0;
    d_[p] = -td;
    for (int k = 0; k < m_; ++k) y_[k] += td * rowvec_[k];
  }

  const double wq = std::max(weight_[q], 1e-12);
  for (int j = 0; j < N_; ++j) {
    if (state_[j] == State::Basic || j == q || arow_[j] == 0.0) continue;
    const double ratio = arow_[j] / ar;
    weight_[j] = std::max(weight_[j], ratio * ratio * wq);
  }
  weight_[p] = std::max(wq / (ar * ar), 1.0);
  // Restart the reference framework once weights grow out of range.
  if (weight_[p] > 1e8 || !std::isfinite(weight_[p])) std::fill(weight_.begin(), weight_.end(), 1.0);

  std::vector<int> nz;
  nz.reserve(m_);
  for (int k = 0; k < m_; ++k)
    if (rowvec_[k] != 0.0) nz.push_back(k);
  double* prow = &binv_[static_cast<std::size_t>(r) * m_];
  for (int k : nz) prow[k] /= ar;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    const double f = alpha_[i];
    if (std::abs(f) < 1e-14) continue;
    double* row = &binv_[static_cast<std::size_t>(i) * m_];
    for (int k : nz) row[k] -= f * prow[k];
  }

  basis_[r] = q;
  pos_[q] = r;
  pos_[p] = -1;
  state_[q] = State::Basic;
  state_[p] = leaving_state;
  if (leaving_state == State::AtLower) x_[p] = lo_[p];
  else if (leaving_state == State::AtUpper) x_[p] = hi_[p];
  ++since_refactor_;
}

inline LpStatus RevisedSimplex::run() {
  std::vector<double> phase_cost(N_, 0.0);
  std::vector<double> true_cost(N_, 0.0);
  for (int j = 0; j < n_; ++j) true_cost[j] = cost_[j];
  const double ftol = opt_.feasibility_tol;
  bool duals_valid = false;
  bool was_phase1 = true;
  int degenerate_run = 0;
  int since_recompute = 0;

  while (true) {
    if (iter_ >= max_iter_) throw NumericalFailure("simplex iteration limit reached; rescale the instance");
    if (since_refactor_ >= 400) {
      reinvert();
      recompute_primal();
      duals_valid = false;
    } else if (since_recompute >= 50) {
      recompute_primal();
      duals_valid = false;
      since_recompute = 0;
    }

    const bool phase1 = infeasible_basics(phase_cost);
    if (phase1) {
      compute_duals(phase_cost);
      duals_valid = false;
    } else if (!duals_valid || was_phase1) {
      compute_duals(true_cost);
      if (was_phase1) std::fill(weight_.begin(), weight_.end(), 1.0);
      duals_valid = true;
    }
    was_phase1 = phase1;

    const bool bland = degenerate_run > 50;
    const int q = choose_entering(d_, bland);
    if (q < 0) return phase1 ? LpStatus::Infeasible : LpStatus::Optimal;

    const double dir = (state_[q] == State::AtUpper || (state_[q] == State::AtZero && d_[q] > 0)) ? -1.0 : 1.0;
    ftran(q, alpha_);

    // Ratio test over effective bounds; infeasible basics block at the bound they violate.
    auto eff_bounds = [&](int j) -> std::pair<double, double> {
      if (phase1) {
        if (x_[j] < lo_[j] - ftol) return {-kInf, lo_[j]};
        if (x_[j] > hi_[j] + ftol) return {hi_[j], kInf};
      }
      return {lo_[j], hi_[j]};
    };
    double tmax = kInf;
    {
      for (int i = 0; i < m_; ++i) {
        const double a = alpha_[i];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const int j = basis_[i];
        const double delta = -dir * a;
        auto [l, u] = eff_bounds(j);
        if (delta > 0 && u < kInf) tmax = std::min(tmax, (u - x_[j] + ftol) / delta);
        if (delta < 0 && l > -kInf) tmax = std::min(tmax, (l - x_[j] - ftol) / delta);
      }
    }
    // Bland picks the lowest index among Harris candidates whose pivot is not
    // tiny next to the largest one.
    double cand_abs = 0.0;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        const double a = alpha_[i];
        if (std::abs(a) <= opt_.pivot_tol) continue;
        const int j = basis_[i];
        const double delta = -dir * a;
        auto [l, u] = eff_bounds(j);
        double ratio;
        if (delta > 0 && u < kInf) ratio = (u - x_[j]) / delta;
        else if (delta < 0 && l > -kInf) ratio = (l - x_[j]) / delta;
        else continue;
        if (ratio <= tmax) cand_abs = std::max(cand_abs, std::abs(a));
      }
    }
    int r = -1;
    double theta = kInf, best_abs = 0.0;
    State leaving = State::AtLower;
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[i];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const int j = basis_[i];
      const double delta = -dir * a;
      auto [l, u] = eff_bounds(j);
      double ratio;
      State st;
      if (delta > 0 && u < kInf) {
        ratio = (u - x_[j]) / delta;
        st = u == hi_[j] ? State::AtUpper : State::AtLower;
      } else if (delta < 0 && l > -kInf) {
        ratio = (l - x_[j]) / delta;
        st = l == lo_[j] ? State::AtLower : State::AtUpper;
      } else {
        continue;
      }
      ratio = std::max(ratio, 0.0);
      if (bland) {
        if (ratio > tmax || std::abs(a) < 1e-3 * cand_abs) continue;
        if (r < 0 || j < basis_[r]) {
          r = i;
          theta = ratio;
          leaving = st;
        }
      } else if (ratio <= tmax && std::abs(a) > best_abs) {
        r = i;
        theta = ratio;
        best_abs = std::abs(a);
        leaving = st;
      }
    }

    const double range = hi_[q] - lo_[q];
    const bool flip = std::isfinite(range) && (r < 0 || range <= theta);
    if (r < 0 && !flip) {
      if (phase1) throw NumericalFailure("phase one ratio test found no blocking variable");
      return LpStatus::Unbounded;
    }
    if (flip) theta = range;

    ++iter_;
    ++since_recompute;
    degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;

    if (theta > 0) {
      x_[q] += dir * theta;
      for (int i = 0; i < m_; ++i)
        if (alpha_[i] != 0.0) x_[basis_[i]] -= dir * theta * alpha_[i];
    }
    if (flip) {
      state_[q] = dir > 0 ? State::AtUpper : State::AtLower;
      x_[q] = dir > 0 ? hi_[q] : lo_[q];
      continue;
    }

    // Accuracy check: the pivot element from the row must agree with the column.
    double row_pivot = 0.0;
    {
      const double* prow = &binv_[static_cast<std::size_t>(r) * m_];
      if (q >= n_) {
        row_pivot = prow[q - n_];
      } else {
        for (int t = col_start_[q]; t < col_start_[q + 1]; ++t) row_pivot += prow[row_idx_[t]] * val_[t];
      }
    }
    if (std::abs(row_pivot - alpha_[r]) > 1e-9 * (1.0 + std::abs(alpha_[r])) && since_refactor_ > 0) {
      // Undo the step and refactor before retrying.
      if (theta > 0) {
        x_[q] -= dir * theta;
        for (int i = 0; i < m_; ++i)
          if (alpha_[i] != 0.0) x_[basis_[i]] += dir * theta * alpha_[i];
      }
      reinvert();
      recompute_primal();
      duals_valid = false;
      continue;
    }

    pivot(r, q, leaving, !phase1 && duals_valid);
  }
}

/// Checks residuals on an optimal basis computed from scratch.
inline RevisedSimplex::Check RevisedSimplex::verify() {
  recompute_primal();
  const double ftol = opt_.feasibility_tol;
  std::vector<double> res(b_);
  for (int j = 0; j < n_; ++j)
    for (int t = col_start_[j]; t < col_start_[j + 1]; ++t) res[row_idx_[t]] -= val_[t] * x_[j];
  for (int i = 0; i < m_; ++i)
    if (std::abs(res[i] - x_[n_ + i]) > ftol * (1.0 + std::abs(b_[i]))) return Check::Refactor;
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[i];
    if (x_[j] < lo_[j] - ftol || x_[j] > hi_[j] + ftol) return Check::Iterate;
  }
  std::vector<double> true_cost(N_, 0.0);
  for (int j = 0; j < n_; ++j) true_cost[j] = cost_[j];
  compute_duals(true_cost);
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[i];
    if (std::abs(true_cost[j] - dot_column(y_, j)) > opt_.optimality_tol) return Check::Refactor;
  }
  const double tol = opt_.optimality_tol;
  for (int j = 0; j < N_; ++j) {
    const State s = state_[j];
    if (s == State::Basic || lo_[j] == hi_[j]) continue;
    if ((s == State::AtLower && d_[j] < -tol) || (s == State::AtUpper && d_[j] > tol) ||
        (s == State::AtZero && std::abs(d_[j]) > tol))
      return Check::Iterate;
  }
  return Check::Ok;
}

inline LpStatus RevisedSimplex::solve() {
  int refactors = 0, restarts = 0;
  while (true) {
    LpStatus st = run();
    if (st != LpStatus::Optimal) {
      if (since_refactor_ > 0 && refactors < opt_.refinement_rounds) {
        ++refactors;
        reinvert();
        recompute_primal();
        continue;
      }
      status_ = st;
      solved_ = true;
      return st;
    }
    Check c = verify();
    if (c == Check::Ok) {
      status_ = LpStatus::Optimal;
      solved_ = true;
      return status_;
    }
    if (c == Check::Refactor) {
      if (refactors >= opt_.refinement_rounds)
        throw NumericalFailure("residuals above tolerance after refinement; rescale the instance");
      ++refactors;
      reinvert();
      recompute_primal();
    } else if (++restarts > 20) {
      throw NumericalFailure("optimality could not be confirmed; rescale the instance");
    }
  }
}

inline LpSolution RevisedSimplex::solution() const {
  LpSolution s;
  s.status = status_;
  s.iterations = iter_;
  if (status_ != LpStatus::Optimal) return s;
  s.primal.resize(n_);
  s.reduced_costs.resize(n_);
  s.duals.resize(m_);
  for (int j = 0; j < n_; ++j) {
    s.primal[j] = x_[j] * col_scale_[j];
    s.reduced_costs[j] = d_[j] / (obj_scale_ * col_scale_[j]);
    s.objective_value += cost_[j] / (obj_scale_ * col_scale_[j]) * s.primal[j];
  }
  for (int i = 0; i < m_; ++i) {
    s.duals[i] = y_[i] * row_scale_[i] / obj_scale_;
    s.dual_objective += b_[i] / row_scale_[i] * s.duals[i];
  }
  for (int j = 0; j < n_; ++j) s.dual_objective += s.reduced_costs[j] * s.primal[j];
  return s;
}

inline void RevisedSimplex::set_column_bounds(int j, double lower, double upper) {
  if (j < 0 || j >= n_ || lower > upper || std::isnan(lower) || std::isnan(upper))
    throw std::invalid_argument("set_column_bounds: invalid arguments");
  lo_[j] = lower / col_scale_[j];
  hi_[j] = upper / col_scale_[j];
  if (state_[j] != State::Basic) {
    if (std::isfinite(lo_[j]) && (state_[j] != State::AtUpper || !std::isfinite(hi_[j]))) {
      state_[j] = State::AtLower;
      x_[j] = lo_[j];
    } else if (std::isfinite(hi_[j])) {
      state_[j] = State::AtUpper;
      x_[j] = hi_[j];
    } else {
      state_[j] = State::AtZero;
      x_[j] = 0.0;
    }
    recompute_primal();
  }
  solved_ = false;
}

inline std::vector<RhsSegment> RevisedSimplex::parametric_rhs(int row, double max_increase) {
  if (!solved_ || status_ != LpStatus::Optimal)
    throw std::logic_error("parametric_rhs requires an optimal basis");
  if (row < 0 || row >= m_) throw std::invalid_argument("parametric_rhs: bad row");
  std::vector<RhsSegment> out;
  std::vector<double> true_cost(N_, 0.0);
  for (int j = 0; j < n_; ++j) true_cost[j] = cost_[j];
  compute_duals(true_cost);

  const double rs = row_scale_[row];
  double remaining = max_increase * rs;
  std::vector<double> rho(m_);
  const double eps = 1e-11;
  const int limit = 20 * (N_ + 10);
  for (int step = 0; remaining > 0 && step < limit; ++step) {
    for (int i = 0; i < m_; ++i) rho[i] = binv(i, row);
    int r = -1;
    double tmin = kInf;
    bool to_upper = false;
    for (int i = 0; i < m_; ++i) {
      const double a = rho[i];
      if (std::abs(a) <= eps) continue;
      const int j = basis_[i];
      double t;
      bool up;
      if (a > 0 && hi_[j] < kInf) {
        t = (hi_[j] - x_[j]) / a;
        up = true;
      } else if (a < 0 && lo_[j] > -kInf) {
        t = (lo_[j] - x_[j]) / a;
        up = false;
      } else {
        continue;
      }
      t = std::max(t, 0.0);
      if (r < 0 || t < tmin || (t == tmin && std::abs(a) > std::abs(rho[r]))) {
        r = i;
        tmin = t;
        to_upper = up;
      }
    }
    const double len = std::min(tmin, remaining);
    if (len > 0) {
      RhsSegment seg;
      seg.length = len / rs;
      seg.slope = y_[row] * rs / obj_scale_;
      seg.direction.assign(n_, 0.0);
      for (int i = 0; i < m_; ++i)
        if (basis_[i] < n_) seg.direction[basis_[i]] = rho[i] * col_scale_[basis_[i]] * rs;
      out.push_back(std::move(seg));
      for (int i = 0; i < m_; ++i) x_[basis_[i]] += len * rho[i];
      b_[row] += len;
      remaining -= len;
    }
    if (r < 0 || remaining <= 0) break;

    // Dual simplex pivot: the blocking basic leaves at its bound.
    const int p = basis_[r];
    std::copy(&binv_[static_cast<std::size_t>(r) * m_], &binv_[static_cast<std::size_t>(r) * m_] + m_, rowvec_.begin());
    int q = -1;
    double best = kInf, best_abs = 0.0;
    for (int j = 0; j < N_; ++j) {
      const State s = state_[j];
      if (s == State::Basic || lo_[j] == hi_[j]) continue;
      const double a = dot_column(rowvec_, j);
      if (std::abs(a) <= opt_.pivot_tol) continue;
      // x_p moves by -a per unit of x_j; it must move back inside its bounds.
      const bool need_decrease = to_upper;
      bool ok = false;
      if (s == State::AtLower) ok = need_decrease ? a > 0 : a < 0;
      else if (s == State::AtUpper) ok = need_decrease ? a < 0 : a > 0;
      else ok = true;
      if (!ok) continue;
      const double ratio = std::max(0.0, std::abs(d_[j])) / std::abs(a);
      if (ratio < best || (ratio == best && std::abs(a) > best_abs)) {
        best = ratio;
        best_abs = std::abs(a);
        q = j;
      }
    }
    if (q < 0) break;
    ftran(q, alpha_);
    const State leaving = to_upper ? State::AtUpper : State::AtLower;
    pivot(r, q, leaving, true);
    (void)p;
    if (since_refactor_ >= 400) {
      reinvert();
      compute_duals(true_cost);
    }
    if (step % 50 == 49) recompute_primal();
  }
  recompute_primal();
  return out;
}

inline LpSolution solve(const LpProblem& p, const SolverOptions& opt = {}) {
  if (p.num_columns() == 0 && p.num_rows() == 0) {
    LpSolution s;
    s.status = LpStatus::Optimal;
    return s;
  }
  RevisedSimplex rs(p, opt);
  rs.solve();
  return rs.solution();
}

namespace detail {

inline std::string lp_name(const std::string& name, char prefix, int index) {
  std::string out;
  for (char c : name) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') ? c : '_';
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.' || out[0] == 'e' || out[0] == 'E')
    out = std::string(1, prefix) + std::to_string(index) + (out.empty() ? "" : "_" + out);
  return out;
}

}  // namespace detail

/// Writes the problem in CPLEX LP text format for external cross-checks.
inline void write_lp_format(const LpProblem& p, std::ostream& out) {
  auto col = [&](int j) { return detail::lp_name(p.column(j).name, 'x', j); };
  out.precision(17);
  out << "Minimize\n obj:";
  bool any = false;
  for (int j = 0; j < p.num_columns(); ++j) {
    if (p.column(j).cost == 0.0) continue;
    out << (p.column(j).cost < 0 ? " - " : " + ") << std::abs(p.column(j).cost) << ' ' << col(j);
    any = true;
  }
  if (!any) out << " 0 " << (p.num_columns() ? col(0) : "x0");
  out << "\nSubject To\n";
  for (int i = 0; i < p.num_rows(); ++i) {
    const auto& r = p.row(i);
    out << ' ' << detail::lp_name(r.name, 'r', i) << ':';
    if (r.coefficients.empty()) out << " 0 " << (p.num_columns() ? col(0) : "x0");
    for (const auto& [j, v] : r.coefficients) out << (v < 0 ? " - " : " + ") << std::abs(v) << ' ' << col(j);
    out << (r.sense == RowSense::LessEqual ? " <= " : r.sense == RowSense::Equal ? " = " : " >= ") << r.rhs << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < p.num_columns(); ++j) {
    const auto& c = p.column(j);
    if (c.lower == c.upper) {
      out << ' ' << col(j) << " = " << c.lower << '\n';
    } else if (c.lower == -kInf && c.upper == kInf) {
      out << ' ' << col(j) << " free\n";
    } else {
      out << ' ';
      if (c.lower == -kInf)
        out << "-inf";
      else
        out << c.lower;
      out << " <= " << col(j);
      if (c.upper < kInf) out << " <= " << c.upper;
      out << '\n';
    }
  }
  out << "End\n";
}

}  // namespace greenchain::lp

// Dense two-phase tableau simplex.
//
// The spec is first rewritten in standard form  min cbar'y  s.t.  Abar y + sigma*slack = bbar,
// y, slack >= 0: every variable is shifted onto its nearer finite bound (or split when free),
// finite ranges become extra rows, rows are equilibrated to unit max-norm and flipped so that
// bbar >= 0. Rows that had to be flipped receive an artificial column; the initial basis is
// therefore the identity and B^{-1} can be read off the initial-basis columns at any time.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sccvar/conic.hpp"
#include "sccvar/errors.hpp"

namespace sccvar::conic {

namespace {

enum class VarKind { ShiftLower, FlipUpper, Split };

struct ColumnMap {
  VarKind kind;
  double offset;
  int col;
};

constexpr double kPivotTol = 1e-9;
constexpr double kReducedCostTol = 1e-9;

class Tableau {
 public:
  Tableau(Matrix rows, Vector rhs, std::vector<int> initial_basis, int num_structural,
          int first_artificial)
      : num_rows_(static_cast<int>(rows.rows())),
        num_cols_(static_cast<int>(rows.cols())),
        num_structural_(num_structural),
        first_artificial_(first_artificial),
        A0_(rows),
        b0_(rhs),
        basis_(std::move(initial_basis)),
        initial_basis_(basis_) {
    T_.resize(num_rows_ + 1, num_cols_ + 1);
    T_.setZero();
    T_.topLeftCorner(num_rows_, num_cols_) = rows;
    T_.col(num_cols_).head(num_rows_) = rhs;
  }

  int rows() const { return num_rows_; }
  int cols() const { return num_cols_; }
  int first_artificial() const { return first_artificial_; }
  const Matrix& A0() const { return A0_; }
  const Vector& b0() const { return b0_; }
  const std::vector<int>& basis() const { return basis_; }
  const std::vector<int>& initial_basis() const { return initial_basis_; }

  double rhs(int i) const { return T_(i, num_cols_); }
  double entry(int i, int j) const { return T_(i, j); }
  double reduced_cost(int j) const { return T_(num_rows_, j); }
  /// Current objective value (the tableau stores its negative).
  double objective() const { return -T_(num_rows_, num_cols_); }

  void set_costs(const Vector& cost) {
    cost_ = cost;
    T_.row(num_rows_).setZero();
    T_.row(num_rows_).head(num_cols_) = cost.transpose();
    for (int i = 0; i < num_rows_; ++i) {
      const double cb = cost(basis_[i]);
      if (cb != 0.0) T_.row(num_rows_) -= cb * T_.row(i);
    }
  }
  const Vector& costs() const { return cost_; }

  void pivot(int p, int q) {
    const double piv = T_(p, q);
    T_.row(p) /= piv;
    Eigen::RowVectorXd pivot_row = T_.row(p);
    Vector column = T_.col(q);
    column(p) = 0.0;
    T_.noalias() -= column * pivot_row;
    T_(p, q) = 1.0;
    for (int r = 0; r <= num_rows_; ++r)
      if (r != p) T_(r, q) = 0.0;
    basis_[p] = q;
  }

  /// Duals w = c_B' B^{-1} read from the reduced costs of the initial-basis columns.
  Vector duals() const {
    Vector w(num_rows_);
    for (int i = 0; i < num_rows_; ++i) {
      const int j = initial_basis_[i];
      w(i) = cost_(j) - reduced_cost(j);
    }
    return w;
  }

  Vector basic_solution() const {
    Vector x = Vector::Zero(num_cols_);
    for (int i = 0; i < num_rows_; ++i) x(basis_[i]) = std::max(0.0, rhs(i));
    return x;
  }

 private:
  int num_rows_;
  int num_cols_;
  int num_structural_;
  int first_artificial_;
  Matrix A0_;
  Vector b0_;
  Matrix T_;
  Vector cost_;
  std::vector<int> basis_;
  std::vector<int> initial_basis_;
};

enum class PhaseOutcome { Optimal, Unbounded, IterationLimit };

struct PhaseResult {
  PhaseOutcome outcome;
  int entering = -1;
};

PhaseResult run_phase(Tableau& t, int allowed_cols, int& iterations, int max_iterations) {
  const int m = t.rows();
  const int degenerate_limit = 10 * (t.rows() + t.cols());
  int degenerate_run = 0;
  bool bland = false;
  std::vector<char> is_basic(t.cols(), 0);
  for (int b : t.basis()) is_basic[b] = 1;

  while (true) {
    if (iterations >= max_iterations) return {PhaseOutcome::IterationLimit};
    int q = -1;
    double best = -kReducedCostTol;
    for (int j = 0; j < allowed_cols; ++j) {
      if (is_basic[j]) continue;
      const double d = t.reduced_cost(j);
      if (d < best) {
        q = j;
        if (bland) break;
        best = d;
      }
    }
    if (q < 0) return {PhaseOutcome::Optimal};

    int p = -1;
    double best_ratio = kInf;
    for (int i = 0; i < m; ++i) {
      const double a = t.entry(i, q);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(0.0, t.rhs(i)) / a;
      if (p < 0 || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
        p = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
        const bool take = bland ? t.basis()[i] < t.basis()[p] : a > t.entry(p, q);
        if (take) {
          p = i;
          best_ratio = std::min(best_ratio, ratio);
        }
      }
    }
    if (p < 0) return {PhaseOutcome::Unbounded, q};

    if (best_ratio <= 1e-12) {
      if (++degenerate_run > degenerate_limit) bland = true;
    } else {
      degenerate_run = 0;
    }
    is_basic[t.basis()[p]] = 0;
    t.pivot(p, q);
    is_basic[q] = 1;
    ++iterations;
  }
}

/// Recomputes the basic solution and duals from the original data to shed accumulated
/// tableau round-off. Returns false when the refactored basis disagrees with the tableau.
bool polish(const Tableau& t, Vector& x, Vector& w) {
  const int m = t.rows();
  if (m == 0) return true;
  Matrix B(m, m);
  Vector cb(m);
  for (int i = 0; i < m; ++i) {
    B.col(i) = t.A0().col(t.basis()[i]);
    cb(i) = t.costs()(t.basis()[i]);
  }
  Eigen::PartialPivLU<Matrix> lu(B);
  Vector xb = lu.solve(t.b0());
  Vector wp = lu.transpose().solve(cb);
  // A wide range row (e.g. a far-away floor) puts a huge entry in b0; refinement keeps that
  // magnitude from smearing into the other components.
  for (int round = 0; round < 3; ++round) {
    const Vector step = lu.solve(t.b0() - B * xb);
    xb += step;
    const Vector dw = cb - B.transpose() * wp;
    const Vector wstep = lu.transpose().solve(dw);
    wp += wstep;
  }
  if (!xb.allFinite() || !wp.allFinite()) return false;
  const double scale = 1.0 + t.b0().lpNorm<Eigen::Infinity>();
  if ((B * xb - t.b0()).lpNorm<Eigen::Infinity>() > 1e-9 * scale) return false;
  if (xb.minCoeff() < -1e-7 * scale) return false;
  Vector xp = Vector::Zero(t.cols());
  for (int i = 0; i < m; ++i) xp(t.basis()[i]) = std::max(0.0, xb(i));
  const Vector reduced = t.costs().head(t.first_artificial()) -
                         t.A0().leftCols(t.first_artificial()).transpose() * wp;
  if (t.first_artificial() > 0 && reduced.minCoeff() < -1e-7 * (1.0 + t.costs().lpNorm<Eigen::Infinity>()))
    return false;
  x = std::move(xp);
  w = std::move(wp);
  return true;
}

}  // namespace

SolveResult solve_lp(const LinearProgramSpec& spec, const Tolerances& tol) {
  spec.check();
  const int n = spec.num_variables();
  const int m = static_cast<int>(spec.A.rows());

  SolveResult result;
  result.z = Vector::Zero(n);
  result.row_duals = Vector::Zero(m);

  // Variable substitution.
  std::vector<ColumnMap> map(n);
  int ny = 0;
  std::vector<std::pair<int, double>> range_rows;  // (column, width)
  for (int j = 0; j < n; ++j) {
    const double lo = spec.lower(j);
    const double up = spec.upper(j);
    if (lo > up) {
      // Crossed bounds are their own certificate.
      result.status = SolveStatus::Infeasible;
      return result;
    }
    const bool flo = std::isfinite(lo);
    const bool fup = std::isfinite(up);
    if (flo && (!fup || std::abs(lo) <= std::abs(up))) {
      map[j] = {VarKind::ShiftLower, lo, ny++};
      if (fup) range_rows.emplace_back(map[j].col, up - lo);
    } else if (fup) {
      map[j] = {VarKind::FlipUpper, up, ny++};
      if (flo) range_rows.emplace_back(map[j].col, up - lo);
    } else {
      map[j] = {VarKind::Split, 0.0, ny};
      ny += 2;
    }
  }

  Vector cbar = Vector::Zero(ny);
  double constant = 0.0;
  for (int j = 0; j < n; ++j) {
    const double c = spec.objective(j);
    switch (map[j].kind) {
      case VarKind::ShiftLower:
        cbar(map[j].col) = c;
        constant += c * map[j].offset;
        break;
      case VarKind::FlipUpper:
        cbar(map[j].col) = -c;
        constant += c * map[j].offset;
        break;
      case VarKind::Split:
        cbar(map[j].col) = c;
        cbar(map[j].col + 1) = -c;
        break;
    }
  }

  const int total_rows = m + static_cast<int>(range_rows.size());
  Matrix Abar = Matrix::Zero(total_rows, ny);
  Vector bbar(total_rows);
  for (int i = 0; i < m; ++i) {
    double rhs = spec.b(i);
    for (int j = 0; j < n; ++j) {
      const double a = spec.A(i, j);
      if (a == 0.0) continue;
      switch (map[j].kind) {
        case VarKind::ShiftLower:
          Abar(i, map[j].col) += a;
          rhs -= a * map[j].offset;
          break;
        case VarKind::FlipUpper:
          Abar(i, map[j].col) -= a;
          rhs -= a * map[j].offset;
          break;
        case VarKind::Split:
          Abar(i, map[j].col) += a;
          Abar(i, map[j].col + 1) -= a;
          break;
      }
    }
    bbar(i) = rhs;
  }
  for (std::size_t r = 0; r < range_rows.size(); ++r) {
    Abar(m + static_cast<int>(r), range_rows[r].first) = 1.0;
    bbar(m + static_cast<int>(r)) = range_rows[r].second;
  }

  // Equilibrate, drop empty rows, flip negative right-hand sides.
  std::vector<int> kept;
  std::vector<double> row_scale(total_rows, 0.0);
  std::vector<double> row_sign(total_rows, 1.0);
  for (int i = 0; i < total_rows; ++i) {
    const double norm = ny > 0 ? Abar.row(i).lpNorm<Eigen::Infinity>() : 0.0;
    if (norm == 0.0) {
      if (bbar(i) < -tol.feas_tol) {
        result.status = SolveStatus::Infeasible;
        return result;
      }
      continue;
    }
    row_scale[i] = 1.0 / norm;
    if (bbar(i) * row_scale[i] < 0.0) row_sign[i] = -1.0;
    kept.push_back(i);
  }
  const int mr = static_cast<int>(kept.size());
  int num_art = 0;
  for (int i : kept)
    if (row_sign[i] < 0.0) ++num_art;

  const int first_slack = ny;
  const int first_art = ny + mr;
  const int ncols = ny + mr + num_art;
  Matrix rows = Matrix::Zero(mr, ncols);
  Vector rhs(mr);
  std::vector<int> basis(mr);
  Vector phase1_cost = Vector::Zero(ncols);
  {
    int art = 0;
    for (int r = 0; r < mr; ++r) {
      const int i = kept[r];
      const double factor = row_sign[i] * row_scale[i];
      rows.row(r).head(ny) = factor * Abar.row(i);
      rows(r, first_slack + r) = row_sign[i];
      rhs(r) = factor * bbar(i);
      if (row_sign[i] < 0.0) {
        rows(r, first_art + art) = 1.0;
        basis[r] = first_art + art;
        phase1_cost(first_art + art) = 1.0;
        ++art;
      } else {
        basis[r] = first_slack + r;
      }
    }
  }

  Tableau t(rows, rhs, basis, ny, first_art);
  int iterations = 0;
  const int max_iterations = 50 * (mr + ncols) + 1000;

  if (num_art > 0) {
    t.set_costs(phase1_cost);
    const PhaseResult p1 = run_phase(t, ncols, iterations, max_iterations);
    result.iterations = iterations;
    if (p1.outcome == PhaseOutcome::IterationLimit) {
      result.status = SolveStatus::IterationLimit;
      return result;
    }
    // Only rows carrying an artificial contribute to the phase-1 objective; a huge range
    // row elsewhere must not loosen the threshold.
    double art_rhs = 0.0;
    for (int r = 0; r < mr; ++r)
      if (row_sign[kept[r]] < 0.0) art_rhs = std::max(art_rhs, std::abs(rhs(r)));
    const double infeasibility = t.objective();
    if (infeasibility > 1e-9 * (1.0 + art_rhs)) {
      // Farkas certificate: w'A0 <= 0 on every non-artificial column and w'b0 > 0.
      const Vector w = t.duals();
      const Vector wa = t.A0().leftCols(first_art).transpose() * w;
      const double wb = w.dot(t.b0());
      const double scale = 1.0 + w.lpNorm<Eigen::Infinity>();
      if (wb > 1e-10 && (first_art == 0 || wa.maxCoeff() <= 1e-9 * scale)) {
        result.status = SolveStatus::Infeasible;
      } else {
        result.status = SolveStatus::NumericalError;
      }
      return result;
    }
    // Drive basic artificials out wherever a usable pivot exists.
    for (int r = 0; r < mr; ++r) {
      if (t.basis()[r] < first_art) continue;
      int best = -1;
      double best_abs = 1e-7;
      for (int j = 0; j < first_art; ++j) {
        const double a = std::abs(t.entry(r, j));
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best >= 0) t.pivot(r, best);
    }
  }

  Vector phase2_cost = Vector::Zero(ncols);
  phase2_cost.head(ny) = cbar;
  t.set_costs(phase2_cost);
  const PhaseResult p2 = run_phase(t, first_art, iterations, max_iterations);
  result.iterations = iterations;
  if (p2.outcome == PhaseOutcome::IterationLimit) {
    result.status = SolveStatus::IterationLimit;
    return result;
  }
  if (p2.outcome == PhaseOutcome::Unbounded) {
    // Ray: +1 on the entering column, -T(i,q) on the basics. Verify A0 d = 0, c'd < 0.
    Vector d = Vector::Zero(ncols);
    d(p2.entering) = 1.0;
    for (int r = 0; r < mr; ++r) d(t.basis()[r]) -= t.entry(r, p2.entering);
    const double slope = phase2_cost.dot(d);
    const double resid = mr > 0 ? (t.A0() * d).lpNorm<Eigen::Infinity>() : 0.0;
    result.status = (slope < 0.0 && resid <= 1e-7 * (1.0 + d.lpNorm<Eigen::Infinity>()))
                        ? SolveStatus::Unbounded
                        : SolveStatus::NumericalError;
    return result;
  }

  Vector xbar = t.basic_solution();
  Vector w = t.duals();
  polish(t, xbar, w);

  for (int j = 0; j < n; ++j) {
    const ColumnMap& c = map[j];
    switch (c.kind) {
      case VarKind::ShiftLower:
        result.z(j) = c.offset + xbar(c.col);
        break;
      case VarKind::FlipUpper:
        result.z(j) = c.offset - xbar(c.col);
        break;
      case VarKind::Split:
        result.z(j) = xbar(c.col) - xbar(c.col + 1);
        break;
    }
  }
  // Clamp round-off at the bounds.
  for (int j = 0; j < n; ++j) result.z(j) = std::clamp(result.z(j), spec.lower(j), spec.upper(j));

  const double primal = cbar.dot(xbar.head(ny)) + constant;
  const double dual = w.dot(t.b0()) + constant;
  result.objective = spec.objective.dot(result.z);
  result.dual_objective = dual;

  for (int r = 0; r < mr; ++r) {
    const int i = kept[r];
    if (i < m) result.row_duals(i) = std::max(0.0, -row_sign[i] * w(r) * row_scale[i]);
  }

  double presid = 0.0;
  double presid_rel = 0.0;
  for (int i = 0; i < m; ++i) {
    const double v = spec.A.row(i).dot(result.z) - spec.b(i);
    if (v <= 0.0) continue;
    presid = std::max(presid, v);
    const double size = 1.0 + std::abs(spec.b(i)) + spec.A.row(i).cwiseAbs().dot(result.z.cwiseAbs());
    presid_rel = std::max(presid_rel, v / size);
  }
  result.primal_residual = presid;
  const Vector reduced = phase2_cost.head(first_art) - t.A0().leftCols(first_art).transpose() * w;
  result.dual_residual = first_art > 0 ? std::max(0.0, -reduced.minCoeff()) : 0.0;

  const double gap = std::abs(primal - dual);
  if (presid_rel > 1e-9 || gap > tol.opt_tol * (1.0 + std::abs(primal)) ||
      result.dual_residual > 1e-7 * (1.0 + cbar.lpNorm<Eigen::Infinity>())) {
    result.status = SolveStatus::NumericalError;
    return result;
  }
  result.status = SolveStatus::Optimal;
  return result;
}

}  // namespace sccvar::conic

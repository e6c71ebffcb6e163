// Homogeneous self-dual interior point for  min c'x  s.t.  G x + s = h,  s in K,
// K = nonnegative orthant x product of second-order cones. Nesterov-Todd scaling,
// Mehrotra predictor-corrector, normal equations with sparse LDL' and iterative
// refinement on the unreduced system.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "sccvar/conic.hpp"

namespace sccvar::conic {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct ConeLayout {
  int orthant = 0;
  std::vector<int> soc_offset;
  std::vector<int> soc_dim;
  int total = 0;
  int degree() const { return orthant + static_cast<int>(soc_dim.size()); }
};

struct SocScaling {
  double beta = 1.0;
  Vector w;  // normalized NT point, w0^2 - |w1|^2 = 1
};

struct Scaling {
  Vector d;  // orthant: W = diag(d)
  std::vector<SocScaling> soc;
  Vector lambda;
};

double jnorm_sq(const Eigen::Ref<const Vector>& u) {
  return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm();
}

// W v for one SOC block: beta * [w0 w1'; w1 I + w1 w1'/(1+w0)] v.
void soc_apply_w(const SocScaling& sc, const Eigen::Ref<const Vector>& v, Eigen::Ref<Vector> out,
                 bool inverse) {
  const int k = static_cast<int>(v.size());
  const double w0 = sc.w(0);
  const auto w1 = sc.w.tail(k - 1);
  const auto v1 = v.tail(k - 1);
  const double sign = inverse ? -1.0 : 1.0;
  const double factor = inverse ? 1.0 / sc.beta : sc.beta;
  const double w1v1 = w1.dot(v1);
  const double out0 = w0 * v(0) + sign * w1v1;
  Vector out1 = v1 + (sign * v(0) + w1v1 / (1.0 + w0)) * w1;
  out(0) = factor * out0;
  out.tail(k - 1) = factor * out1;
}

Vector apply_w(const ConeLayout& layout, const Scaling& sc, const Vector& v, bool inverse) {
  Vector out(v.size());
  if (layout.orthant > 0) {
    if (inverse)
      out.head(layout.orthant) = v.head(layout.orthant).cwiseQuotient(sc.d);
    else
      out.head(layout.orthant) = v.head(layout.orthant).cwiseProduct(sc.d);
  }
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    soc_apply_w(sc.soc[b], v.segment(o, k), out.segment(o, k), inverse);
  }
  return out;
}

Vector jordan_product(const ConeLayout& layout, const Vector& u, const Vector& v) {
  Vector out(u.size());
  if (layout.orthant > 0)
    out.head(layout.orthant) = u.head(layout.orthant).cwiseProduct(v.head(layout.orthant));
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    out(o) = u.segment(o, k).dot(v.segment(o, k));
    out.segment(o + 1, k - 1) = u(o) * v.segment(o + 1, k - 1) + v(o) * u.segment(o + 1, k - 1);
  }
  return out;
}

// Solves u o x = r.
Vector jordan_divide(const ConeLayout& layout, const Vector& u, const Vector& r) {
  Vector x(u.size());
  if (layout.orthant > 0)
    x.head(layout.orthant) = r.head(layout.orthant).cwiseQuotient(u.head(layout.orthant));
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    const auto ub = u.segment(o, k);
    const auto rb = r.segment(o, k);
    const double x0 = (ub(0) * rb(0) - ub.tail(k - 1).dot(rb.tail(k - 1))) / jnorm_sq(ub);
    x(o) = x0;
    x.segment(o + 1, k - 1) = (rb.tail(k - 1) - x0 * ub.tail(k - 1)) / ub(0);
  }
  return x;
}

Vector identity_element(const ConeLayout& layout) {
  Vector e = Vector::Zero(layout.total);
  e.head(layout.orthant).setOnes();
  for (int o : layout.soc_offset) e(o) = 1.0;
  return e;
}

// Largest t with u + t*e in the cone boundary shift sense: min t such that u + t e in K.
double cone_shift(const ConeLayout& layout, const Vector& u) {
  double t = -kInf;
  for (int i = 0; i < layout.orthant; ++i) t = std::max(t, -u(i));
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    t = std::max(t, u.segment(o + 1, k - 1).norm() - u(o));
  }
  return t;
}

// Largest step a >= 0 (up to +inf) keeping u + a d in the cone.
double max_step(const ConeLayout& layout, const Vector& u, const Vector& d) {
  double amax = kInf;
  for (int i = 0; i < layout.orthant; ++i)
    if (d(i) < 0.0) amax = std::min(amax, -u(i) / d(i));
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    const auto ub = u.segment(o, k);
    const auto db = d.segment(o, k);
    const double a = jnorm_sq(db);
    const double bh = ub(0) * db(0) - ub.tail(k - 1).dot(db.tail(k - 1));
    const double c = std::max(jnorm_sq(ub), 0.0);
    double root = kInf;
    const double disc = bh * bh - a * c;
    if (std::abs(a) <= 1e-300) {
      if (bh < 0.0) root = -c / (2.0 * bh);
    } else if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -(bh + (bh >= 0.0 ? sq : -sq));
      const double r1 = q / a;
      const double r2 = q != 0.0 ? c / q : kInf;
      if (r1 > 0.0) root = std::min(root, r1);
      if (r2 > 0.0) root = std::min(root, r2);
    }
    // The scalar part must also stay nonnegative.
    if (db(0) < 0.0) root = std::min(root, -ub(0) / db(0));
    amax = std::min(amax, root);
  }
  return amax;
}

Scaling compute_scaling(const ConeLayout& layout, const Vector& s, const Vector& z) {
  Scaling sc;
  sc.d.resize(layout.orthant);
  sc.lambda.resize(layout.total);
  for (int i = 0; i < layout.orthant; ++i) {
    sc.d(i) = std::sqrt(s(i) / z(i));
    sc.lambda(i) = std::sqrt(s(i) * z(i));
  }
  sc.soc.resize(layout.soc_dim.size());
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    const double sn = std::sqrt(std::max(jnorm_sq(s.segment(o, k)), 1e-300));
    const double zn = std::sqrt(std::max(jnorm_sq(z.segment(o, k)), 1e-300));
    const Vector sbar = s.segment(o, k) / sn;
    const Vector zbar = z.segment(o, k) / zn;
    const double gamma = std::sqrt(std::max((1.0 + sbar.dot(zbar)) / 2.0, 1e-300));
    Vector w(k);
    w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
    w.tail(k - 1) = (sbar.tail(k - 1) - zbar.tail(k - 1)) / (2.0 * gamma);
    SocScaling& ss = sc.soc[b];
    ss.beta = std::sqrt(sn / zn);
    ss.w = w;
    Vector lam(k);
    soc_apply_w(ss, z.segment(o, k), lam, false);
    sc.lambda.segment(o, k) = lam;
  }
  return sc;
}

// Block-diagonal W^{-1} as a sparse matrix.
SpMat winv_matrix(const ConeLayout& layout, const Scaling& sc) {
  std::vector<Triplet> trip;
  trip.reserve(layout.orthant + 9 * layout.soc_dim.size());
  for (int i = 0; i < layout.orthant; ++i) trip.emplace_back(i, i, 1.0 / sc.d(i));
  for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    Vector e = Vector::Zero(k);
    Vector col(k);
    for (int j = 0; j < k; ++j) {
      e.setZero();
      e(j) = 1.0;
      soc_apply_w(sc.soc[b], e, col, true);
      for (int i = 0; i < k; ++i) trip.emplace_back(o + i, o + j, col(i));
    }
  }
  SpMat M(layout.total, layout.total);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

class KktSolver {
 public:
  KktSolver(const SpMat& G, const ConeLayout& layout) : G_(G), layout_(layout) {}

  bool factor(const Scaling& sc) {
    sc_ = &sc;
    Winv_ = winv_matrix(layout_, sc);
    Ghat_ = Winv_ * G_;
    SpMat M = SpMat(Ghat_.transpose()) * Ghat_;
    const int n = static_cast<int>(G_.cols());
    double diag_max = 0.0;
    for (int j = 0; j < n; ++j) diag_max = std::max(diag_max, M.coeff(j, j));
    reg_ = 1e-13 * std::max(1.0, diag_max);
    for (int j = 0; j < n; ++j) M.coeffRef(j, j) += reg_;
    M.makeCompressed();
    ldlt_.compute(M);
    return ldlt_.info() == Eigen::Success;
  }

  // [0 G'; G -H] [dx; dz] = [b1; b2] with H = W W.
  void solve(const Vector& b1, const Vector& b2, Vector& dx, Vector& dz) const {
    reduced_solve(b1, b2, dx, dz);
    for (int round = 0; round < 3; ++round) {
      const Vector e1 = b1 - G_.transpose() * dz;
      const Vector e2 =
          b2 - (G_ * dx - apply_w(layout_, *sc_, apply_w(layout_, *sc_, dz, false), false));
      const double err = std::max(e1.lpNorm<Eigen::Infinity>(), e2.lpNorm<Eigen::Infinity>());
      const double ref = 1.0 + std::max(b1.lpNorm<Eigen::Infinity>(), b2.lpNorm<Eigen::Infinity>());
      if (err <= 1e-15 * ref) break;
      Vector cx, cz;
      reduced_solve(e1, e2, cx, cz);
      dx += cx;
      dz += cz;
    }
  }

 private:
  void reduced_solve(const Vector& b1, const Vector& b2, Vector& dx, Vector& dz) const {
    const Vector wb2 = Winv_ * b2;
    const Vector rhs = b1 + Ghat_.transpose() * wb2;
    dx = ldlt_.solve(rhs);
    dz = Winv_ * (Ghat_ * dx - wb2);
  }

  const SpMat& G_;
  const ConeLayout& layout_;
  const Scaling* sc_ = nullptr;
  SpMat Winv_;
  SpMat Ghat_;
  double reg_ = 0.0;
  Eigen::SimplicialLDLT<SpMat> ldlt_;
};

struct Direction {
  Vector dx, dz, ds;
  double dtau = 0.0, dkappa = 0.0;
};

}  // namespace

SolveResult solve_socp(const SocpSpec& spec, const Tolerances& tol) {
  spec.check();
  const int n = spec.num_variables();
  const int mA = static_cast<int>(spec.A.rows());

  ConeLayout layout;
  layout.orthant = mA;
  int offset = mA;
  for (const ConeBlock& cb : spec.cones) {
    const int k = 1 + static_cast<int>(cb.F.rows());
    layout.soc_offset.push_back(offset);
    layout.soc_dim.push_back(k);
    offset += k;
  }
  layout.total = offset;
  const int m = layout.total;

  SolveResult result;
  result.z = Vector::Zero(n);
  result.row_duals = Vector::Zero(mA);

  // Assemble G, h with per-row (orthant) and per-block (SOC) equilibration.
  Vector row_scale(m);
  std::vector<Triplet> trip;
  Vector h(m);
  for (int i = 0; i < mA; ++i) {
    const double nrm = spec.A.row(i).lpNorm<Eigen::Infinity>();
    const double sc = nrm > 0.0 ? 1.0 / nrm : 1.0;
    row_scale(i) = sc;
    for (int j = 0; j < n; ++j)
      if (spec.A(i, j) != 0.0) trip.emplace_back(i, j, sc * spec.A(i, j));
    h(i) = sc * spec.b(i);
  }
  for (std::size_t b = 0; b < spec.cones.size(); ++b) {
    const ConeBlock& cb = spec.cones[b];
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    const double nrm = std::max(cb.g.lpNorm<Eigen::Infinity>(), cb.F.lpNorm<Eigen::Infinity>());
    const double sc = nrm > 0.0 ? 1.0 / nrm : 1.0;
    row_scale.segment(o, k).setConstant(sc);
    for (int j = 0; j < n; ++j)
      if (cb.g(j) != 0.0) trip.emplace_back(o, j, -sc * cb.g(j));
    h(o) = sc * cb.h;
    for (int r = 0; r < k - 1; ++r) {
      for (int j = 0; j < n; ++j)
        if (cb.F(r, j) != 0.0) trip.emplace_back(o + 1 + r, j, -sc * cb.F(r, j));
      h(o + 1 + r) = sc * cb.f(r);
    }
  }
  SpMat G(m, n);
  G.setFromTriplets(trip.begin(), trip.end());
  G.makeCompressed();
  const Vector& c = spec.objective;

  // Variables that appear in no row: free and decoupled.
  {
    Vector colnorm = Vector::Zero(n);
    for (int j = 0; j < n; ++j)
      for (SpMat::InnerIterator it(G, j); it; ++it) colnorm(j) = std::max(colnorm(j), std::abs(it.value()));
    for (int j = 0; j < n; ++j) {
      if (colnorm(j) == 0.0 && c(j) != 0.0) {
        result.status = SolveStatus::Unbounded;
        return result;
      }
    }
  }
  if (m == 0) {
    result.status = SolveStatus::Optimal;
    return result;
  }

  const double hnorm = std::max(1.0, h.lpNorm<Eigen::Infinity>());
  const double cnorm = std::max(1.0, c.lpNorm<Eigen::Infinity>());
  const Vector e = identity_element(layout);

  KktSolver kkt(G, layout);

  // Starting point: least-squares primal and least-norm dual, shifted into the cone.
  Vector x, s, z;
  {
    Scaling unit;
    unit.d = Vector::Ones(layout.orthant);
    unit.soc.resize(layout.soc_dim.size());
    for (std::size_t b = 0; b < layout.soc_dim.size(); ++b) {
      unit.soc[b].beta = 1.0;
      unit.soc[b].w = Vector::Zero(layout.soc_dim[b]);
      unit.soc[b].w(0) = 1.0;
    }
    if (!kkt.factor(unit)) {
      result.status = SolveStatus::NumericalError;
      return result;
    }
    Vector dz;
    kkt.solve(Vector::Zero(n), h, x, dz);
    s = h - G * x;
    Vector xz;
    kkt.solve(-c, Vector::Zero(m), xz, z);
    const double sp = cone_shift(layout, s);
    if (sp >= -1e-8 * hnorm) s += (1.0 + std::max(sp, 0.0)) * e;
    const double zp = cone_shift(layout, z);
    if (zp >= -1e-8 * cnorm) z += (1.0 + std::max(zp, 0.0)) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const int max_iterations = 200;
  const double eps = tol.opt_tol;
  SolveStatus status = SolveStatus::IterationLimit;
  int it = 0;
  for (; it <= max_iterations; ++it) {
    const Vector rx = G.transpose() * z + c * tau;
    const Vector rz = s + G * x - h * tau;
    const double cx = c.dot(x);
    const double hz = h.dot(z);
    const double rt = kappa + cx + hz;

    const double pres = rz.lpNorm<Eigen::Infinity>() / tau / hnorm;
    const double dres = rx.lpNorm<Eigen::Infinity>() / tau / cnorm;
    const double pcost = cx / tau;
    const double dcost = -hz / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double gscale = 1.0 + std::min(std::abs(pcost), std::abs(dcost));
    if (pres <= eps && dres <= eps && gap <= eps * gscale &&
        std::abs(pcost - dcost) <= eps * gscale) {
      status = SolveStatus::Optimal;
      break;
    }
    if (hz < 0.0) {
      const Vector gz = G.transpose() * z;
      if (gz.lpNorm<Eigen::Infinity>() / (-hz) <= eps) {
        status = SolveStatus::Infeasible;
        break;
      }
    }
    if (cx < 0.0) {
      const Vector gs = G * x + s;
      if (gs.lpNorm<Eigen::Infinity>() / (-cx) <= eps) {
        status = SolveStatus::Unbounded;
        break;
      }
    }
    if (it == max_iterations) break;

    const Scaling sc = compute_scaling(layout, s, z);
    if (!kkt.factor(sc)) {
      status = SolveStatus::NumericalError;
      break;
    }
    const double mu = (s.dot(z) + tau * kappa) / (layout.degree() + 1);

    Vector dx2, dz2;
    kkt.solve(-c, h, dx2, dz2);
    const double denom_tau = c.dot(dx2) + h.dot(dz2) - kappa / tau;

    auto direction = [&](double eta, const Vector& rc, double rk) {
      Direction d;
      const Vector u = jordan_divide(layout, sc.lambda, rc);
      const Vector wu = apply_w(layout, sc, u, false);
      const Vector b1 = -eta * rx;
      const Vector b2 = -eta * rz - wu;
      Vector dx1, dz1;
      kkt.solve(b1, b2, dx1, dz1);
      d.dtau = (-eta * rt - c.dot(dx1) - h.dot(dz1) - rk / tau) / denom_tau;
      d.dx = dx1 + d.dtau * dx2;
      d.dz = dz1 + d.dtau * dz2;
      d.ds = apply_w(layout, sc, u - apply_w(layout, sc, d.dz, false), false);
      d.dkappa = (rk - kappa * d.dtau) / tau;
      return d;
    };
    auto step_length = [&](const Direction& d) {
      double a = std::min(max_step(layout, s, d.ds), max_step(layout, z, d.dz));
      if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Vector lam_sq = jordan_product(layout, sc.lambda, sc.lambda);
    const Direction aff = direction(1.0, -lam_sq, -tau * kappa);
    const double a_aff = std::min(1.0, step_length(aff));
    const double sigma = std::pow(1.0 - a_aff, 3);

    const Vector ds_scaled = apply_w(layout, sc, aff.ds, true);
    const Vector dz_scaled = apply_w(layout, sc, aff.dz, false);
    const Vector rc = -lam_sq - jordan_product(layout, ds_scaled, dz_scaled) + sigma * mu * e;
    const double rk = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction d = direction(1.0 - sigma, rc, rk);
    const double a = std::min(1.0, 0.99 * step_length(d));
    if (!(a > 1e-12)) {
      status = SolveStatus::NumericalError;
      break;
    }
    x += a * d.dx;
    z += a * d.dz;
    s += a * d.ds;
    tau += a * d.dtau;
    kappa += a * d.dkappa;
    if (!x.allFinite() || !z.allFinite() || !s.allFinite() || !(tau > 0.0) || !(kappa > 0.0)) {
      status = SolveStatus::NumericalError;
      break;
    }
  }
  result.iterations = it;
  result.status = status;

  if (status == SolveStatus::Infeasible || status == SolveStatus::Unbounded) return result;

  result.z = x / tau;
  const Vector zz = z / tau;
  // Undo the row equilibration for the duals: z_orig = D z_scaled.
  const Vector z_orig = zz.cwiseProduct(row_scale);
  result.row_duals = z_orig.head(mA);
  result.objective = c.dot(result.z);
  result.dual_objective = -h.dot(zz);

  // Residuals against the unscaled data.
  double presid = 0.0;
  if (mA > 0) presid = std::max(0.0, (spec.A * result.z - spec.b).maxCoeff());
  for (const ConeBlock& cb : spec.cones) {
    const double lhs = (cb.F * result.z + cb.f).norm();
    const double rhs = cb.g.dot(result.z) + cb.h;
    presid = std::max(presid, lhs - rhs);
  }
  result.primal_residual = presid;
  Vector grad = c;
  if (mA > 0) grad += spec.A.transpose() * z_orig.head(mA);
  for (std::size_t b = 0; b < spec.cones.size(); ++b) {
    const ConeBlock& cb = spec.cones[b];
    const int o = layout.soc_offset[b];
    const int k = layout.soc_dim[b];
    const auto zb = z_orig.segment(o, k);
    grad += -zb(0) * cb.g - cb.F.transpose() * zb.tail(k - 1);
  }
  result.dual_residual = grad.lpNorm<Eigen::Infinity>() / cnorm;
  return result;
}

}  // namespace sccvar::conic

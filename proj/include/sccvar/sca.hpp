#pragma once

#include <vector>

#include "sccvar/conic.hpp"
#include "sccvar/model.hpp"
#include "sccvar/trace.hpp"

namespace sccvar {

/// First-order expansion of (alpha_i - g_ij(x))^2 around (x_k, alpha_k):
///   value + slope_alpha * (alpha_i - alpha_k_i) + grad_x(i,j) . (x - x_k).
struct DcLinearization {
  Vector x_anchor;
  Vector alpha_anchor;
  /// (alpha_k_i - g_ij(x_k)), one row per scenario.
  Matrix residual;

  double value(int i, int j) const { return residual(i, j) * residual(i, j); }
  double slope_alpha(int i, int j) const { return 2.0 * residual(i, j); }
  /// Gradient in x, given the row gradient w_ij.
  Vector grad_x(int i, int j, const Vector& w) const { return -2.0 * residual(i, j) * w; }
  double evaluate(int i, int j, double alpha, const Vector& x, const Vector& w) const;
};

DcLinearization linearize(const CcpInstance& instance, const Vector& x_k, const Vector& alpha_k);

/// Column layout of the subproblem: x, beta, s, then one alpha per relaxed scenario.
struct DcLayout {
  int n = 0;
  int num_scenarios = 0;
  std::vector<int> alpha_column;  // -1 for pinned scenarios

  int beta() const { return n; }
  int s(int i) const { return n + 1 + i; }
  int size() const;
};

DcLayout dc_layout(const CcpInstance& instance, const std::vector<bool>& relax);

/// Convex subproblem with relaxed scenarios carrying a free alpha_i in [1, alpha_max].
/// With an empty relax set the spec has no cones and equals the CVaR LP.
conic::SocpSpec dc_subproblem(const CcpInstance& instance, const Vector& x_k,
                              const Vector& alpha_k, const std::vector<bool>& relax,
                              const Tolerances& tol = {});

struct ScaAnchor {
  Vector x;
  Vector alpha;
  double beta = 0.0;
  Vector s;
};

/// Sequential convex approximation with every scenario relaxed. x0 is the CVaR solution
/// (beta0, s0 its multipliers) and the first alpha is all ones.
IterationTrace algorithm2(const CcpInstance& instance, const Vector& x0,
                          const Tolerances& tol = {});

/// Hybrid: relax only I_k = {g_max < delta2}, then a fixed-alpha LP at the final alpha and
/// Algorithm 1 from there. Records of the three stages are concatenated.
IterationTrace algorithm3_hybrid(const CcpInstance& instance, const Vector& x0,
                                 const Tolerances& tol = {});

}  // namespace sccvar

#pragma once

// Small hand-checkable instances, written in the canonical
// g = W x + d form. Integer domains are relaxed to x >= 0.

#include <vector>

#include "sccvar/model.hpp"

namespace fixtures {

using sccvar::CcpInstance;
using sccvar::Matrix;
using sccvar::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// One row per scenario: g_i(x) = w_i . x + d_i, equiprobable.
inline CcpInstance single_row(const char* name, Vector cost, const std::vector<Vector>& w,
                              const std::vector<double>& d, double epsilon) {
  CcpInstance inst;
  inst.name = name;
  inst.cost = std::move(cost);
  inst.epsilon = epsilon;
  const int n = inst.cost.size();
  const int N = static_cast<int>(w.size());
  for (int i = 0; i < N; ++i) {
    sccvar::Scenario s;
    s.W = Matrix(1, n);
    s.W.row(0) = w[i].transpose();
    s.d = Vector::Constant(1, d[i]);
    s.p = 1.0 / N;
    inst.scenarios.push_back(s);
  }
  inst.domain = sccvar::Domain::box(n, 0.0, sccvar::kInf);
  return inst;
}

// xi^1 = (1,0), xi^2 = (1,1), g = 1 - xi.x, c = (2,1), eps = 2/3.
inline CcpInstance example2() {
  return single_row("example2", vec({2, 1}), {vec({-1, 0}), vec({-1, -1})}, {1, 1}, 2.0 / 3.0);
}

// g = xi1 x - xi2 with xi^1 = (-9,-10), xi^{2,3,4} = (4,2); c = -1, eps = 1/2.
inline CcpInstance example3() {
  return single_row("example3", vec({-1}), {vec({-9}), vec({4}), vec({4}), vec({4})},
                    {10, -2, -2, -2}, 0.5);
}

// Example 3 with the last offset moved to 0: scenario 4 reads 4x <= 0.
inline CcpInstance example4() {
  return single_row("example4", vec({-1}), {vec({-9}), vec({4}), vec({4}), vec({4})},
                    {10, -2, -2, 0}, 0.5);
}

// Example 3 with eps = 1/4.
inline CcpInstance example5() {
  CcpInstance inst = example3();
  inst.name = "example5";
  inst.epsilon = 0.25;
  return inst;
}

// xi^1 = (1,0), xi^2 = xi^3 = (1,1), c = (3,2), eps = 0.4.
inline CcpInstance example6() {
  return single_row("example6", vec({3, 2}), {vec({-1, 0}), vec({-1, -1}), vec({-1, -1})},
                    {1, 1, 1}, 0.4);
}

// Example 6 with eps = 1/3.
inline CcpInstance example7() {
  CcpInstance inst = example6();
  inst.name = "example7";
  inst.epsilon = 1.0 / 3.0;
  return inst;
}

inline std::vector<Vector> integer_grid(int hi) {
  std::vector<Vector> out;
  for (int k = 0; k <= hi; ++k) out.push_back(vec({static_cast<double>(k)}));
  return out;
}

}  // namespace fixtures

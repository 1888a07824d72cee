#pragma once

// Independent reference implementations used only by tests.  These stay
// deliberately naive (direct summation, per-sample arithmetic) so they share
// no code path with the library.

#include <cmath>
#include <numbers>
#include <vector>

#include "rbd/common.hpp"

namespace oracle {

// Direct O(N^2) orthonormal DCT-II of a square matrix.
inline rbd::Mat<double> dct2_direct(const rbd::Mat<double>& x) {
  const int h = static_cast<int>(x.rows());
  const int w = static_cast<int>(x.cols());
  rbd::Mat<double> out(h, w);
  for (int u = 0; u < h; ++u) {
    for (int v = 0; v < w; ++v) {
      double acc = 0.0;
      for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
          acc += x(i, j) * std::cos(std::numbers::pi * (2 * i + 1) * u / (2.0 * h)) *
                 std::cos(std::numbers::pi * (2 * j + 1) * v / (2.0 * w));
        }
      }
      const double au = u == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
      const double av = v == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
      out(u, v) = au * av * acc;
    }
  }
  return out;
}

// Per-sample softmax cross-entropy, summed then averaged by hand.
inline double mean_ce(const rbd::Mat<double>& logits, const std::vector<int>& labels) {
  double total = 0.0;
  for (long j = 0; j < logits.cols(); ++j) {
    double mx = logits(0, j);
    for (long r = 1; r < logits.rows(); ++r) mx = std::max(mx, logits(r, j));
    double z = 0.0;
    for (long r = 0; r < logits.rows(); ++r) z += std::exp(logits(r, j) - mx);
    total += -(logits(labels[j], j) - mx - std::log(z));
  }
  return total / static_cast<double>(logits.cols());
}

// Central finite difference of f over a flat parameter vector accessed via
// get/set callables.
template <class GetSet, class Eval>
rbd::Vec<double> central_diff(GetSet&& get, GetSet&& set, Eval&& f, rbd::Vec<double> theta,
                              double eps) {
  rbd::Vec<double> g(theta.size());
  for (long i = 0; i < theta.size(); ++i) {
    rbd::Vec<double> tp = theta, tm = theta;
    tp[i] += eps;
    tm[i] -= eps;
    set(tp);
    const double fp = f();
    set(tm);
    const double fm = f();
    g[i] = (fp - fm) / (2 * eps);
  }
  set(theta);
  (void)get;
  return g;
}

inline double rel_error(const rbd::Vec<double>& a, const rbd::Vec<double>& b) {
  const double denom = std::max(1e-12, b.norm());
  return (a - b).norm() / denom;
}

}  // namespace oracle

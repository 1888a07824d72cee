#pragma once

#include <optional>

#include "rbd/losses.hpp"

namespace rbd {

template <class Scalar>
Scalar cosine(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  if (a.size() != b.size()) throw ContractError("cosine: length mismatch");
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0))
    throw UndefinedCosineError("cosine: zero vector");
  Scalar c = a.dot(b) / (na * nb);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

// PCGrad applied one-sidedly: when <g_b, g_u> < 0, remove alpha times the
// component of g_u along g_b.  Non-conflicting pairs pass through unchanged.
template <class Scalar>
Vec<Scalar> pcgrad_project(const Vec<Scalar>& g_b, const Vec<Scalar>& g_u, double alpha) {
  if (g_b.size() != g_u.size()) throw ContractError("pcgrad_project: length mismatch");
  if (alpha < 0.0 || alpha > 1.0) throw ContractError("pcgrad_project: alpha outside [0,1]");
  const Scalar dot = g_b.dot(g_u);
  if (dot >= Scalar(0)) return g_u;
  const Scalar nb2 = g_b.squaredNorm();
  if (nb2 == Scalar(0))
    throw DegenerateProjectionError("pcgrad_project: conflicting pair with zero g_b");
  return g_u - static_cast<Scalar>(alpha) * (dot / nb2) * g_b;
}

// Weighted combination after surgery; mirrors the outer objective's weights.
template <class Scalar>
Vec<Scalar> compose_update(const Vec<Scalar>& g_b, const Vec<Scalar>& g_u_adjusted,
                           const Vec<Scalar>& g_vis, const Vec<Scalar>& g_non_adv,
                           const LossWeights& w) {
  w.validate();
  if (g_b.size() != g_u_adjusted.size() || g_b.size() != g_vis.size() ||
      g_b.size() != g_non_adv.size())
    throw ContractError("compose_update: length mismatch");
  return g_b + static_cast<Scalar>(w.lambda_unlearn) * g_u_adjusted +
         static_cast<Scalar>(w.lambda_vis) * g_vis +
         static_cast<Scalar>(w.lambda_non_adv) * g_non_adv;
}

// Per-outer-round record of attack/unlearn gradient alignment on the fixed
// probe batch.  A missing cosine marks a degenerate (zero-gradient) probe.
struct ConflictPoint {
  int round = 0;
  std::optional<double> cosine;
  bool conflict = false;
  bool mitigated = false;
};

struct ConflictTrace {
  std::vector<ConflictPoint> points;

  double mean_cosine() const {
    double sum = 0;
    long n = 0;
    for (const auto& p : points)
      if (p.cosine) {
        sum += *p.cosine;
        ++n;
      }
    if (n == 0) throw ContractError("ConflictTrace: no datapoints");
    return sum / static_cast<double>(n);
  }
};

}  // namespace rbd

#pragma once

// Rooted resolvent m_M(z) = <root, (zI - A_M)^{-1} root> of the depth-M
// compression A_M, evaluated without ever factoring a matrix larger than
// the dense eigensolver comfortably handles.
//
// The compression satisfies an exact two-block identity: conjugating by the
// branch isometries turns A_M into diag(p A_{M-1}, (1-p) A_{M-1}) plus a
// rank-two coupling supported on the two copies of the root.  Schur
// complementation of that coupling gives the scalar recursion
//
//   m_M(z) = F(m_{M-1}(z / p), m_{M-1}(z / (1 - p))),
//   F(a, b) = a / (1 - a)  +  b / ((1 - a) (1 - a - b)),
//
// which is exact at every depth.  Deep evaluations therefore peel down to a
// dense base depth (default 9, dimension 512) and recurse; the arguments
// only move further from the spectrum at each peel since z / p > z.

#include <cmath>
#include <stdexcept>

#include "cantor_frame/spectral.hpp"

namespace cantor_frame {

constexpr int kDefaultDenseBaseDepth = 9;
constexpr int kMaxResolventDepth = 40;

// One step of the depth recursion.  Exact wherever no division degenerates.
inline double resolvent_recursion_step(double a, double b) {
  double one_minus_a = 1.0 - a;
  double one_minus_ab = 1.0 - a - b;
  if (one_minus_a == 0.0 || one_minus_ab == 0.0)
    throw std::domain_error("resolvent recursion hit a pole");
  return a / one_minus_a + b / (one_minus_a * one_minus_ab);
}

class RootedResolvent {
 public:
  // Builds the provider for depth `depth` at branch weight p.  Depths at or
  // below the dense cap are served by one dense eigensolve; deeper depths
  // peel down to the cap.  At p = 1/2 the rooted measure is exactly the
  // point mass at 2, at every depth, so the closed form is used throughout.
  static RootedResolvent build(double p, int depth,
                               int dense_depth_cap = kDefaultDenseBaseDepth) {
    if (depth < 1 || depth > kMaxResolventDepth)
      throw std::invalid_argument("RootedResolvent: depth out of range");
    if (dense_depth_cap < 1 || (1 << dense_depth_cap) > kMaxEighDim)
      throw std::invalid_argument("RootedResolvent: bad dense cap");
    RootedResolvent r;
    r.p_ = BranchWeights(p).p;  // validates p
    r.depth_ = depth;
    if (p == 0.5) {
      // The rooted measure of the compression is exactly the point mass at
      // 2 for every depth; keep only that atom instead of expanding the
      // full multiplicity list.
      r.base_depth_ = depth;
      r.base_.eigenvalues = {2.0};
      r.base_.rooted_weights = {1.0};
      r.base_.tail_bound = compression_error_bound(0.5, depth);
      r.base_.depth = depth;
      r.base_.p = 0.5;
      r.base_.provenance = Provenance::ClosedForm;
      r.lambda_upper_ = 2.0;  // exact top of the compression at p = 1/2
    } else {
      r.base_depth_ = std::min(depth, dense_depth_cap);
      r.base_ = spectral_kinf_dense(p, r.base_depth_);
      // lambda_max(A_M) is sandwiched for any M >= base:
      //   lambda_max(A_base) <= lambda_max(A_M) <= lambda_max(A_base) + tau_base.
      r.lambda_upper_ =
          r.base_.lambda_max() +
          (depth > r.base_depth_
               ? truncation_error_bound(p, r.base_depth_)
               : 0.0);
    }
    r.tail_bound_ = compression_error_bound(p, depth);
    return r;
  }

  double p() const { return p_; }
  int depth() const { return depth_; }
  int base_depth() const { return base_depth_; }
  const SpectralData& base() const { return base_; }

  // Certified bounds for lambda_max(A_depth).
  double lambda_lower() const { return base_.lambda_max(); }
  double lambda_upper() const { return lambda_upper_; }

  // Certified ||K - A_depth||.
  double tail_bound() const { return tail_bound_; }

  // Smallest z at which eval() certifies a radius against the limit.
  double min_valid_z() const { return lambda_upper_ + tail_bound_; }

  // m_depth(z) with a certified radius to the limit resolvent value.
  ResolventValue eval(double z) const {
    if (!(z > min_valid_z()))
      throw std::domain_error("RootedResolvent: z not beyond the certified spectrum");
    double v = eval_raw(z, depth_);
    double d = z - lambda_upper_;
    return {v, tail_bound_ / (d * (d - tail_bound_))};
  }

  // Raw compression value (no certificate); z must still clear the base
  // spectrum after all peels, which holds whenever z > lambda_lower().
  double eval_raw(double z, int depth) const {
    if (depth < base_depth_)
      throw std::invalid_argument("RootedResolvent: depth below base");
    if (depth == base_depth_) {
      double acc = 0.0;
      for (size_t j = 0; j < base_.eigenvalues.size(); ++j) {
        double w = base_.rooted_weights[j];
        if (w != 0.0) acc += w / (z - base_.eigenvalues[j]);
      }
      return acc;
    }
    double a = eval_raw(z / p_, depth - 1);
    double b = eval_raw(z / (1.0 - p_), depth - 1);
    return resolvent_recursion_step(a, b);
  }

 private:
  SpectralData base_;
  int depth_ = 0;
  int base_depth_ = 0;
  double p_ = 0.5;
  double lambda_upper_ = 0.0;
  double tail_bound_ = 0.0;
};

}  // namespace cantor_frame

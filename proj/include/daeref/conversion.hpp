#pragma once

#include "daeref/descriptor.hpp"

namespace daeref {

/// Driving-variable system
///   x(t+1) = A_d·x(t) + B_d·s(t),  u(t) = C_u·x(t) + D_u·s(t),  y(t) = C·x(t).
struct DvSystem {
  Mat Ad;
  Mat Bd;
  Mat Cu;
  Mat Du;
  Mat C;
  InitialStates initial;

  Index n() const { return Ad.rows(); }
  Index p() const { return Bd.cols(); }
  Index k() const { return C.rows(); }

  /// Stacked output map [C_u; C] and feedthrough [D_u; 0].
  Mat Cd() const;
  Mat Dd() const;

  void validate() const;
};

/// s(t) = W1·x(t+1) + W2·u(t) + W3·x(t).
struct DrivingRecovery {
  Mat W;  // p × (n + p + n)
  Index n = 0;

  Mat W1() const { return W.leftCols(n); }
  Mat W2() const { return W.middleCols(n, W.cols() - 2 * n); }
  Mat W3() const { return W.rightCols(n); }
};

/// M = [E −B]; [x(t+1); u(t)] = M⁺·A·x(t) + ker(M)·s(t).
DvSystem dae_to_dv(const DaeSystem& sys, const RankTolerance& tol = {});

struct DaeFromDv {
  DaeSystem dae;
  DrivingRecovery recovery;
};

/// Eliminates s through the left null space of [B_d; D_u] (SVD-based).
DaeFromDv dv_to_dae(const DvSystem& dv, const RankTolerance& tol = {});

Vec recover_driving_input(const DrivingRecovery& rec, const Vec& x_next,
                          const Vec& u, const Vec& x);

}  // namespace daeref

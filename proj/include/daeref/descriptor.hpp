#pragma once

#include <vector>

#include "daeref/linalg.hpp"

namespace daeref {

/// Initial-state set of a system: the whole state space, or a finite list of
/// points (used by fixtures and explicit experiments).
struct InitialStates {
  enum class Kind { Free, Points };

  Kind kind = Kind::Free;
  std::vector<Vec> points;

  static InitialStates free() { return {}; }
  static InitialStates listed(std::vector<Vec> pts) {
    return {Kind::Points, std::move(pts)};
  }
  bool is_free() const { return kind == Kind::Free; }
};

/// Descriptor system E·x(t+1) = A·x(t) + B·u(t), y(t) = C·x(t).
struct DaeSystem {
  Mat E;
  Mat A;
  Mat B;
  Mat C;
  InitialStates initial;

  Index n() const { return A.rows(); }
  Index p() const { return B.cols(); }
  Index k() const { return C.rows(); }

  /// Dimensions and finiteness; throws DimensionMismatch / InvalidMatrix.
  void validate() const;

  /// The standing assumption rank(B) = p and rank(C) = k.
  bool has_full_rank_io(const RankTolerance& tol = {}) const;
};

DaeSystem make_dae(Mat e, Mat a, Mat b, Mat c,
                   InitialStates initial = InitialStates::free());

/// Characteristic polynomial det(λE − A) in ascending coefficient order.
struct PencilRegularity {
  bool regular = false;
  Vec coefficients;
};

/// Interpolates det(λE − A) at n + 1 Chebyshev nodes on [−n, n]. The pencil
/// is declared regular when some sample exceeds 1e-10 times the Hadamard
/// bound of its matrix (the largest |det| that matrix could have).
PencilRegularity is_regular(const Mat& e, const Mat& a);

/// P·E·Q = blkdiag(I, N), P·A·Q = blkdiag(J, I), N nilpotent of index mu.
struct WeierstrassForm {
  Mat P;
  Mat Q;
  Mat J;
  Mat N;
  Mat B1;
  Mat B2;
  Mat C1;
  Mat C2;
  Index n1 = 0;
  Index n2 = 0;
  Index mu = 0;
};

WeierstrassForm weierstrass(const DaeSystem& sys);

struct ReachabilityReport {
  bool reachable = false;
  Index rank_causal = 0;
  Index rank_anticausal = 0;
};

ReachabilityReport check_reachability(const WeierstrassForm& w,
                                      const RankTolerance& tol = {});

/// Sampled input u(0), ..., u(horizon − 1).
struct InputSignal {
  std::vector<Vec> samples;

  Index horizon() const { return static_cast<Index>(samples.size()); }
};

struct Response {
  std::vector<Vec> states;   // original coordinates, t = 0..T−1
  std::vector<Vec> outputs;  // t = 0..T−1
};

/// Closed-form time response of the causal/anti-causal decomposition. The
/// anti-causal part reads inputs up to u(T + mu − 2).
Response response(const WeierstrassForm& w, const Vec& x10,
                  const InputSignal& u, Index horizon);

}  // namespace daeref

#pragma once

// Systems printed in the reference examples plus random generators shared by
// the unit and acceptance tests.

#include <Eigen/Dense>

#include "daeref/conversion.hpp"
#include "daeref/descriptor.hpp"
#include "daeref/refinement.hpp"
#include "daeref/rng.hpp"

namespace fixtures {

using daeref::DaeController;
using daeref::DaeSystem;
using daeref::DvSystem;
using daeref::Index;
using daeref::Mat;
using daeref::Vec;

inline Mat mat(Index rows, Index cols, std::initializer_list<double> entries) {
  Mat m(rows, cols);
  auto it = entries.begin();
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

inline Vec vec(std::initializer_list<double> entries) {
  Vec v(static_cast<Index>(entries.size()));
  Index i = 0;
  for (double e : entries) v(i++) = e;
  return v;
}

// Unreachable three-state system and its two-state minimal companion, related
// by x = H·x_a.
inline DaeSystem relation_concrete() {
  return daeref::make_dae(mat(3, 3, {1, 0, 0, 0, 0, 1, 0, 0, 0}),
                          mat(3, 3, {-1, 0, 0, 0, 1, 0, 0, 0, 1}), mat(3, 1, {1, 2, 0}),
                          mat(1, 3, {0.2, 0.5, 1}));
}

inline DaeSystem relation_abstract() {
  return daeref::make_dae(mat(2, 2, {1, 0, 0, 0}), mat(2, 2, {-1, 0, 0, 1}),
                          mat(2, 1, {1, 1}), mat(1, 2, {0.2, 1}));
}

inline Mat relation_map() { return mat(3, 2, {1, 0, 0, 2, 0, 0}); }

// Index-2 three-state system used by the exact and approximate refinement
// walkthroughs.
inline DaeSystem index2_concrete() {
  return daeref::make_dae(mat(3, 3, {1, 0, 0, 0, 0, 1, 0, 0, 0}),
                          mat(3, 3, {-1, 0, 0, 0, 1, 0, 0, 0, 1}), mat(3, 1, {1, 1, 1}),
                          mat(1, 3, {0.1, 0.2, 0.5}));
}

// Printed DV form of index2_concrete (driving column with the printed sign).
inline DvSystem index2_dv_printed() {
  return DvSystem{mat(3, 3, {-1, 0, -1, 0, 0, 0, 0, 1, -1}), mat(3, 1, {0, -1, 0}),
                  mat(1, 3, {0, 0, -1}), mat(1, 1, {0}), mat(1, 3, {0.1, 0.2, 0.5}),
                  daeref::InitialStates::free()};
}

// Printed abstract DAE obtained back from the DV form.
inline DaeSystem index2_abstract() {
  return daeref::make_dae(mat(3, 3, {1, 0, 0, 0, 0, 1, 0, 0, 0}),
                          mat(3, 3, {-1, 0, -1, 0, 1, -1, 0, 0, -1}), mat(3, 1, {0, 0, -1}),
                          mat(1, 3, {0.1, 0.2, 0.5}));
}

// The abstract controller as printed. It closes the loop with second row
// (−0.5, 1.4, −2), which disagrees with the printed closed loop.
inline DaeController index2_controller_printed() {
  return DaeController{mat(1, 3, {0, -1, 0}), mat(1, 3, {0.5, -1.4, 3}), mat(1, 1, {1})};
}

// Same E_c and B_c with A_c chosen so that the closed loop equals the printed
// closed-loop matrix below.
inline DaeController index2_controller() {
  return DaeController{mat(1, 3, {0, -1, 0}), mat(1, 3, {1.5, -2.4, 5}), mat(1, 1, {1})};
}

inline Mat index2_closed_loop() { return mat(3, 3, {-1, 0, -1, -1.5, 2.4, -4, 0, 1, -1}); }

inline Mat index2_lifted_gain() { return mat(1, 3, {1.5, -2.4, 4}); }

// Printed data of the approximate refinement walkthrough (4-digit rounding).
inline Mat printed_stabilizing_gain() { return mat(1, 3, {0.1262, -0.8327, 0.9843}); }

inline DvSystem printed_reduced_dv() {
  return DvSystem{mat(2, 2, {-0.051, 0.123, -0.123, -0.287}), mat(2, 1, {-1.683, -1.675}),
                  mat(1, 2, {-1.429, 1.499}), mat(1, 1, {0}), mat(1, 2, {0.889, -0.747}),
                  daeref::InitialStates::free()};
}

inline DaeSystem printed_reduced_dae() {
  return daeref::make_dae(mat(2, 2, {-0.705, 0.709, 0, 0}), mat(2, 2, {-0.051, -0.29, -1.429, 1.499}),
                          mat(2, 1, {0, -1}), mat(1, 2, {0.889, -0.747}));
}

inline Mat printed_P() {
  return mat(3, 2, {-1.1597, 2.4387, 1.5254, -0.9658, 1.4005, -1.5960});
}
inline Mat printed_Q() { return mat(1, 2, {-0.0410, -0.4645}); }
inline double printed_R() { return 0.955; }

inline DaeController printed_reduced_controller() {
  return DaeController{mat(1, 2, {1, 1}), mat(1, 2, {1, 1}), mat(1, 1, {1})};
}
inline Mat printed_reduced_closed_loop() { return mat(2, 2, {-0.179, 1.458, -0.25, 1.04}); }
inline Mat printed_reduced_lifted_gain() { return mat(1, 2, {0.076, -0.793}); }

inline Vec walkthrough_x0() { return vec({0.4, 0.2, -0.04}); }
inline Vec walkthrough_xa0() { return vec({0.3, 0.3}); }
constexpr double kClosedLoopEpsilon = 0.0667;
constexpr double kOpenLoopEpsilon = 0.093;

// Random orthogonal matrix scaled to singular values in [1, 2].
inline Mat well_conditioned(daeref::Rng& rng, Index n) {
  Eigen::HouseholderQR<Mat> qr(rng.normal(n, n));
  const Mat q = qr.householderQ() * Mat::Identity(n, n);
  Eigen::HouseholderQR<Mat> qr2(rng.normal(n, n));
  const Mat q2 = qr2.householderQ() * Mat::Identity(n, n);
  return q * rng.uniform_vec(n, 1.0, 2.0).asDiagonal() * q2;
}

// Nilpotent single Jordan chain of size n (ones on the superdiagonal).
inline Mat nilpotent_chain(Index n) {
  Mat out = Mat::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) out(i, i + 1) = 1.0;
  return out;
}

struct CanonicalPencil {
  DaeSystem sys;
  Mat J;
  Mat N;
  Mat B1;
  Mat B2;
  Index n1 = 0;
  Index n2 = 0;
  Index mu = 0;
};

// E = P⁻¹·blkdiag(I, N)·Q⁻¹, A = P⁻¹·blkdiag(J, I)·Q⁻¹ with N made of
// Jordan chains of the listed sizes.
inline CanonicalPencil random_pencil(daeref::Rng& rng, Index n1,
                                     const std::vector<Index>& chains, Index p, Index k) {
  Index n2 = 0;
  Index mu = 0;
  for (Index c : chains) {
    n2 += c;
    mu = std::max(mu, c);
  }
  const Index n = n1 + n2;
  CanonicalPencil out;
  out.n1 = n1;
  out.n2 = n2;
  out.mu = mu;
  out.J = rng.normal(n1, n1) * (0.9 / std::max<Index>(1, n1));
  out.N = Mat::Zero(n2, n2);
  Index at = 0;
  for (Index c : chains) {
    out.N.block(at, at, c, c) = nilpotent_chain(c);
    at += c;
  }
  Mat e = Mat::Zero(n, n);
  Mat a = Mat::Zero(n, n);
  e.topLeftCorner(n1, n1).setIdentity();
  e.bottomRightCorner(n2, n2) = out.N;
  a.topLeftCorner(n1, n1) = out.J;
  a.bottomRightCorner(n2, n2).setIdentity();
  const Mat pinv_left = well_conditioned(rng, n);
  const Mat qinv_right = well_conditioned(rng, n);
  const Mat b_canonical = rng.normal(n, p);
  out.B1 = b_canonical.topRows(n1);
  out.B2 = b_canonical.bottomRows(n2);
  out.sys = DaeSystem{pinv_left * e * qinv_right, pinv_left * a * qinv_right,
                      pinv_left * b_canonical, rng.normal(k, n), daeref::InitialStates::free()};
  return out;
}

// Reachable regular DAE: one nilpotent chain no longer than needed, so that a
// random B2 makes [B2, N·B2, ...] full rank.
inline DaeSystem random_reachable_dae(daeref::Rng& rng, Index n, Index p, Index k = 1) {
  for (;;) {
    const Index n2 = static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const Index n1 = n - n2;
    std::vector<Index> chains;
    if (n2 > 0) chains.push_back(n2);
    CanonicalPencil pencil = random_pencil(rng, n1, chains, p, k);
    Mat rc(n1, p * std::max<Index>(n1, 1));
    Mat block = pencil.B1;
    for (Index i = 0; i < std::max<Index>(n1, 1); ++i) {
      rc.middleCols(i * p, p) = block;
      block = pencil.J * block;
    }
    Mat rmu(n2, p * std::max<Index>(n2, 1));
    block = pencil.B2;
    for (Index i = 0; i < std::max<Index>(n2, 1); ++i) {
      rmu.middleCols(i * p, p) = block;
      block = pencil.N * block;
    }
    const bool causal_ok = n1 == 0 || Eigen::FullPivLU<Mat>(rc).rank() == n1;
    const bool anticausal_ok = n2 == 0 || Eigen::FullPivLU<Mat>(rmu).rank() == n2;
    if (causal_ok && anticausal_ok) return pencil.sys;
  }
}

// Random stabilizable DV system (A_d with spectral radius up to 1.3).
inline DvSystem random_dv(daeref::Rng& rng, Index n, Index p, Index k = 1) {
  DvSystem dv;
  dv.Ad = rng.normal(n, n) * (1.3 / std::sqrt(static_cast<double>(n)));
  dv.Bd = rng.normal(n, p);
  dv.Cu = rng.normal(p, n);
  dv.Du = rng.normal(p, p);
  dv.C = rng.normal(k, n);
  return dv;
}

}  // namespace fixtures

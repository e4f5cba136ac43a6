#include "daeref/descriptor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "daeref/error.hpp"

namespace daeref {

namespace {

// Shift candidates for the Weierstrass construction: a fixed grid plus a few
// reproducible pseudo-random draws in [−3, 3].
std::vector<double> shift_candidates() {
  std::vector<double> out = {0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5};
  std::uint64_t state = 0x5DEECE66DULL;
  for (int i = 0; i < 8; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    const double unit = static_cast<double>(state >> 11) * 0x1.0p-53;
    out.push_back(-3.0 + 6.0 * unit);
  }
  return out;
}

double hadamard_bound(const Mat& m) {
  double bound = 1.0;
  for (Index j = 0; j < m.cols(); ++j) bound *= m.col(j).norm();
  return bound;
}

Mat blkdiag(const Mat& a, const Mat& b) {
  Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

Index nilpotency_index(const Mat& nmat) {
  if (nmat.rows() == 0) return 0;
  const double scale = std::max(1.0, nmat.norm());
  Mat power = Mat::Identity(nmat.rows(), nmat.cols());
  for (Index k = 1; k <= nmat.rows(); ++k) {
    power = power * nmat;
    if (power.norm() <= 1e-10 * std::pow(scale, static_cast<double>(k))) {
      return k;
    }
  }
  return nmat.rows();
}

}  // namespace

void DaeSystem::validate() const {
  const Index nn = A.rows();
  if (A.cols() != nn || E.rows() != nn || E.cols() != nn || B.rows() != nn ||
      C.cols() != nn) {
    throw Error(ErrorKind::DimensionMismatch,
                "DAE matrices E, A (n×n), B (n×p), C (k×n) are inconsistent");
  }
  require_finite(E, "E");
  require_finite(A, "A");
  require_finite(B, "B");
  require_finite(C, "C");
  for (const Vec& pt : initial.points) {
    if (pt.size() != nn) {
      throw Error(ErrorKind::DimensionMismatch,
                  "initial state has wrong dimension");
    }
  }
}

bool DaeSystem::has_full_rank_io(const RankTolerance& tol) const {
  return rank_of(B, tol) == B.cols() && rank_of(C, tol) == C.rows();
}

DaeSystem make_dae(Mat e, Mat a, Mat b, Mat c, InitialStates initial) {
  DaeSystem sys{std::move(e), std::move(a), std::move(b), std::move(c),
                std::move(initial)};
  sys.validate();
  return sys;
}

PencilRegularity is_regular(const Mat& e, const Mat& a) {
  if (e.rows() != e.cols() || a.rows() != a.cols() || e.rows() != a.rows()) {
    throw Error(ErrorKind::InvalidPencil, "pencil matrices must be square and equal size");
  }
  require_finite(e, "E");
  require_finite(a, "A");
  const Index n = e.rows();
  PencilRegularity out;
  if (n == 0) {
    out.regular = true;
    out.coefficients = Vec::Ones(1);
    return out;
  }

  const Index nodes = n + 1;
  Vec lambda(nodes);
  Vec values(nodes);
  double best_ratio = 0.0;
  for (Index i = 0; i < nodes; ++i) {
    const double theta = std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) /
                         (2.0 * static_cast<double>(nodes));
    lambda(i) = static_cast<double>(n) * std::cos(theta);
    const Mat pencil = lambda(i) * e - a;
    values(i) = pencil.fullPivLu().determinant();
    const double bound = hadamard_bound(pencil);
    if (bound > 0.0) best_ratio = std::max(best_ratio, std::abs(values(i)) / bound);
  }

  Mat vander(nodes, nodes);
  for (Index i = 0; i < nodes; ++i) {
    double pw = 1.0;
    for (Index j = 0; j < nodes; ++j) {
      vander(i, j) = pw;
      pw *= lambda(i);
    }
  }
  out.coefficients = vander.fullPivLu().solve(values);
  out.regular = best_ratio > 1e-10;
  if (!out.regular) out.coefficients.setZero();
  return out;
}

WeierstrassForm weierstrass(const DaeSystem& sys) {
  sys.validate();
  const Mat& e = sys.E;
  const Mat& a = sys.A;
  const Index n = sys.n();
  if (!is_regular(e, a).regular) {
    throw Error(ErrorKind::SingularPencil, "det(λE − A) vanishes identically");
  }

  double best_rcond = -1.0;
  double shift = 0.0;
  for (double candidate : shift_candidates()) {
    Eigen::JacobiSVD<Mat> svd(a - candidate * e);
    const Vec& sv = svd.singularValues();
    const double rcond = sv(0) > 0.0 ? sv(n - 1) / sv(0) : 0.0;
    if (rcond > best_rcond) {
      best_rcond = rcond;
      shift = candidate;
    }
  }
  if (best_rcond < 1e-12) {
    throw Error(ErrorKind::IllConditionedPencil, "no well-conditioned shift found");
  }

  // Finite eigenvalues λ of the pencil map to eigenvalues 1/(λ − shift) of
  // the shifted operator, infinite ones to its nilpotent part.
  const Mat shifted = (a - shift * e).fullPivLu().solve(e);

  // Ranks of the powers are judged against ‖Â‖^k rather than the power's own
  // norm, so that a power that is zero up to round-off counts as rank 0.
  const double base = Eigen::JacobiSVD<Mat>(shifted).singularValues()(0);
  const auto split_rank = [&](const Eigen::JacobiSVD<Mat>& svd, Index k) {
    const double thr = 1e-10 * static_cast<double>(n) * std::pow(base, static_cast<double>(k));
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > thr) ++r;
    return r;
  };
  Mat shifted_power = Mat::Identity(n, n);
  Index n1 = n;
  Index power = 0;
  for (Index k = 1; k <= n; ++k) {
    Mat next = shifted_power * shifted;
    const Index r = split_rank(Eigen::JacobiSVD<Mat>(next), k);
    shifted_power = std::move(next);
    power = k;
    if (r == n1) break;
    n1 = r;
  }

  // Left singular vectors of the kept values span the causal subspace, right
  // singular vectors of the dropped ones its anti-causal complement.
  Eigen::JacobiSVD<Mat> svd(shifted_power, Eigen::ComputeFullU | Eigen::ComputeFullV);
  n1 = split_rank(svd, power);
  const Index n2 = n - n1;
  Mat causal = svd.matrixU().leftCols(n1);
  Mat anticausal = svd.matrixV().rightCols(n2);
  normalize_column_signs(causal);
  normalize_column_signs(anticausal);

  WeierstrassForm w;
  w.n1 = n1;
  w.n2 = n2;
  w.Q.resize(n, n);
  w.Q << causal, anticausal;

  Mat images(n, n);
  images << e * causal, a * anticausal;
  Eigen::FullPivLU<Mat> lu(images);
  if (!lu.isInvertible() ||
      1.0 / (images.norm() * lu.inverse().norm()) < 1e-12) {
    throw Error(ErrorKind::IllConditionedPencil, "deflating images are nearly dependent");
  }
  w.P = lu.inverse();

  const Mat pe = w.P * e * w.Q;
  const Mat pa = w.P * a * w.Q;
  w.J = pa.topLeftCorner(n1, n1);
  w.N = pe.bottomRightCorner(n2, n2);
  const Mat pb = w.P * sys.B;
  w.B1 = pb.topRows(n1);
  w.B2 = pb.bottomRows(n2);
  const Mat cq = sys.C * w.Q;
  w.C1 = cq.leftCols(n1);
  w.C2 = cq.rightCols(n2);
  w.mu = nilpotency_index(w.N);

  const double scale = (e.norm() + a.norm()) * std::max(1.0, w.P.norm());
  const double res_e = (pe - blkdiag(Mat::Identity(n1, n1), w.N)).norm();
  const double res_a = (pa - blkdiag(w.J, Mat::Identity(n2, n2))).norm();
  if (res_e > 1e-8 * scale || res_a > 1e-8 * scale) {
    throw Error(ErrorKind::IllConditionedPencil,
                "block residuals " + std::to_string(res_e) + ", " +
                    std::to_string(res_a) + " exceed tolerance");
  }
  return w;
}

ReachabilityReport check_reachability(const WeierstrassForm& w,
                                      const RankTolerance& tol) {
  ReachabilityReport report;
  const Index p = w.B1.cols();
  if (w.n1 > 0) {
    Mat rc(w.n1, p * w.n1);
    Mat block = w.B1;
    for (Index i = 0; i < w.n1; ++i) {
      rc.middleCols(i * p, p) = block;
      block = w.J * block;
    }
    report.rank_causal = rank_of(rc, tol);
  }
  if (w.n2 > 0 && w.mu > 0) {
    Mat rmu(w.n2, p * w.mu);
    Mat block = w.B2;
    for (Index i = 0; i < w.mu; ++i) {
      rmu.middleCols(i * p, p) = block;
      block = w.N * block;
    }
    report.rank_anticausal = rank_of(rmu, tol);
  }
  report.reachable = report.rank_causal == w.n1 && report.rank_anticausal == w.n2;
  return report;
}

Response response(const WeierstrassForm& w, const Vec& x10,
                  const InputSignal& u, Index horizon) {
  if (x10.size() != w.n1) {
    throw Error(ErrorKind::DimensionMismatch, "x10 must have n1 entries");
  }
  const Index needed = std::max<Index>(0, horizon + w.mu - 1);
  if (u.horizon() < needed) {
    throw Error(ErrorKind::InsufficientInputHorizon,
                "need " + std::to_string(needed) + " input samples, got " +
                    std::to_string(u.horizon()));
  }
  const Index p = w.B1.cols();
  for (const Vec& sample : u.samples) {
    if (sample.size() != p || !sample.allFinite()) {
      throw Error(ErrorKind::InvalidMatrix, "input samples must be finite p-vectors");
    }
  }

  // Markov-like blocks N^τ·B2 for the anti-causal convolution.
  std::vector<Mat> anticausal_gain;
  Mat block = w.B2;
  for (Index tau = 0; tau < w.mu; ++tau) {
    anticausal_gain.push_back(block);
    block = w.N * block;
  }

  Response out;
  Vec x1 = x10;
  for (Index t = 0; t < horizon; ++t) {
    Vec x2 = Vec::Zero(w.n2);
    for (Index tau = 0; tau < w.mu; ++tau) {
      x2 -= anticausal_gain[static_cast<std::size_t>(tau)] *
            u.samples[static_cast<std::size_t>(t + tau)];
    }
    Vec z(w.n1 + w.n2);
    z << x1, x2;
    out.states.push_back(w.Q * z);
    out.outputs.push_back(w.C1 * x1 + w.C2 * x2);
    if (t + 1 < horizon) {
      x1 = w.J * x1 + w.B1 * u.samples[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

}  // namespace daeref

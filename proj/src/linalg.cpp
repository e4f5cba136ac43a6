#include "daeref/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "daeref/error.hpp"

namespace daeref {

namespace {

constexpr int kDareMaxIterations = 200;
constexpr int kLyapMaxIterations = 100;

Eigen::JacobiSVD<Mat> full_svd(const Mat& m) {
  return Eigen::JacobiSVD<Mat>(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
}

Index count_nonzero(const Vec& sv, double relative) {
  if (sv.size() == 0) return 0;
  const double cutoff = relative * sv(0);
  Index r = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) ++r;
  }
  return r;
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

RankTolerance::RankTolerance(double relative) : relative_(relative) {
  if (!(relative > 0.0) || !std::isfinite(relative)) {
    throw Error(ErrorKind::InvalidMatrix,
                "rank tolerance must be strictly positive");
  }
}

double RankTolerance::relative_for(Index rows, Index cols) const {
  if (relative_) return *relative_;
  return 1e-10 * static_cast<double>(std::max<Index>({rows, cols, 1}));
}

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidMatrix,
                std::string(what) + " has non-finite entries");
  }
}

void normalize_column_signs(Mat& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    Index imax = 0;
    m.col(j).cwiseAbs().maxCoeff(&imax);
    if (m(imax, j) < 0.0) m.col(j) = -m.col(j);
  }
}

Mat pinv(const Mat& m, const RankTolerance& tol) {
  require_finite(m, "pinv input");
  if (m.size() == 0) return Mat::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  const Index r = count_nonzero(sv, tol.relative_for(m.rows(), m.cols()));
  Mat out = Mat::Zero(m.cols(), m.rows());
  for (Index i = 0; i < r; ++i) {
    out.noalias() +=
        svd.matrixV().col(i) * (svd.matrixU().col(i).transpose() / sv(i));
  }
  return out;
}

Mat kernel_basis(const Mat& m, const RankTolerance& tol) {
  require_finite(m, "kernel_basis input");
  if (m.cols() == 0) return Mat(0, 0);
  if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
  auto svd = full_svd(m);
  const Index r =
      count_nonzero(svd.singularValues(), tol.relative_for(m.rows(), m.cols()));
  Mat basis = svd.matrixV().rightCols(m.cols() - r);
  normalize_column_signs(basis);
  return basis;
}

Mat range_basis(const Mat& m, const RankTolerance& tol) {
  require_finite(m, "range_basis input");
  if (m.size() == 0) return Mat(m.rows(), 0);
  auto svd = full_svd(m);
  const Index r =
      count_nonzero(svd.singularValues(), tol.relative_for(m.rows(), m.cols()));
  Mat basis = svd.matrixU().leftCols(r);
  normalize_column_signs(basis);
  return basis;
}

Index rank_of(const Mat& m, const RankTolerance& tol) {
  require_finite(m, "rank_of input");
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  return count_nonzero(svd.singularValues(),
                       tol.relative_for(m.rows(), m.cols()));
}

double spectral_radius(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double min_eigenvalue_sym(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Mat sqrtm_psd(const Mat& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
  Vec d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vec vec(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

Mat unvec(const Vec& v, Index rows, Index cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat solve_dlyap(const Mat& a, const Mat& qs) {
  require_finite(a, "dlyap A");
  require_finite(qs, "dlyap Qs");
  if (a.rows() != a.cols() || qs.rows() != a.rows() || qs.cols() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "dlyap needs square A and Qs");
  }
  const double rho = spectral_radius(a);
  if (rho >= 1.0) {
    throw Error(ErrorKind::UnstableMatrix,
                "spectral radius " + std::to_string(rho) + " >= 1");
  }
  Mat x = symmetrize(qs);
  Mat ak = a;
  for (int it = 0; it < kLyapMaxIterations; ++it) {
    Mat incr = ak * x * ak.transpose();
    x += incr;
    ak = ak * ak;
    if (incr.norm() <= 1e-17 * std::max(1.0, x.norm())) break;
  }
  return symmetrize(x);
}

double dare_residual(const Mat& a, const Mat& b, const Mat& qs, const Mat& rs,
                     const Mat& s, const Mat& x) {
  const Mat cross = s.size() == 0 ? Mat::Zero(a.rows(), b.cols()) : s;
  const Mat g = rs + b.transpose() * x * b;
  const Mat h = a.transpose() * x * b + cross;
  const Mat res = a.transpose() * x * a - x -
                  h * g.ldlt().solve(h.transpose()) + qs;
  return res.norm();
}

DareSolution solve_dare(const Mat& a, const Mat& b, const Mat& qs,
                        const Mat& rs, const Mat& s) {
  require_finite(a, "dare A");
  require_finite(b, "dare B");
  require_finite(qs, "dare Q");
  require_finite(rs, "dare R");
  const Index n = a.rows();
  const Index p = b.cols();
  if (a.cols() != n || b.rows() != n || qs.rows() != n || qs.cols() != n ||
      rs.rows() != p || rs.cols() != p ||
      (s.size() != 0 && (s.rows() != n || s.cols() != p))) {
    throw Error(ErrorKind::DimensionMismatch, "dare dimensions inconsistent");
  }
  const Mat cross = s.size() == 0 ? Mat::Zero(n, p) : s;

  Eigen::LLT<Mat> r_llt(symmetrize(rs));
  if (r_llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidMatrix, "dare R must be positive definite");
  }
  // Completion of squares: u = v − R⁻¹Sᵀx removes the cross term.
  const Mat rinv_st = r_llt.solve(cross.transpose());
  Mat ak = a - b * rinv_st;
  Mat gk = symmetrize(b * r_llt.solve(b.transpose()));
  Mat hk = symmetrize(qs - cross * rinv_st);
  const Mat eye = Mat::Identity(n, n);

  bool converged = false;
  for (int it = 0; it < kDareMaxIterations; ++it) {
    Eigen::PartialPivLU<Mat> w(eye + gk * hk);
    const Mat w_ak = w.solve(ak);
    const Mat w_gk = w.solve(gk);
    const Mat h_next = symmetrize(hk + ak.transpose() * hk * w_ak);
    gk = symmetrize(gk + ak * w_gk * ak.transpose());
    ak = ak * w_ak;
    const double delta = (h_next - hk).norm();
    hk = h_next;
    if (!hk.allFinite()) break;
    if (delta <= 1e-14 * std::max(1.0, hk.norm())) {
      converged = true;
      break;
    }
  }

  DareSolution sol;
  sol.X = hk;
  if (hk.allFinite()) {
    const Mat g = rs + b.transpose() * hk * b;
    sol.K = g.ldlt().solve(b.transpose() * hk * a + cross.transpose());
  }
  if (!hk.allFinite() || !sol.K.allFinite() ||
      spectral_radius(a - b * sol.K) >= 1.0) {
    throw Error(ErrorKind::NotStabilizable,
                "Riccati iteration found no stabilizing solution");
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "doubling iteration did not converge in 200 steps");
  }
  // Newton (Hewer) polishing: doubling accumulates round-off when the
  // weights are nearly singular; each step solves a Stein equation for the
  // cost of the current gain.
  double res = dare_residual(a, b, qs, rs, cross, sol.X);
  for (int step = 0; step < 3 && res > 1e-9 * std::max(1.0, sol.X.norm()); ++step) {
    const Mat closed = a - b * sol.K;
    const Mat weight = symmetrize(qs - cross * sol.K - sol.K.transpose() * cross.transpose() +
                                  sol.K.transpose() * rs * sol.K);
    Mat x_next;
    try {
      x_next = symmetrize(solve_dlyap(closed.transpose(), weight));
    } catch (const Error&) {
      break;
    }
    const Mat k_next = (rs + b.transpose() * x_next * b)
                           .ldlt()
                           .solve(b.transpose() * x_next * a + cross.transpose());
    const double res_next = dare_residual(a, b, qs, rs, cross, x_next);
    if (!(res_next < res) || spectral_radius(a - b * k_next) >= 1.0) break;
    sol.X = x_next;
    sol.K = k_next;
    res = res_next;
  }
  if (res > 1e-9 * std::max(1.0, sol.X.norm())) {
    throw Error(ErrorKind::NoConvergence, "Riccati residual too large");
  }
  return sol;
}

}  // namespace daeref

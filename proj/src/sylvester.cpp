#include "daeref/sylvester.hpp"

#include <complex>
#include <string>

#include "daeref/error.hpp"

namespace daeref {

namespace {

struct Dims {
  Index n, p, k, m;
};

Dims check_dims(const Mat& a, const Mat& b, const Mat& c, const Mat& f,
                const Mat& h) {
  const Dims d{a.rows(), b.cols(), c.rows(), f.rows()};
  if (a.cols() != d.n || b.rows() != d.n || c.cols() != d.n || f.cols() != d.m ||
      h.rows() != d.k || h.cols() != d.m) {
    throw Error(ErrorKind::DimensionMismatch,
                "Sylvester data must be A n×n, B n×p, C k×n, F m×m, H k×m");
  }
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(c, "C");
  require_finite(f, "F");
  require_finite(h, "H");
  return d;
}

void require_feasible(const Mat& a, const Mat& b, const Mat& c, const Mat& f,
                      const Mat& h, const SylvesterSolution& sol) {
  const SylvesterResiduals r = sylvester_residuals(a, b, c, f, h, sol);
  if (!sol.P.allFinite() || !sol.Q.allFinite() || r.dynamics > 1e-8 * r.scale ||
      r.output > 1e-8 * r.scale) {
    throw Error(ErrorKind::Infeasible,
                "no exact solution: residuals " + std::to_string(r.dynamics) +
                    ", " + std::to_string(r.output));
  }
}

// Upper-triangular factor of mᵀ = Q̃·[R̃; 0], returned as the pair
// (lower-triangular R = R̃ᵀ, orthogonal W = Q̃ᵀ) so that m = [R 0]·W.
std::pair<Mat, Mat> rq_factor(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m.transpose());
  const Index rows = m.rows();
  const Mat q = qr.householderQ() * Mat::Identity(m.cols(), m.cols());
  const Mat r = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
  return {r.transpose(), q.transpose()};
}

}  // namespace

SylvesterResiduals sylvester_residuals(const Mat& a, const Mat& b, const Mat& c,
                                       const Mat& f, const Mat& h,
                                       const SylvesterSolution& sol) {
  SylvesterResiduals r;
  r.dynamics = (sol.P * f - a * sol.P - b * sol.Q).norm();
  r.output = (h - c * sol.P).norm();
  const double data = a.norm() + b.norm() + c.norm() + f.norm() + h.norm();
  r.scale = std::max(1.0, data) * std::max(1.0, sol.P.norm() + sol.Q.norm());
  return r;
}

SylvesterSolution solve_sylvester_kron(const Mat& a, const Mat& b, const Mat& c,
                                       const Mat& f, const Mat& h) {
  const Dims d = check_dims(a, b, c, f, h);
  const Mat im = Mat::Identity(d.m, d.m);
  const Mat in = Mat::Identity(d.n, d.n);

  const Mat output_op = kron(im, c);
  const Mat output_inv = pinv(output_op);
  const Mat free_dirs = Mat::Identity(d.n * d.m, d.n * d.m) - output_inv * output_op;
  const Vec p_particular = output_inv * vec(h);

  const Mat dynamics_op = -kron(im, a) + kron(f.transpose(), in);
  Mat stacked(d.n * d.m, d.n * d.m + d.p * d.m);
  stacked << dynamics_op * free_dirs, -kron(im, b);
  const Vec rhs = -dynamics_op * p_particular;
  const Vec yq = pinv(stacked) * rhs;

  SylvesterSolution sol;
  sol.P = unvec(p_particular + free_dirs * yq.head(d.n * d.m), d.n, d.m);
  sol.Q = unvec(yq.tail(d.p * d.m), d.p, d.m);
  require_feasible(a, b, c, f, h, sol);
  return sol;
}

SylvesterSolution solve_sylvester_rq(const Mat& a, const Mat& b, const Mat& c,
                                     const Mat& f, const Mat& h) {
  const Dims d = check_dims(a, b, c, f, h);
  if (d.k > d.n || rank_of(c) < d.k) {
    throw Error(ErrorKind::RankDeficiency, "C must have full row rank");
  }
  const auto [r1, w1] = rq_factor(c);
  const Mat q1 = w1.topRows(d.k);
  const Mat q2 = w1.bottomRows(d.n - d.k);

  const Mat b1 = q1 * b;
  if (d.k > d.p || rank_of(b1) < d.k) {
    throw Error(ErrorKind::RankDeficiency,
                "projected input matrix Q1·B must have full row rank");
  }
  const auto [r2, w2] = rq_factor(b1);
  const Mat q3 = w2.topRows(d.k);
  const Mat e = q2 * b * w2.transpose();
  const Mat e1 = e.leftCols(d.k);

  const Mat a11 = q1 * a * q1.transpose();
  const Mat a12 = q1 * a * q2.transpose();
  const Mat a21 = q2 * a * q1.transpose();
  const Mat a22 = q2 * a * q2.transpose();

  const auto r1_inv = [&](const Mat& x) -> Mat {
    return r1.triangularView<Eigen::Lower>().solve(x);
  };
  const auto r2_inv = [&](const Mat& x) -> Mat {
    return r2.triangularView<Eigen::Lower>().solve(x);
  };

  const Mat h_pulled = r1_inv(h);  // R1⁻¹H
  const Mat reduced = a22 - e1 * r2_inv(a12);
  const Index nz = d.n - d.k;

  if (nz > 0 && d.m > 0) {
    const Eigen::VectorXcd ev_f = f.eigenvalues();
    const Eigen::VectorXcd ev_r = reduced.eigenvalues();
    const double tol = 1e-8 * std::max({1.0, f.norm(), reduced.norm()});
    for (Index i = 0; i < ev_f.size(); ++i) {
      for (Index j = 0; j < ev_r.size(); ++j) {
        if (std::abs(ev_f(i) - ev_r(j)) <= tol) {
          throw Error(ErrorKind::CommonEigenvalues,
                      "F and the reduced state matrix share an eigenvalue");
        }
      }
    }
  }

  Mat z = Mat::Zero(nz, d.m);
  if (nz > 0 && d.m > 0) {
    const Mat rhs = e1 * r2_inv(h_pulled * f) + a21 * h_pulled -
                    e1 * r2_inv(a11 * h_pulled);
    const Mat op = kron(f.transpose(), Mat::Identity(nz, nz)) -
                   kron(Mat::Identity(d.m, d.m), reduced);
    z = unvec(op.fullPivLu().solve(vec(rhs)), nz, d.m);
  }
  const Mat q3_hat = r2_inv(h_pulled * f - a12 * z - a11 * h_pulled);

  SylvesterSolution sol;
  sol.P = q2.transpose() * z + q1.transpose() * h_pulled;
  sol.Q = q3.transpose() * q3_hat;
  require_feasible(a, b, c, f, h, sol);
  return sol;
}

}  // namespace daeref

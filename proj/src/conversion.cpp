#include "daeref/conversion.hpp"

#include "daeref/error.hpp"

namespace daeref {

Mat DvSystem::Cd() const {
  Mat out(Cu.rows() + C.rows(), n());
  out << Cu, C;
  return out;
}

Mat DvSystem::Dd() const {
  Mat out = Mat::Zero(Cu.rows() + C.rows(), p());
  out.topRows(Du.rows()) = Du;
  return out;
}

void DvSystem::validate() const {
  const Index nn = Ad.rows();
  const Index pp = Bd.cols();
  if (Ad.cols() != nn || Bd.rows() != nn || Cu.rows() != pp || Cu.cols() != nn ||
      Du.rows() != pp || Du.cols() != pp || C.cols() != nn) {
    throw Error(ErrorKind::DimensionMismatch,
                "DV matrices A_d (n×n), B_d (n×p), C_u (p×n), D_u (p×p), C (k×n) are inconsistent");
  }
  require_finite(Ad, "A_d");
  require_finite(Bd, "B_d");
  require_finite(Cu, "C_u");
  require_finite(Du, "D_u");
  require_finite(C, "C");
  for (const Vec& pt : initial.points) {
    if (pt.size() != nn) {
      throw Error(ErrorKind::DimensionMismatch, "initial state has wrong dimension");
    }
  }
}

DvSystem dae_to_dv(const DaeSystem& sys, const RankTolerance& tol) {
  sys.validate();
  const Index n = sys.n();
  const Index p = sys.p();
  Mat m(n, n + p);
  m << sys.E, -sys.B;
  if (rank_of(m, tol) < n) {
    throw Error(ErrorKind::NotConvertible, "[E B] does not have full row rank");
  }
  const Mat right_inverse = pinv(m, tol);
  const Mat kernel = kernel_basis(m, tol);

  DvSystem dv;
  dv.Ad = right_inverse.topRows(n) * sys.A;
  dv.Cu = right_inverse.bottomRows(p) * sys.A;
  dv.Bd = kernel.topRows(n);
  dv.Du = kernel.bottomRows(p);
  dv.C = sys.C;
  dv.initial = sys.initial;

  const double scale = std::max(1.0, sys.E.norm() + sys.A.norm() + sys.B.norm());
  const double res_a = (sys.E * dv.Ad - sys.B * dv.Cu - sys.A).norm();
  const double res_b = (sys.E * dv.Bd - sys.B * dv.Du).norm();
  if (res_a > 1e-10 * scale * std::max(1.0, dv.Ad.norm()) ||
      res_b > 1e-10 * scale) {
    throw Error(ErrorKind::NotConvertible, "conversion identities violated");
  }
  return dv;
}

DaeFromDv dv_to_dae(const DvSystem& dv, const RankTolerance& tol) {
  dv.validate();
  const Index n = dv.n();
  const Index p = dv.p();
  Mat driving(n + p, p);
  driving << dv.Bd, dv.Du;
  Mat drift(n + p, n);
  drift << dv.Ad, dv.Cu;
  if (rank_of(driving, tol) < p) {
    throw Error(ErrorKind::DegenerateDrivingMatrix,
                "[B_d; D_u] does not have full column rank");
  }

  Eigen::JacobiSVD<Mat> svd(driving, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat& u = svd.matrixU();
  const Mat up = u.leftCols(p);
  Mat un = u.rightCols(n);
  normalize_column_signs(un);

  DaeFromDv out;
  out.dae.E = un.topRows(n).transpose();
  out.dae.A = un.transpose() * drift;
  out.dae.B = -un.bottomRows(p).transpose();
  out.dae.C = dv.C;
  out.dae.initial = dv.initial;

  const Vec inv_sigma = svd.singularValues().cwiseInverse();
  const Mat scaled = svd.matrixV() * inv_sigma.asDiagonal();
  out.recovery.n = n;
  out.recovery.W.resize(p, 2 * n + p);
  out.recovery.W << scaled * up.transpose(), -scaled * up.transpose() * drift;
  return out;
}

Vec recover_driving_input(const DrivingRecovery& rec, const Vec& x_next,
                          const Vec& u, const Vec& x) {
  if (x_next.size() != rec.n || x.size() != rec.n ||
      u.size() != rec.W.cols() - 2 * rec.n) {
    throw Error(ErrorKind::DimensionMismatch, "recovery arguments have wrong sizes");
  }
  return rec.W1() * x_next + rec.W2() * u + rec.W3() * x;
}

}  // namespace daeref

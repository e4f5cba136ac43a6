#include "daeref/refinement.hpp"

#include <algorithm>

#include "daeref/error.hpp"

namespace daeref {

namespace {

void check_controller_dims(const DaeSystem& sys_a, const DaeController& ctrl) {
  sys_a.validate();
  const Index rows = ctrl.Ec.rows();
  if (ctrl.Ac.rows() != rows || ctrl.Bc.rows() != rows || ctrl.Ec.cols() != sys_a.n() ||
      ctrl.Ac.cols() != sys_a.n() || ctrl.Bc.cols() != sys_a.p()) {
    throw Error(ErrorKind::DimensionMismatch,
                "controller must be E_c, A_c (n_c×m) and B_c (n_c×q)");
  }
  require_finite(ctrl.Ec, "E_c");
  require_finite(ctrl.Ac, "A_c");
  require_finite(ctrl.Bc, "B_c");
}

// [E −B; E_c −B_c] acting on [x_a(t+1); u_a(t)].
Mat interconnection(const DaeSystem& sys_a, const DaeController& ctrl) {
  Mat out(sys_a.n() + ctrl.rows(), sys_a.n() + sys_a.p());
  out << sys_a.E, -sys_a.B, ctrl.Ec, -ctrl.Bc;
  return out;
}

Mat drift(const DaeSystem& sys_a, const DaeController& ctrl) {
  Mat out(sys_a.n() + ctrl.rows(), sys_a.n());
  out << sys_a.A, ctrl.Ac;
  return out;
}

Mat stacked_rows(const Mat& top, const Mat& bottom) {
  Mat out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace

std::string_view to_string(ControllerClass cls) {
  switch (cls) {
    case ControllerClass::Blocking: return "Blocking";
    case ControllerClass::Admissible: return "Admissible";
    case ControllerClass::WellPosed: return "WellPosed";
  }
  return "Unknown";
}

Classification classify_controller(const DaeSystem& sys_a, const DaeController& ctrl,
                                   const RankTolerance& tol) {
  check_controller_dims(sys_a, ctrl);
  const Mat lhs = interconnection(sys_a, ctrl);
  Mat full(lhs.rows(), lhs.cols() + sys_a.n());
  full << lhs, drift(sys_a, ctrl);

  Classification out;
  out.unknowns = sys_a.n() + sys_a.p();
  out.rank_without_drift = rank_of(lhs, tol);
  out.rank_with_drift = rank_of(full, tol);
  if (out.rank_without_drift < out.rank_with_drift) {
    out.cls = ControllerClass::Blocking;
  } else if (out.rank_without_drift == out.unknowns) {
    out.cls = ControllerClass::WellPosed;
  } else {
    out.cls = ControllerClass::Admissible;
  }
  return out;
}

ClosedLoop close_loop(const DaeSystem& sys_a, const DaeController& ctrl,
                      const RankTolerance& tol) {
  if (classify_controller(sys_a, ctrl, tol).cls != ControllerClass::WellPosed) {
    throw Error(ErrorKind::NotWellPosed, "controller is not well-posed for the system");
  }
  const Mat lhs = interconnection(sys_a, ctrl);
  const Mat rhs = drift(sys_a, ctrl);
  const Mat sol = pinv(lhs, tol) * rhs;
  if ((lhs * sol - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) {
    throw Error(ErrorKind::NotWellPosed, "closed loop equations are inconsistent");
  }
  ClosedLoop out;
  out.A_cal = sol.topRows(sys_a.n());
  out.B_cal = sol.bottomRows(sys_a.p());
  out.C_out = sys_a.C;
  return out;
}

Mat lift_controller_to_dv(const DaeSystem& sys_a, const DaeController& ctrl,
                          const DrivingRecovery& rec) {
  const ClosedLoop loop = close_loop(sys_a, ctrl);
  if (rec.n != sys_a.n() || rec.W2().cols() != sys_a.p()) {
    throw Error(ErrorKind::DimensionMismatch, "recovery matrix does not match the system");
  }
  return rec.W1() * loop.A_cal + rec.W2() * loop.B_cal + rec.W3();
}

DaeController controller_from_driving_gain(const DrivingRecovery& rec, const Mat& t) {
  if (t.rows() != rec.W.rows() || t.cols() != rec.n) {
    throw Error(ErrorKind::DimensionMismatch, "driving gain must be p×n");
  }
  return DaeController{rec.W1(), t - rec.W3(), -rec.W2()};
}

Vec RefinedController::driving(const Vec& x, const Vec& z, const Vec& v) const {
  Vec s = feed.state_gain * x;
  if (feed.co_state_gain.cols() > 0) s += feed.co_state_gain * z;
  if (feed.input_gain.cols() > 0) s += feed.input_gain * v;
  return s;
}

RefinedController refine_strategy_to_dae(const DvSystem& dv, const DrivingFeed& feed,
                                         const Mat& f, const Mat& g, const Mat& h,
                                         const Mat& p) {
  dv.validate();
  RefinedController out;
  const Mat bt = dv.Bd.transpose();
  out.E_ctrl = bt;
  out.A_ctrl = bt * dv.Ad;
  out.S_ctrl = bt * dv.Bd;
  out.Cu = dv.Cu;
  out.Du = dv.Du;
  out.feed = feed;
  const Index m = f.rows();
  const Index q = g.cols();
  out.F = f.size() == 0 ? Mat(0, 0) : f;
  out.G = g.size() == 0 ? Mat(m, q) : g;
  out.H = h.size() == 0 ? Mat(dv.k(), m) : h;
  out.P = p.size() == 0 ? Mat(dv.n(), m) : p;
  if (out.feed.state_gain.size() == 0) out.feed.state_gain = Mat::Zero(dv.p(), dv.n());
  if (out.feed.co_state_gain.size() == 0) out.feed.co_state_gain = Mat::Zero(dv.p(), m);
  if (out.feed.input_gain.size() == 0) out.feed.input_gain = Mat::Zero(dv.p(), q);
  if (out.feed.lifted_gain.size() == 0) out.feed.lifted_gain = Mat::Zero(q, m);
  if (out.feed.state_gain.rows() != dv.p() || out.feed.state_gain.cols() != dv.n() ||
      out.feed.co_state_gain.rows() != dv.p() || out.feed.co_state_gain.cols() != m ||
      out.feed.input_gain.rows() != dv.p() || out.feed.input_gain.cols() != q ||
      out.feed.lifted_gain.rows() != q || out.feed.lifted_gain.cols() != m ||
      out.F.cols() != m || out.G.rows() != m || out.H.cols() != m ||
      out.P.rows() != dv.n() || out.P.cols() != m) {
    throw Error(ErrorKind::DimensionMismatch, "driving feed dimensions are inconsistent");
  }
  return out;
}

bool is_well_posed_interconnection(const DaeSystem& concrete, const RefinedController& ctrl) {
  return rank_of(stacked_rows(concrete.E, ctrl.E_ctrl)) == concrete.n();
}

StepResult refined_step(const DaeSystem& concrete, const RefinedController& ctrl,
                        const Vec& x, const Vec& s) {
  StepResult out;
  out.u = ctrl.Cu * x + ctrl.Du * s;
  const Mat lhs = stacked_rows(concrete.E, ctrl.E_ctrl);
  Vec rhs(lhs.rows());
  rhs << concrete.A * x + concrete.B * out.u, ctrl.A_ctrl * x + ctrl.S_ctrl * s;
  out.x_next = lhs.completeOrthogonalDecomposition().solve(rhs);
  if ((lhs * out.x_next - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) {
    throw Error(ErrorKind::InconsistentInitialState,
                "state admits no continuation under the refined controller");
  }
  return out;
}

Mat relation_closed_loop(const DvSystem& dv, const RefinedController& ctrl) {
  const Mat s_gain = ctrl.feed.state_gain * ctrl.P + ctrl.feed.co_state_gain +
                     ctrl.feed.input_gain * ctrl.feed.lifted_gain;
  return dv.Ad * ctrl.P + dv.Bd * s_gain;
}

Mat realized_closed_loop(const DaeSystem& concrete, const RefinedController& ctrl) {
  const Index n = concrete.n();
  if (ctrl.m() != n) {
    throw Error(ErrorKind::DimensionMismatch, "realized closed loop needs m = n");
  }
  Mat out(n, n);
  for (Index i = 0; i < n; ++i) {
    const Vec e = Vec::Unit(n, i);
    const Vec s = ctrl.driving(e, e, ctrl.lifted_input(e));
    out.col(i) = refined_step(concrete, ctrl, e, s).x_next;
  }
  return out;
}

ExactRefinement exact_refine(const DaeSystem& concrete, const DaeSystem& abstract_sys,
                             const DaeController& ctrl, const ExactRefineOptions& options) {
  ExactRefinement out;
  out.dv_concrete = options.concrete_dv ? *options.concrete_dv : dae_to_dv(concrete);
  out.dv_abstract = options.abstract_dv ? *options.abstract_dv : dae_to_dv(abstract_sys);
  const DvSystem& dv = out.dv_concrete;
  const DvSystem& dva = out.dv_abstract;
  dv.validate();
  dva.validate();

  const DrivingRecovery rec = dv_to_dae(dva).recovery;
  out.abstract_loop = close_loop(abstract_sys, ctrl);
  out.T = rec.W1() * out.abstract_loop.A_cal + rec.W2() * out.abstract_loop.B_cal + rec.W3();

  const Mat& h = options.relation;
  if (h.rows() != dv.n() || h.cols() != dva.n()) {
    throw Error(ErrorKind::DimensionMismatch, "relation map must be n×m");
  }
  const Mat bd_inv = pinv(dv.Bd);
  const Mat input_target = h * dva.Bd;
  const Mat state_target = h * dva.Ad - dv.Ad * h;
  const Mat r = bd_inv * input_target;
  const Mat q = bd_inv * state_target;
  const double scale = std::max(1.0, dv.Ad.norm() + dva.Ad.norm() + dva.Bd.norm()) *
                       std::max(1.0, h.norm());
  if ((dv.Bd * r - input_target).norm() > 1e-9 * scale ||
      (dv.Bd * q - state_target).norm() > 1e-9 * scale ||
      (dv.C * h - dva.C).norm() > 1e-9 * scale) {
    throw Error(ErrorKind::MissingInterface,
                "relation admits no exact interface between the DV systems");
  }

  Mat k;
  if (options.gain) {
    k = *options.gain;
  } else {
    k = -solve_dare(dv.Ad, dv.Bd, Mat::Identity(dv.n(), dv.n()),
                    Mat::Identity(dv.p(), dv.p()))
             .K;
  }
  const DrivingFeed feed{k, q - k * h, r, out.T};
  out.controller = refine_strategy_to_dae(dv, feed, dva.Ad, dva.Bd, dva.C, h);
  if (!is_well_posed_interconnection(concrete, out.controller)) {
    throw Error(ErrorKind::NotWellPosed, "[E; B_dᵀ] lacks full column rank");
  }
  return out;
}

ApproxRefinement approx_refine(const DaeSystem& concrete,
                               const AbstractionPipelineResult& abstraction,
                               const DaeController& ctrl, const Vec& x0, Index horizon) {
  const DvSystem& dv = abstraction.dv_concrete;
  const DvSystem& dva = abstraction.dv_abstract;
  if (x0.size() != dv.n()) {
    throw Error(ErrorKind::DimensionMismatch, "x0 must have n entries");
  }
  validate_certificate(abstraction.cert, dv, dva);

  ApproxRefinement out;
  out.T = lift_controller_to_dv(abstraction.dae_abstract, ctrl, abstraction.recovery_abstract);
  out.cert = abstraction.cert;
  out.z0 = match_initial_state(out.cert, x0);

  const Mat loop = dva.Ad + dva.Bd * out.T;
  Vec z = out.z0;
  for (Index t = 0; t < horizon; ++t) {
    out.v_max = std::max(out.v_max, (out.T * z).norm());
    z = loop * z;
  }
  bind_initial_pair(out.cert, out.z0, x0, out.v_max);
  out.epsilon = out.cert.epsilon;

  const Mat& k = out.cert.stability.K;
  const DrivingFeed feed{k, out.cert.Q - k * out.cert.P, out.cert.R, out.T};
  out.controller = refine_strategy_to_dae(dv, feed, dva.Ad, dva.Bd, dva.C, out.cert.P);
  if (!is_well_posed_interconnection(concrete, out.controller)) {
    throw Error(ErrorKind::NotWellPosed, "[E; B_dᵀ] lacks full column rank");
  }
  return out;
}

}  // namespace daeref

#pragma once

#include <optional>
#include <string_view>

#include "daeref/certificates.hpp"
#include "daeref/conversion.hpp"
#include "daeref/reduction.hpp"

namespace daeref {

/// E_c·x_a(t+1) = A_c·x_a(t) + B_c·u_a(t).
struct DaeController {
  Mat Ec;
  Mat Ac;
  Mat Bc;

  Index rows() const { return Ec.rows(); }
};

enum class ControllerClass { Blocking, Admissible, WellPosed };

std::string_view to_string(ControllerClass cls);

struct Classification {
  ControllerClass cls = ControllerClass::Blocking;
  Index rank_without_drift = 0;  // rank [E B; E_c B_c]
  Index rank_with_drift = 0;     // rank [E B A; E_c B_c A_c]
  Index unknowns = 0;            // m + q
};

Classification classify_controller(const DaeSystem& sys_a, const DaeController& ctrl,
                                   const RankTolerance& tol = {});

/// x_a(t+1) = 𝒜·x_a(t), u_a(t) = ℬ·x_a(t), y_a(t) = C_out·x_a(t).
struct ClosedLoop {
  Mat A_cal;
  Mat B_cal;
  Mat C_out;
};

ClosedLoop close_loop(const DaeSystem& sys_a, const DaeController& ctrl,
                      const RankTolerance& tol = {});

/// Driving gain T with s_a = T·x_a reproducing the closed loop on the DV
/// system whose recovery matrix is `rec`.
Mat lift_controller_to_dv(const DaeSystem& sys_a, const DaeController& ctrl,
                          const DrivingRecovery& rec);

/// The controller W1·x⁺ + W2·u + W3·x = T·x, i.e. the DAE constraint that
/// forces s = T·x on the DV system behind `rec`.
DaeController controller_from_driving_gain(const DrivingRecovery& rec, const Mat& t);

/// s(t) = state_gain·x(t) + co_state_gain·z(t) + input_gain·v(t), where z is
/// the co-simulated abstract DV state and v = lifted_gain·z unless an
/// explicit abstract input is supplied.
struct DrivingFeed {
  Mat state_gain;
  Mat co_state_gain;
  Mat input_gain;
  Mat lifted_gain;
};

/// B_dᵀ·x(t+1) = B_dᵀA_d·x(t) + B_dᵀB_d·s(t), u(t) = C_u·x(t) + D_u·s(t),
/// with s from `feed` and the co-state z(t+1) = F·z(t) + G·v(t).
struct RefinedController {
  Mat E_ctrl;
  Mat A_ctrl;
  Mat S_ctrl;
  Mat Cu;
  Mat Du;
  DrivingFeed feed;
  Mat F;
  Mat G;
  Mat H;  // abstract output map, y_a = H·z
  Mat P;  // relation x ≈ P·z

  Index n() const { return E_ctrl.cols(); }
  Index p() const { return E_ctrl.rows(); }
  Index m() const { return F.rows(); }
  Index q() const { return G.cols(); }

  Vec driving(const Vec& x, const Vec& z, const Vec& v) const;
  Vec lifted_input(const Vec& z) const { return feed.lifted_gain * z; }
};

/// Controller for the DAE that enforces the DV transition under the given
/// feed. F/G/H/P describe the co-state; pass empty matrices for none.
RefinedController refine_strategy_to_dae(const DvSystem& dv, const DrivingFeed& feed,
                                         const Mat& f = Mat(), const Mat& g = Mat(),
                                         const Mat& h = Mat(), const Mat& p = Mat());

/// Rank of [E; B_dᵀ] equals n.
bool is_well_posed_interconnection(const DaeSystem& concrete, const RefinedController& ctrl);

/// One closed-loop step: solves [E; E_ctrl]·x⁺ = [A·x + B·u; A_ctrl·x + S_ctrl·s]
/// with u = C_u·x + D_u·s. Throws InconsistentInitialState if the stacked
/// system has no exact solution.
struct StepResult {
  Vec x_next;
  Vec u;
};

StepResult refined_step(const DaeSystem& concrete, const RefinedController& ctrl,
                        const Vec& x, const Vec& s);

/// Closed-loop matrix z ↦ x(t+1) on the relation x = P·z with v = T·z.
Mat relation_closed_loop(const DvSystem& dv, const RefinedController& ctrl);

/// n×n closed-loop map of the concrete DAE realized by per-step solves with
/// z = x (requires m = n).
Mat realized_closed_loop(const DaeSystem& concrete, const RefinedController& ctrl);

struct ExactRefineOptions {
  Mat relation;                   // H with x = H·x_a (DV coordinates)
  std::optional<Mat> gain;        // K; default: LQR gain with identity weights
  std::optional<DvSystem> concrete_dv;
  std::optional<DvSystem> abstract_dv;
};

struct ExactRefinement {
  RefinedController controller;
  DvSystem dv_concrete;
  DvSystem dv_abstract;
  ClosedLoop abstract_loop;
  Mat T;
};

/// Interface s = R·s_a + Q·x_a + K·(x − H·x_a) with B_d·R = H·B_da and
/// B_d·Q = H·A_da − A_d·H (exact). Throws NotWellPosed or MissingInterface.
ExactRefinement exact_refine(const DaeSystem& concrete, const DaeSystem& abstract_sys,
                             const DaeController& ctrl, const ExactRefineOptions& options);

struct ApproxRefinement {
  RefinedController controller;
  RefinementCertificate cert;  // with v_max and ε bound to the initial pair
  Mat T;
  Vec z0;
  double v_max = 0.0;
  double epsilon = 0.0;
};

/// Interface-coupled refinement through the certificate of `abstraction`;
/// z0 = match_initial_state(x0) and v_max = sup ‖T·z(t)‖ over `horizon` steps
/// of the abstract closed loop.
ApproxRefinement approx_refine(const DaeSystem& concrete,
                               const AbstractionPipelineResult& abstraction,
                               const DaeController& ctrl, const Vec& x0, Index horizon);

}  // namespace daeref

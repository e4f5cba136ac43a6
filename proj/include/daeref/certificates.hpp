#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "daeref/conversion.hpp"
#include "daeref/sylvester.hpp"

namespace daeref {

/// M ⪰ CᵀC and (A+BK)ᵀM(A+BK) ⪯ λ²M, so V(e) = √(eᵀMe) contracts by λ along
/// e⁺ = (A+BK)e and dominates ‖Ce‖.
struct StabilityCert {
  Mat M;
  Mat K;
  double lambda = 0.0;
};

struct StabilityCheck {
  double output_margin = 0.0;    // min eig(M − CᵀC) / ‖M‖
  double decrease_margin = 0.0;  // min eig(λ²M − (A+BK)ᵀM(A+BK)) / ‖M‖
  double spectral_radius = 0.0;  // ρ(A + BK)
  bool ok = false;
};

StabilityCheck check_stability_cert(const Mat& a, const Mat& b, const Mat& c,
                                    const StabilityCert& cert);

/// {0.30, 0.35, ..., 0.95}.
std::vector<double> default_lambda_grid();

/// Candidate for one λ: L from the scaled pair (A/λ, B/λ), X the trace-minimal
/// matrix dominating L, then the cross-weighted Riccati equation for ΔM and
/// the gain. Returns nullopt when the Riccati step fails or the invariants
/// do not hold.
std::optional<StabilityCert> certify_at_lambda(const Mat& a, const Mat& b,
                                               const Mat& c, double lambda);

/// Lower is better. The default ranks candidates by ‖√M·B‖₂/(1 − λ).
using CertObjective = std::function<double(const StabilityCert&)>;

StabilityCert solve_stability_cert(const Mat& a, const Mat& b, const Mat& c,
                                   const std::vector<double>& lambda_grid =
                                       default_lambda_grid(),
                                   const CertObjective& objective = {});

/// Simulation function V(z, x) = √((x − Pz)ᵀM(x − Pz)) with interface
/// u = R·v + Q·z + K·(x − P·z) between an abstract DV (F, G, H) and a
/// concrete one (A, B, C).
struct RefinementCertificate {
  Mat P;
  Mat Q;
  Mat R;
  StabilityCert stability;
  double gamma_coeff = 0.0;
  double v_max = 0.0;
  double epsilon = 0.0;
};

/// Minimizer of ‖√M(BR − PG)‖_F.
Mat choose_R(const Mat& p, const Mat& g, const Mat& b, const Mat& m);

/// ‖√M(BR − PG)‖₂ / (1 − λ).
double gamma_coefficient(const StabilityCert& stability, const Mat& b,
                         const Mat& r, const Mat& p, const Mat& g);

/// Builds the certificate from the stability part and a Sylvester solution,
/// choosing R by least squares. Throws InvalidCertificate when any invariant
/// fails between `concrete` (A, B, C) and `abstract` (F, G, H).
RefinementCertificate assemble_certificate(const DvSystem& concrete,
                                           const DvSystem& abstract,
                                           const StabilityCert& stability,
                                           const SylvesterSolution& sylvester);

/// Throws InvalidCertificate if any invariant fails.
void validate_certificate(const RefinementCertificate& cert,
                          const DvSystem& concrete, const DvSystem& abstract);

Vec interface_apply(const RefinementCertificate& cert, const Vec& v,
                    const Vec& z, const Vec& x);

double lyapunov_value(const RefinementCertificate& cert, const Vec& z,
                      const Vec& x);

/// max(V(z, x), gamma_coeff·v_max).
double sim_fn_value(const RefinementCertificate& cert, const Vec& z,
                    const Vec& x);

double epsilon_bound(const RefinementCertificate& cert, const Vec& z0,
                     const Vec& x0, double v_max);

/// Records v_max and ε = epsilon_bound(...) into the certificate.
void bind_initial_pair(RefinementCertificate& cert, const Vec& z0,
                       const Vec& x0, double v_max);

/// argmin_z V(z, x0).
Vec match_initial_state(const RefinementCertificate& cert, const Vec& x0);

/// Precision of the composed relation.
double compose_transitivity(double eps1, double eps2);

struct RelationCounterexample {
  Index trial = 0;
  Vec abstract_state;
  Vec abstract_successor;
  std::string reason;
};

struct RelationVerdict {
  bool holds = true;
  Index trials_checked = 0;
  Index blocking_skipped = 0;
  std::optional<RelationCounterexample> counterexample;
};

/// Sampled falsification of "x = H·x_a is a simulation relation of
/// `abstract_sys` by `concrete`": random abstract states and random abstract
/// transitions must be matched by a concrete transition staying in the
/// relation, with equal outputs. A passing verdict is evidence, not proof.
RelationVerdict verify_relation_sampled(const DaeSystem& abstract_sys,
                                        const DaeSystem& concrete,
                                        const Mat& h, Index trials,
                                        std::uint64_t seed,
                                        double tol = 1e-9);

/// DV systems viewed as DAEs with E = I and input s.
DaeSystem dv_as_dae(const DvSystem& dv);

}  // namespace daeref

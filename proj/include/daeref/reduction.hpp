#pragma once

#include <vector>

#include "daeref/certificates.hpp"
#include "daeref/conversion.hpp"

namespace daeref {

struct StabilizedDv {
  DvSystem dv;  // A_d + B_d·K, B_d, C_u + D_u·K, D_u, C
  Mat K;
  StabilityCert cert;
};

/// Loop shift s = K·x + s' with K from the stability certificate of
/// (A_d, B_d, C).
StabilizedDv stabilize_dv(const DvSystem& dv,
                          const std::vector<double>& lambda_grid = default_lambda_grid());

/// Same shift with an already computed certificate.
StabilizedDv stabilize_dv(const DvSystem& dv, const StabilityCert& cert);

struct TruncationResult {
  DvSystem reduced;
  Vec hankel;  // all n Hankel singular values, descending
  Mat T;       // n×m: x ≈ T·x_r
  Mat Tinv;    // m×n: x_r = Tinv·x on the balanced coordinates
};

/// Square-root balanced truncation of the stable DV system with stacked
/// output [C_u; C] and feedthrough D_u kept as is. Throws UnstableInput if
/// ρ(A_d) ≥ 1 and OrderTooLarge if order > n or the kept Hankel singular
/// values include zeros.
TruncationResult balanced_truncation(const DvSystem& stable, Index order);

enum class SylvesterMethod { Kronecker, Rq };

struct PipelineOptions {
  Index order = 1;
  std::vector<double> lambda_grid = default_lambda_grid();
  SylvesterMethod sylvester = SylvesterMethod::Kronecker;
  /// Pick λ by the γ coefficient of the finished certificate instead of the
  /// ‖√M·B‖₂/(1 − λ) estimate.
  bool rank_lambda_by_gamma = true;
};

struct AbstractionPipelineResult {
  DvSystem dv_concrete;
  DvSystem dv_stabilized;
  DvSystem dv_abstract;
  DaeSystem dae_abstract;
  DrivingRecovery recovery_abstract;
  RefinementCertificate cert;
  Vec hankel;
};

/// DAE → DV → stabilize → balanced truncation → abstract DAE, plus the
/// certificate relating the abstract DV to the concrete DV.
AbstractionPipelineResult build_abstraction_pipeline(const DaeSystem& concrete,
                                                     const PipelineOptions& options);

SylvesterSolution solve_sylvester(SylvesterMethod method, const Mat& a,
                                  const Mat& b, const Mat& c, const Mat& f,
                                  const Mat& h);

}  // namespace daeref

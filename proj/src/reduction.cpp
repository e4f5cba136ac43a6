#include "daeref/reduction.hpp"

#include <limits>

#include "daeref/error.hpp"

namespace daeref {

StabilizedDv stabilize_dv(const DvSystem& dv, const std::vector<double>& lambda_grid) {
  dv.validate();
  return stabilize_dv(dv, solve_stability_cert(dv.Ad, dv.Bd, dv.C, lambda_grid));
}

StabilizedDv stabilize_dv(const DvSystem& dv, const StabilityCert& cert) {
  StabilizedDv out;
  out.K = cert.K;
  out.cert = cert;
  out.dv = dv;
  out.dv.Ad = dv.Ad + dv.Bd * cert.K;
  out.dv.Cu = dv.Cu + dv.Du * cert.K;
  if (spectral_radius(out.dv.Ad) >= 1.0) {
    throw Error(ErrorKind::NotStabilizable, "gain does not stabilize A_d");
  }
  return out;
}

TruncationResult balanced_truncation(const DvSystem& stable, Index order) {
  stable.validate();
  const Index n = stable.n();
  if (order < 1 || order > n) {
    throw Error(ErrorKind::OrderTooLarge, "order must lie in [1, n]");
  }
  if (spectral_radius(stable.Ad) >= 1.0) {
    throw Error(ErrorKind::UnstableInput, "balanced truncation needs ρ(A_d) < 1");
  }
  const Mat& a = stable.Ad;
  const Mat& b = stable.Bd;
  const Mat cd = stable.Cd();

  const Mat wc = solve_dlyap(a, b * b.transpose());
  const Mat wo = solve_dlyap(a.transpose(), cd.transpose() * cd);
  const Mat lc = sqrtm_psd(wc);
  const Mat lo = sqrtm_psd(wo);
  Eigen::JacobiSVD<Mat> svd(lo * lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sigma = svd.singularValues();
  if (sigma(order - 1) <= 1e-12 * std::max(sigma(0), std::numeric_limits<double>::min())) {
    throw Error(ErrorKind::OrderTooLarge,
                "requested order exceeds the number of nonzero Hankel singular values");
  }

  const Vec root = sigma.head(order).cwiseSqrt().cwiseInverse();
  Mat t = lc * svd.matrixV().leftCols(order) * root.asDiagonal();
  Mat tinv = root.asDiagonal() * svd.matrixU().leftCols(order).transpose() * lo;

  // Fix the sign of each balanced coordinate so that its input row has a
  // positive dominant entry (output column when the input row vanishes).
  const Mat br = tinv * b;
  const Mat cr = cd * t;
  for (Index i = 0; i < order; ++i) {
    Index idx = 0;
    double pick = 0.0;
    if (br.row(i).cwiseAbs().maxCoeff(&idx) > 1e-12) {
      pick = br(i, idx);
    } else if (cr.cols() > 0 && cr.rows() > 0) {
      cr.col(i).cwiseAbs().maxCoeff(&idx);
      pick = cr(idx, i);
    }
    if (pick < 0.0) {
      t.col(i) *= -1.0;
      tinv.row(i) *= -1.0;
    }
  }

  TruncationResult out;
  out.hankel = sigma;
  out.T = t;
  out.Tinv = tinv;
  const Index p = stable.p();
  const Mat c_red = cd * t;
  out.reduced.Ad = tinv * a * t;
  out.reduced.Bd = tinv * b;
  out.reduced.Cu = c_red.topRows(p);
  out.reduced.Du = stable.Du;
  out.reduced.C = c_red.bottomRows(stable.k());
  out.reduced.initial = InitialStates::free();
  return out;
}

SylvesterSolution solve_sylvester(SylvesterMethod method, const Mat& a,
                                  const Mat& b, const Mat& c, const Mat& f,
                                  const Mat& h) {
  return method == SylvesterMethod::Rq ? solve_sylvester_rq(a, b, c, f, h)
                                       : solve_sylvester_kron(a, b, c, f, h);
}

namespace {

struct Reduced {
  StabilizedDv stabilized;
  TruncationResult truncation;
  SylvesterSolution sylvester;
};

Reduced reduce_with(const DvSystem& dv, const StabilityCert& cert,
                    const PipelineOptions& options) {
  Reduced out;
  out.stabilized = stabilize_dv(dv, cert);
  out.truncation = balanced_truncation(out.stabilized.dv, options.order);
  const DvSystem& abs = out.truncation.reduced;
  out.sylvester = solve_sylvester(options.sylvester, dv.Ad, dv.Bd, dv.C, abs.Ad, abs.C);
  return out;
}

}  // namespace

AbstractionPipelineResult build_abstraction_pipeline(const DaeSystem& concrete,
                                                     const PipelineOptions& options) {
  const DvSystem dv = dae_to_dv(concrete);
  if (options.order < 1 || options.order > dv.n()) {
    throw Error(ErrorKind::OrderTooLarge, "order must lie in [1, n]");
  }

  CertObjective objective;
  if (options.rank_lambda_by_gamma) {
    objective = [&](const StabilityCert& cert) {
      const Reduced r = reduce_with(dv, cert, options);
      const Mat rr = choose_R(r.sylvester.P, r.truncation.reduced.Bd, dv.Bd, cert.M);
      return gamma_coefficient(cert, dv.Bd, rr, r.sylvester.P, r.truncation.reduced.Bd);
    };
  }
  const StabilityCert cert =
      solve_stability_cert(dv.Ad, dv.Bd, dv.C, options.lambda_grid, objective);
  const Reduced r = reduce_with(dv, cert, options);

  AbstractionPipelineResult out;
  out.dv_concrete = dv;
  out.dv_stabilized = r.stabilized.dv;
  out.dv_abstract = r.truncation.reduced;
  out.hankel = r.truncation.hankel;
  DaeFromDv back = dv_to_dae(out.dv_abstract);
  out.dae_abstract = std::move(back.dae);
  out.recovery_abstract = std::move(back.recovery);
  out.cert = assemble_certificate(dv, out.dv_abstract, cert, r.sylvester);
  return out;
}

}  // namespace daeref

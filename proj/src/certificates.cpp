#include "daeref/certificates.hpp"

#include <cmath>
#include <limits>

#include "daeref/error.hpp"
#include "daeref/rng.hpp"

namespace daeref {

namespace {

constexpr double kCertTol = 1e-8;

double default_objective(const StabilityCert& cert, const Mat& b) {
  const Mat weighted = sqrtm_psd(cert.M) * b;
  const double norm2 = weighted.size() == 0
                           ? 0.0
                           : Eigen::JacobiSVD<Mat>(weighted).singularValues()(0);
  return norm2 / (1.0 - cert.lambda);
}

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(m).singularValues()(0);
}

}  // namespace

StabilityCheck check_stability_cert(const Mat& a, const Mat& b, const Mat& c,
                                    const StabilityCert& cert) {
  StabilityCheck out;
  const Mat closed = a + b * cert.K;
  const double scale = std::max(cert.M.norm(), std::numeric_limits<double>::min());
  out.output_margin = min_eigenvalue_sym(cert.M - c.transpose() * c) / scale;
  out.decrease_margin =
      min_eigenvalue_sym(cert.lambda * cert.lambda * cert.M -
                         closed.transpose() * cert.M * closed) /
      scale;
  out.spectral_radius = spectral_radius(closed);
  out.ok = cert.M.allFinite() && cert.K.allFinite() &&
           out.output_margin >= -kCertTol && out.decrease_margin >= -kCertTol &&
           out.spectral_radius < 1.0 && min_eigenvalue_sym(cert.M) > 0.0;
  return out;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 13; ++i) grid.push_back((30.0 + 5.0 * i) / 100.0);
  return grid;
}

std::optional<StabilityCert> certify_at_lambda(const Mat& a, const Mat& b,
                                               const Mat& c, double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) return std::nullopt;
  const Index n = a.rows();
  const Index p = b.cols();
  const Mat al = a / lambda;
  const Mat bl = b / lambda;
  const Mat ca = c * al;
  const Mat cb = c * bl;
  const Mat ctc = c.transpose() * c;

  Mat l(n + p, n + p);
  l << ca.transpose() * ca - ctc, ca.transpose() * cb, cb.transpose() * ca,
      cb.transpose() * cb;
  const Mat sym = 0.5 * (l + l.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> eig(sym);
  const double ridge = 1e-9 * std::max(sym.norm(), 1.0);
  const Vec clipped = eig.eigenvalues().cwiseMax(ridge);
  const Mat x = eig.eigenvectors() * clipped.asDiagonal() *
                eig.eigenvectors().transpose();

  DareSolution dare;
  try {
    dare = solve_dare(al, bl, x.topLeftCorner(n, n), x.bottomRightCorner(p, p),
                      x.topRightCorner(n, p));
  } catch (const Error&) {
    return std::nullopt;
  }

  StabilityCert cert;
  cert.M = 0.5 * (dare.X + dare.X.transpose()) + ctc;
  cert.K = -dare.K;
  cert.lambda = lambda;
  if (!check_stability_cert(a, b, c, cert).ok) return std::nullopt;
  return cert;
}

StabilityCert solve_stability_cert(const Mat& a, const Mat& b, const Mat& c,
                                   const std::vector<double>& lambda_grid,
                                   const CertObjective& objective) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || c.cols() != a.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "certificate data must be A n×n, B n×p, C k×n");
  }
  require_finite(a, "A");
  require_finite(b, "B");
  require_finite(c, "C");

  std::optional<StabilityCert> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (double lambda : lambda_grid) {
    std::optional<StabilityCert> candidate = certify_at_lambda(a, b, c, lambda);
    if (!candidate) continue;
    double value = 0.0;
    try {
      value = objective ? objective(*candidate) : default_objective(*candidate, b);
    } catch (const Error&) {
      continue;
    }
    if (std::isfinite(value) && value < best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  }
  if (best) return *best;

  // Distinguish "cannot be stabilized at all" from "not within the grid".
  const Index n = a.rows();
  solve_dare(a, b, Mat::Identity(n, n), Mat::Identity(b.cols(), b.cols()));
  throw Error(ErrorKind::NoFeasibleLambda, "no grid value of λ admits a certificate");
}

Mat choose_R(const Mat& p, const Mat& g, const Mat& b, const Mat& m) {
  const Mat root = sqrtm_psd(m);
  return pinv(root * b) * root * p * g;
}

double gamma_coefficient(const StabilityCert& stability, const Mat& b,
                         const Mat& r, const Mat& p, const Mat& g) {
  const Mat mismatch = sqrtm_psd(stability.M) * (b * r - p * g);
  return spectral_norm(mismatch) / (1.0 - stability.lambda);
}

RefinementCertificate assemble_certificate(const DvSystem& concrete,
                                           const DvSystem& abstract,
                                           const StabilityCert& stability,
                                           const SylvesterSolution& sylvester) {
  RefinementCertificate cert;
  cert.P = sylvester.P;
  cert.Q = sylvester.Q;
  cert.stability = stability;
  cert.R = choose_R(cert.P, abstract.Bd, concrete.Bd, stability.M);
  cert.gamma_coeff =
      gamma_coefficient(stability, concrete.Bd, cert.R, cert.P, abstract.Bd);
  validate_certificate(cert, concrete, abstract);
  return cert;
}

void validate_certificate(const RefinementCertificate& cert,
                          const DvSystem& concrete, const DvSystem& abstract) {
  const Index n = concrete.n();
  const Index m = abstract.n();
  const Index p = concrete.p();
  const Index q = abstract.p();
  if (cert.P.rows() != n || cert.P.cols() != m || cert.Q.rows() != p ||
      cert.Q.cols() != m || cert.R.rows() != p || cert.R.cols() != q ||
      cert.stability.M.rows() != n || cert.stability.M.cols() != n ||
      cert.stability.K.rows() != p || cert.stability.K.cols() != n ||
      concrete.k() != abstract.k()) {
    throw Error(ErrorKind::InvalidCertificate, "certificate dimensions do not match the systems");
  }
  const StabilityCheck check = check_stability_cert(concrete.Ad, concrete.Bd,
                                                    concrete.C, cert.stability);
  if (!check.ok) {
    throw Error(ErrorKind::InvalidCertificate, "stability inequalities do not hold");
  }
  const SylvesterResiduals res = sylvester_residuals(
      concrete.Ad, concrete.Bd, concrete.C, abstract.Ad, abstract.C,
      SylvesterSolution{cert.P, cert.Q});
  if (res.dynamics > 1e-8 * res.scale || res.output > 1e-8 * res.scale) {
    throw Error(ErrorKind::InvalidCertificate, "P·F = A·P + B·Q or H = C·P violated");
  }
  const double gamma = gamma_coefficient(cert.stability, concrete.Bd, cert.R,
                                         cert.P, abstract.Bd);
  if (std::abs(gamma - cert.gamma_coeff) > 1e-8 * std::max(1.0, gamma) ||
      cert.v_max < 0.0 || cert.epsilon < 0.0) {
    throw Error(ErrorKind::InvalidCertificate, "gain coefficient or bounds inconsistent");
  }
}

Vec interface_apply(const RefinementCertificate& cert, const Vec& v,
                    const Vec& z, const Vec& x) {
  return cert.R * v + cert.Q * z + cert.stability.K * (x - cert.P * z);
}

double lyapunov_value(const RefinementCertificate& cert, const Vec& z,
                      const Vec& x) {
  const Vec e = x - cert.P * z;
  return std::sqrt(std::max(0.0, e.dot(cert.stability.M * e)));
}

double sim_fn_value(const RefinementCertificate& cert, const Vec& z,
                    const Vec& x) {
  return std::max(lyapunov_value(cert, z, x), cert.gamma_coeff * cert.v_max);
}

double epsilon_bound(const RefinementCertificate& cert, const Vec& z0,
                     const Vec& x0, double v_max) {
  if (v_max < 0.0) {
    throw Error(ErrorKind::InvalidCertificate, "v_max must be nonnegative");
  }
  return std::max(lyapunov_value(cert, z0, x0), cert.gamma_coeff * v_max);
}

void bind_initial_pair(RefinementCertificate& cert, const Vec& z0,
                       const Vec& x0, double v_max) {
  cert.epsilon = epsilon_bound(cert, z0, x0, v_max);
  cert.v_max = v_max;
}

Vec match_initial_state(const RefinementCertificate& cert, const Vec& x0) {
  const Mat root = sqrtm_psd(cert.stability.M);
  return pinv(root * cert.P) * (root * x0);
}

double compose_transitivity(double eps1, double eps2) {
  if (eps1 < 0.0 || eps2 < 0.0) {
    throw Error(ErrorKind::InvalidCertificate, "precisions must be nonnegative");
  }
  return eps1 + eps2;
}

DaeSystem dv_as_dae(const DvSystem& dv) {
  return DaeSystem{Mat::Identity(dv.n(), dv.n()), dv.Ad, dv.Bd, dv.C, dv.initial};
}

RelationVerdict verify_relation_sampled(const DaeSystem& abstract_sys,
                                        const DaeSystem& concrete,
                                        const Mat& h, Index trials,
                                        std::uint64_t seed, double tol) {
  abstract_sys.validate();
  concrete.validate();
  const Index m = abstract_sys.n();
  const Index n = concrete.n();
  if (h.rows() != n || h.cols() != m || abstract_sys.k() != concrete.k()) {
    throw Error(ErrorKind::DimensionMismatch, "relation map must be n×m and outputs must agree");
  }

  Mat step(m, m + abstract_sys.p());
  step << abstract_sys.E, -abstract_sys.B;
  const Mat step_inv = pinv(step);
  const Mat step_free = kernel_basis(step);
  const Mat b_inv = pinv(concrete.B);
  const Mat output_gap = concrete.C * h - abstract_sys.C;

  Rng rng(seed);
  RelationVerdict verdict;
  for (Index trial = 0; trial < trials; ++trial) {
    const Vec xa = rng.normal_vec(m);
    const double out_scale =
        std::max(1.0, xa.norm() * (concrete.C * h).norm() + abstract_sys.C.norm() * xa.norm());
    if ((output_gap * xa).norm() > tol * out_scale) {
      verdict.holds = false;
      verdict.counterexample = RelationCounterexample{trial, xa, Vec(), "outputs differ"};
      return verdict;
    }

    const Vec rhs = abstract_sys.A * xa;
    Vec move = step_inv * rhs;
    if ((step * move - rhs).norm() > tol * std::max(1.0, rhs.norm())) {
      ++verdict.blocking_skipped;
      continue;
    }
    move += step_free * rng.normal_vec(step_free.cols());
    const Vec xa_next = move.head(m);

    const Vec needed = concrete.E * h * xa_next - concrete.A * h * xa;
    const Vec u = b_inv * needed;
    const double match_scale =
        std::max(1.0, (concrete.E * h * xa_next).norm() + (concrete.A * h * xa).norm());
    if ((concrete.B * u - needed).norm() > tol * match_scale) {
      verdict.holds = false;
      verdict.counterexample =
          RelationCounterexample{trial, xa, xa_next, "no matching concrete input"};
      return verdict;
    }
    ++verdict.trials_checked;
  }
  return verdict;
}

}  // namespace daeref

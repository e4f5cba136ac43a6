#pragma once

// Dense kernels shared by every other module. Inputs are small (n up to a few
// dozen), so everything is SVD/eigendecomposition based and favors robustness
// over speed.

#include <optional>

#include <Eigen/Dense>

namespace daeref {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative singular-value threshold for rank decisions. Singular values at or
/// below relative·σ_max count as zero. Default: 1e-10·max(rows, cols).
class RankTolerance {
 public:
  RankTolerance() = default;
  explicit RankTolerance(double relative);

  double relative_for(Index rows, Index cols) const;
  bool is_default() const { return !relative_.has_value(); }

 private:
  std::optional<double> relative_;
};

/// Throws InvalidMatrix if any entry is NaN or infinite.
void require_finite(const Mat& m, const char* what);

Mat pinv(const Mat& m, const RankTolerance& tol = {});

/// Orthonormal basis of ker(m), one column per zero singular value. Each
/// column is sign-normalized so that its largest-magnitude entry is positive.
Mat kernel_basis(const Mat& m, const RankTolerance& tol = {});

Index rank_of(const Mat& m, const RankTolerance& tol = {});

/// Orthonormal basis of range(m) (left singular vectors of nonzero singular
/// values), sign-normalized like kernel_basis.
Mat range_basis(const Mat& m, const RankTolerance& tol = {});

/// Flips column signs so each column's largest-magnitude entry is positive.
void normalize_column_signs(Mat& m);

double spectral_radius(const Mat& a);

/// Smallest eigenvalue of the symmetric part of m.
double min_eigenvalue_sym(const Mat& m);

/// Principal square root of a symmetric positive semidefinite matrix.
/// Negative eigenvalues from round-off are clipped to zero.
Mat sqrtm_psd(const Mat& m);

Mat kron(const Mat& a, const Mat& b);

/// Column-stacking vectorization and its inverse.
Vec vec(const Mat& m);
Mat unvec(const Vec& v, Index rows, Index cols);

/// Solves A·X·Aᵀ − X + Qs = 0 by Smith doubling. Requires ρ(A) < 1.
Mat solve_dlyap(const Mat& a, const Mat& qs);

struct DareSolution {
  Mat X;  // stabilizing solution
  Mat K;  // optimal gain, A − B·K is Schur stable
};

/// Discrete algebraic Riccati equation
///   X = AᵀXA − (AᵀXB + S)(R + BᵀXB)⁻¹(BᵀXA + Sᵀ) + Q
/// solved by the structure-preserving doubling algorithm after removing the
/// cross term S (pass an empty matrix for S = 0).
DareSolution solve_dare(const Mat& a, const Mat& b, const Mat& qs,
                        const Mat& rs, const Mat& s = Mat());

/// Left-hand side residual of the Riccati equation for a candidate X.
double dare_residual(const Mat& a, const Mat& b, const Mat& qs, const Mat& rs,
                     const Mat& s, const Mat& x);

}  // namespace daeref

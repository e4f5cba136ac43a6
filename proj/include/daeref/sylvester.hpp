#pragma once

#include "daeref/linalg.hpp"

namespace daeref {

/// Constrained Sylvester problem: find P (n×m), Q (p×m) with
///   P·F = A·P + B·Q   and   H = C·P.
struct SylvesterSolution {
  Mat P;
  Mat Q;
};

struct SylvesterResiduals {
  double dynamics = 0.0;  // ‖PF − AP − BQ‖
  double output = 0.0;    // ‖H − CP‖
  double scale = 1.0;     // reference magnitude for relative checks
};

SylvesterResiduals sylvester_residuals(const Mat& a, const Mat& b, const Mat& c,
                                       const Mat& f, const Mat& h,
                                       const SylvesterSolution& sol);

/// Vectorized solve: vec(P) is parametrized over the solution set of
/// (I⊗C)vec(P) = vec(H) and the remaining linear system is solved by the
/// minimum-norm pseudoinverse. Throws Infeasible if the residuals exceed
/// 1e-8·scale.
SylvesterSolution solve_sylvester_kron(const Mat& a, const Mat& b, const Mat& c,
                                       const Mat& f, const Mat& h);

/// Reduction by RQ factorizations of C and of the projected input matrix,
/// leaving an unconstrained Sylvester equation in the complement of ker C.
/// The free block of Q is set to zero. Throws RankDeficiency when C lacks full
/// row rank or the projected input matrix lacks full row rank, and
/// CommonEigenvalues when the reduced equation is singular.
SylvesterSolution solve_sylvester_rq(const Mat& a, const Mat& b, const Mat& c,
                                     const Mat& f, const Mat& h);

}  // namespace daeref

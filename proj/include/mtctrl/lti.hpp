#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mtctrl/error.hpp"

namespace mtctrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Continuous-time, strictly proper LTI system  x' = A x + B u,  y = C x.
///
/// Construct through make() to get dimension and finiteness checks; the
/// aggregate form is kept for internal assembly where shapes are known.
struct StateSpace {
    Matrix A;
    Matrix B;
    Matrix C;

    static StateSpace make(Matrix A, Matrix B, Matrix C);

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index inputs() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }
    bool is_siso() const { return inputs() == 1 && outputs() == 1; }

    // Throws DimensionMismatch / NonFiniteInput.
    void validate() const;
};

/// Minimal balanced realization together with its Hankel singular values
/// (descending, strictly positive).  Both Gramians of `sys` equal diag(hankel).
struct BalancedRealization {
    StateSpace sys;
    Vector hankel;

    Eigen::Index order() const { return hankel.size(); }
};

struct Gramians {
    Matrix P;  // controllability
    Matrix Q;  // observability
};

struct LqrSolution {
    Matrix K;
    Matrix P;
};

/// Complex Schur factorization A = U T U^*, T upper triangular.  Cached by
/// the training kernels so that repeated Sylvester solves against the same
/// desired system do not refactor it.
struct SchurForm {
    ComplexMatrix U;
    ComplexMatrix T;

    static SchurForm of(const Matrix& A);
    double spectral_abscissa() const;
};

// ---- stability -----------------------------------------------------------

double spectral_abscissa(const Matrix& A);
bool is_hurwitz(const Matrix& A);
void require_hurwitz(const Matrix& A, const char* what);

// ---- Lyapunov / Sylvester ------------------------------------------------

/// Solves A P + P A^T + M = 0 by Kronecker vectorization.  This dense
/// (n^2 x n^2) path is the reference solver; it is exact up to LU rounding and
/// is what gramians(), h2_norm_sq() and the balancing routines use.
Matrix solve_lyapunov(const Matrix& A, const Matrix& M);

/// Same equation via complex Bartels-Stewart on the Schur form of A.
/// O(n^3) instead of O(n^6); used by the training kernels.
Matrix solve_lyapunov_schur(const Matrix& A, const Matrix& M);

/// Solves A X + X B + C = 0 given Schur forms of A and B.  Requires
/// lambda_i(A) + lambda_j(B) != 0 for all pairs.
Matrix solve_sylvester(const SchurForm& a, const SchurForm& b, const Matrix& C);

Gramians gramians(const StateSpace& sys);

// ---- norms ---------------------------------------------------------------

/// Squared H2 norm tr(C P C^T).
double h2_norm_sq(const StateSpace& sys);

/// H-infinity norm by bisection on the Hamiltonian imaginary-eigenvalue test.
double hinf_norm(const StateSpace& sys, double tol = 1e-6);

/// Largest singular value of C (jw I - A)^{-1} B.
double frequency_gain(const StateSpace& sys, double omega);

/// Hankel singular values sqrt(eig(P Q)), descending.
Vector hankel_singular_values(const StateSpace& sys);

/// L1 norm of a SISO impulse response by trapezoidal quadrature.  Non-positive
/// t_max / dt select the defaults (40 / |abscissa|, >= 1e4 samples).
double l1_norm(const StateSpace& sys, double t_max = 0.0, double dt = 0.0);

// ---- realizations and design ---------------------------------------------

BalancedRealization balanced_minimal_realization(const StateSpace& sys,
                                                 double rank_tol = 1e-10);

LqrSolution lqr(const Matrix& A, const Matrix& B, const Matrix& Qw, const Matrix& Rw);

/// Closed loop of `plant` with `controller` in the feedback path:
/// u_plant = w - y_controller, u_controller = y_plant, output y_plant.
StateSpace negative_feedback(const StateSpace& plant, const StateSpace& controller);

/// (diag(A1, A2), [B1; B2], [C1, -C2]): shared input, output y1 - y2.
/// Requires equal m and p.
StateSpace difference_system(const StateSpace& first, const StateSpace& second);

// ---- time domain ---------------------------------------------------------

/// Impulse response g(t) = C e^{At} B sampled at `times` (ascending, >= 0).
std::vector<Matrix> impulse_response(const StateSpace& sys, const std::vector<double>& times);

/// One fixed-step RK4 propagator for x' = A x, i.e. the degree-4 Taylor
/// polynomial of exp(A h).
Matrix rk4_propagator(const Matrix& A, double h);

}  // namespace mtctrl

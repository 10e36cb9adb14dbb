#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>

#include "mtctrl/lti.hpp"

namespace mtctrl {

namespace {

// Matrix sign function by scaled Newton iteration.  Returns false when the
// iteration stalls, which happens when H has eigenvalues on the imaginary axis.
bool matrix_sign(Matrix& Z) {
    const auto n = Z.rows();
    for (int iter = 0; iter < 100; ++iter) {
        Eigen::PartialPivLU<Matrix> lu(Z);
        const double det = std::abs(lu.determinant());
        if (!(det > 0.0) || !std::isfinite(det)) return false;
        const double c = std::pow(det, -1.0 / static_cast<double>(n));
        const Matrix next = 0.5 * (c * Z + lu.inverse() / c);
        if (!next.allFinite()) return false;
        const double delta = (next - Z).lpNorm<1>();
        Z = next;
        if (delta <= 1e-13 * Z.lpNorm<1>()) return true;
    }
    return false;
}

double care_residual(const Matrix& A, const Matrix& G, const Matrix& Qw, const Matrix& P) {
    return (A.transpose() * P + P * A - P * G * P + Qw).norm();
}

}  // namespace

LqrSolution lqr(const Matrix& A, const Matrix& B, const Matrix& Qw, const Matrix& Rw) {
    const auto n = A.rows();
    const auto m = B.cols();
    if (A.cols() != n || B.rows() != n || Qw.rows() != n || Qw.cols() != n || Rw.rows() != m ||
        Rw.cols() != m) {
        throw Error(ErrorCode::DimensionMismatch, "lqr: inconsistent A, B, Q, R shapes");
    }
    Eigen::LLT<Matrix> r_chol(Rw);
    if (r_chol.info() != Eigen::Success) {
        throw Error(ErrorCode::DomainError, "lqr: input weight R is not positive definite");
    }
    const Matrix G = B * r_chol.solve(B.transpose());

    Matrix Z(2 * n, 2 * n);
    Z << A, -G, -Qw, -A.transpose();
    if (!matrix_sign(Z)) {
        throw Error(ErrorCode::NotStabilizable,
                    "Hamiltonian has imaginary-axis eigenvalues; no stable invariant subspace");
    }

    // The stable subspace [I; P] is the kernel of sign(H) + I.
    Matrix lhs(2 * n, n), rhs(2 * n, n);
    lhs << Z.topRightCorner(n, n), Z.bottomRightCorner(n, n) + Matrix::Identity(n, n);
    rhs << Z.topLeftCorner(n, n) + Matrix::Identity(n, n), Z.bottomLeftCorner(n, n);
    Eigen::ColPivHouseholderQR<Matrix> qr(lhs);
    if (qr.rank() < n) {
        throw Error(ErrorCode::NotStabilizable, "stable invariant subspace has wrong dimension");
    }
    Matrix P = qr.solve(-rhs);
    P = 0.5 * (P + P.transpose()).eval();

    // Newton-Kleinman polish; each step is one Lyapunov solve.
    for (int k = 0; k < 3 && care_residual(A, G, Qw, P) > 1e-12 * std::max(1.0, P.norm()); ++k) {
        const Matrix K = r_chol.solve(B.transpose() * P);
        const Matrix Acl = A - B * K;
        if (!is_hurwitz(Acl)) break;
        Matrix next = solve_lyapunov(Acl.transpose(), Qw + K.transpose() * Rw * K);
        if (care_residual(A, G, Qw, next) >= care_residual(A, G, Qw, P)) break;
        P = std::move(next);
    }

    LqrSolution sol;
    sol.P = P;
    sol.K = r_chol.solve(B.transpose() * P);
    if (!sol.K.allFinite() || !is_hurwitz(A - B * sol.K)) {
        throw Error(ErrorCode::NotStabilizable, "LQR closed loop is not Hurwitz");
    }
    return sol;
}

}  // namespace mtctrl

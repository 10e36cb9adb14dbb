// Kronecker-vectorized Lyapunov solver.  Serial dense reference: every other
// Gramian path in the library is tested against this one.

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "mtctrl/lti.hpp"

namespace mtctrl {

namespace {

// I (x) A + A (x) I acting on column-major vec(P).
Matrix lyapunov_operator(const Matrix& A) {
    const auto n = A.rows();
    Matrix K = Matrix::Zero(n * n, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        // block (j, j) of I (x) A
        K.block(j * n, j * n, n, n) += A;
        // block (i, j) of A (x) I is A(i, j) * I
        for (Eigen::Index i = 0; i < n; ++i) {
            K.block(i * n, j * n, n, n).diagonal().array() += A(i, j);
        }
    }
    return K;
}

}  // namespace

Matrix solve_lyapunov(const Matrix& A, const Matrix& M) {
    const auto n = A.rows();
    if (A.cols() != n || M.rows() != n || M.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov: A and M must be n x n");
    }
    if (n == 0) return Matrix(0, 0);
    require_hurwitz(A, "solve_lyapunov");

    const Matrix K = lyapunov_operator(A);
    Eigen::PartialPivLU<Matrix> lu(K);
    const Vector rhs = -Eigen::Map<const Vector>(M.data(), n * n);
    Vector x = lu.solve(rhs);
    // one step of iterative refinement
    x += lu.solve(rhs - K * x);
    if (!x.allFinite()) {
        throw Error(ErrorCode::SolveFailure, "Kronecker system is singular to working precision");
    }

    Matrix P = Eigen::Map<const Matrix>(x.data(), n, n);
    P = 0.5 * (P + P.transpose()).eval();

    const double residual = (A * P + P * A.transpose() + M).norm();
    const double scale = std::max(1.0, M.norm());
    if (!std::isfinite(residual) || residual > 1e-6 * scale * std::max(1.0, A.norm() * P.norm())) {
        throw Error(ErrorCode::SolveFailure,
                    "Lyapunov residual " + std::to_string(residual) + " too large");
    }
    return P;
}

}  // namespace mtctrl

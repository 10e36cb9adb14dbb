#include <cmath>

#include "mtctrl/lti.hpp"

namespace mtctrl {

Matrix solve_sylvester(const SchurForm& a, const SchurForm& b, const Matrix& C) {
    const auto n = a.T.rows();
    const auto m = b.T.rows();
    if (C.rows() != n || C.cols() != m) {
        throw Error(ErrorCode::DimensionMismatch, "solve_sylvester: C must be n x m");
    }
    if (n == 0 || m == 0) return Matrix::Zero(n, m);

    // Ta Y + Y Tb = -F with Y = Ua^* X Ub, solved column by column.
    const ComplexMatrix F = a.U.adjoint() * C.cast<std::complex<double>>() * b.U;
    ComplexMatrix Y(n, m);
    ComplexMatrix shifted = a.T;
    const double scale = a.T.cwiseAbs().maxCoeff() + b.T.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::VectorXcd rhs = -F.col(k);
        for (Eigen::Index j = 0; j < k; ++j) rhs -= b.T(j, k) * Y.col(j);
        shifted.diagonal() = a.T.diagonal().array() + b.T(k, k);
        if (shifted.diagonal().cwiseAbs().minCoeff() <= 1e-14 * std::max(1.0, scale)) {
            throw Error(ErrorCode::SolveFailure, "Sylvester operator is singular (eigenvalue sum 0)");
        }
        Y.col(k) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }
    Matrix X = (a.U * Y * b.U.adjoint()).real();
    if (!X.allFinite()) {
        throw Error(ErrorCode::SolveFailure, "Sylvester solution is not finite");
    }
    return X;
}

Matrix solve_lyapunov_schur(const Matrix& A, const Matrix& M) {
    const auto n = A.rows();
    if (A.cols() != n || M.rows() != n || M.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov_schur: A and M must be n x n");
    }
    if (n == 0) return Matrix(0, 0);
    const SchurForm sa = SchurForm::of(A);
    if (!(sa.spectral_abscissa() < 0.0)) {
        throw Error(ErrorCode::NotHurwitz, "solve_lyapunov_schur: A is not Hurwitz");
    }
    const SchurForm sat = SchurForm::of(A.transpose());
    Matrix P = solve_sylvester(sa, sat, M);
    return 0.5 * (P + P.transpose());
}

Gramians gramians(const StateSpace& sys) {
    require_hurwitz(sys.A, "gramians");
    return {solve_lyapunov(sys.A, sys.B * sys.B.transpose()),
            solve_lyapunov(sys.A.transpose(), sys.C.transpose() * sys.C)};
}

}  // namespace mtctrl

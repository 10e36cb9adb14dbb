#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mtctrl/lti.hpp"

namespace mtctrl {

namespace {

// Symmetric square-root factor L with G = L L^T.  Gramians of non-minimal
// systems are only semidefinite, so an eigendecomposition is used instead of
// Cholesky.  Eigenvalues within rounding of zero (|lambda| <= 10 n eps max|lambda|)
// are set to zero: their square roots would otherwise show up as spurious
// Hankel singular values of order sqrt(eps).
Matrix psd_factor(const Matrix& G, const char* which) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::EigFailure, std::string(which) + " Gramian eigensolver failed");
    }
    const Vector& lambda = es.eigenvalues();
    const double top = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
    if (lambda.minCoeff() < -1e-8 * top) {
        throw Error(ErrorCode::DegenerateGramian,
                    std::string(which) + " Gramian is indefinite (min eigenvalue " +
                        std::to_string(lambda.minCoeff()) + ")");
    }
    const double floor = 10.0 * static_cast<double>(G.rows()) * std::numeric_limits<double>::epsilon() * top;
    const Vector kept = lambda.unaryExpr([floor](double l) { return l > floor ? l : 0.0; });
    return es.eigenvectors() * kept.cwiseSqrt().asDiagonal();
}

}  // namespace

BalancedRealization balanced_minimal_realization(const StateSpace& sys, double rank_tol) {
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) {
        throw Error(ErrorCode::DomainError, "rank_tol must lie in (0, 1)");
    }
    const Gramians g = gramians(sys);
    const Matrix Lc = psd_factor(g.P, "controllability");
    const Matrix Lo = psd_factor(g.Q, "observability");

    Eigen::JacobiSVD<Matrix> svd(Lo.transpose() * Lc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();

    Eigen::Index r = 0;
    if (s.size() > 0 && s(0) > 0.0) {
        while (r < s.size() && s(r) > rank_tol * s(0)) ++r;
    }

    BalancedRealization out;
    out.hankel = s.head(r);
    if (r == 0) {
        out.sys = StateSpace{Matrix(0, 0), Matrix(0, sys.inputs()), Matrix(sys.outputs(), 0)};
        return out;
    }

    const Vector inv_sqrt = s.head(r).cwiseSqrt().cwiseInverse();
    const Matrix T = Lc * svd.matrixV().leftCols(r) * inv_sqrt.asDiagonal();
    const Matrix Ti = inv_sqrt.asDiagonal() * svd.matrixU().leftCols(r).transpose() * Lo.transpose();

    out.sys.A = Ti * sys.A * T;
    out.sys.B = Ti * sys.B;
    out.sys.C = sys.C * T;
    return out;
}

}  // namespace mtctrl

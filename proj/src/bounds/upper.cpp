#include <cmath>

#include "mtctrl/bounds.hpp"

namespace mtctrl {

StateSpace parallel_system(const MultiTaskProblem& problem) {
    problem.validate();
    const auto p = problem.outputs();
    const auto m = problem.inputs();
    Eigen::Index n = 0;
    for (const auto& sys : problem.systems) n += sys.states();

    StateSpace ext{Matrix::Zero(n, n), Matrix::Zero(n, m), Matrix::Zero(problem.tasks() * p, n)};
    Eigen::Index offset = 0;
    for (std::size_t i = 0; i < problem.systems.size(); ++i) {
        const auto& sys = problem.systems[i];
        const auto ni = sys.states();
        ext.A.block(offset, offset, ni, ni) = sys.A;
        ext.B.middleRows(offset, ni) = sys.B;
        ext.C.block(static_cast<Eigen::Index>(i) * p, offset, p, ni) = sys.C;
        offset += ni;
    }
    return ext;
}

namespace {

// Average of the M stacked p-row blocks of C.
Matrix block_row_average(const Matrix& C, Eigen::Index M, Eigen::Index p) {
    Matrix avg = Matrix::Zero(p, C.cols());
    for (Eigen::Index i = 0; i < M; ++i) avg += C.middleRows(i * p, p);
    return avg / static_cast<double>(M);
}

Matrix output_mismatch(const Matrix& C, Eigen::Index M, Eigen::Index p) {
    const Matrix avg = block_row_average(C, M, p);
    Matrix delta = C;
    for (Eigen::Index i = 0; i < M; ++i) delta.middleRows(i * p, p) -= avg;
    return delta;
}

}  // namespace

UpperBound upper_bound(const MultiTaskProblem& problem, int N, double rank_tol) {
    if (N < 1) throw Error(ErrorCode::InvalidProblem, "upper_bound: N must be >= 1");
    const StateSpace ext = parallel_system(problem);
    const auto M = problem.tasks();
    const auto p = problem.outputs();

    UpperBound ub;
    ub.balanced = balanced_minimal_realization(ext, rank_tol);
    ub.R = ub.balanced.order();
    ub.sigma = ub.balanced.hankel;
    if (ub.R == 0) return ub;

    const StateSpace& bal = ub.balanced.sys;
    const double sigma1 = ub.sigma(0);
    if (ub.R <= N) {
        ub.which = UpperCase::RleN;
        ub.deltaC_fro = output_mismatch(bal.C, M, p).norm();
        ub.value = sigma1 * ub.deltaC_fro * ub.deltaC_fro;
        return ub;
    }

    ub.which = UpperCase::RgtN;
    const Eigen::Index k = N;
    const Eigen::Index rest = ub.R - k;
    const auto S2 = ub.sigma.tail(rest).asDiagonal();
    const Matrix B2 = bal.B.bottomRows(rest);
    const double tail_trace = (B2.transpose() * S2 * B2).trace();

    StateSpace aux{bal.A, Matrix::Zero(ub.R, k), Matrix::Zero(k, ub.R)};
    aux.B.bottomRows(rest) = S2 * bal.A.bottomLeftCorner(rest, k);
    aux.C.rightCols(rest) = bal.A.topRightCorner(k, rest) * S2;
    ub.aux_hinf = hinf_norm(aux, 1e-6);

    ub.truncation_term = std::sqrt(tail_trace + 2.0 * static_cast<double>(k) * ub.aux_hinf);
    ub.deltaC_fro = output_mismatch(bal.C.leftCols(k), M, p).norm();
    const double root = ub.truncation_term + std::sqrt(sigma1) * ub.deltaC_fro;
    ub.value = root * root;
    return ub;
}

ControllerParams constructive_controller(const MultiTaskProblem& problem, const UpperBound& ub,
                                         int N) {
    const auto M = problem.tasks();
    const auto p = problem.outputs();
    const auto m = problem.inputs();
    const StateSpace& bal = ub.balanced.sys;
    const Eigen::Index k = std::min<Eigen::Index>(N, ub.R);

    // Target A: leading k x k balanced block, padded with -I up to N.
    Matrix target = -Matrix::Identity(N, N);
    target.topLeftCorner(k, k) = bal.A.topLeftCorner(k, k);

    ControllerParams params;
    params.W = 2.0 * (target + Matrix::Identity(N, N));
    params.gains.assign(static_cast<std::size_t>(M), Vector::Constant(N, 0.5));
    params.B = Matrix::Zero(N, m);
    params.B.topRows(k) = bal.B.topRows(k);
    params.C = Matrix::Zero(p, N);
    params.C.leftCols(k) = block_row_average(bal.C.leftCols(k), M, p);
    return params;
}

BoundsReport compute_bounds(const MultiTaskProblem& problem, int N, bool sharpen) {
    BoundsReport report;
    report.upper = upper_bound(problem, N);
    report.lower_sup = lower_bound_sup(problem);
    if (N == 1 && problem.tasks() >= 2) {
        try {
            report.lower_l1 = lower_bound_l1(scalar_systems(problem), sharpen);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotScalar && e.code() != ErrorCode::SignError) throw;
        }
    }
    return report;
}

}  // namespace mtctrl

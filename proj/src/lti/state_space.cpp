#include <string>

#include <Eigen/Eigenvalues>

#include "mtctrl/lti.hpp"

namespace mtctrl {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NonFiniteInput: return "NonFiniteInput";
        case ErrorCode::NotHurwitz: return "NotHurwitz";
        case ErrorCode::SolveFailure: return "SolveFailure";
        case ErrorCode::EigFailure: return "EigFailure";
        case ErrorCode::BracketFailure: return "BracketFailure";
        case ErrorCode::NotSiso: return "NotSiso";
        case ErrorCode::DegenerateGramian: return "DegenerateGramian";
        case ErrorCode::NotStabilizable: return "NotStabilizable";
        case ErrorCode::NotDetectable: return "NotDetectable";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NotScalar: return "NotScalar";
        case ErrorCode::SignError: return "SignError";
        case ErrorCode::GenerationFailure: return "GenerationFailure";
        case ErrorCode::InvalidProblem: return "InvalidProblem";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

StateSpace StateSpace::make(Matrix A, Matrix B, Matrix C) {
    StateSpace sys{std::move(A), std::move(B), std::move(C)};
    sys.validate();
    return sys;
}

void StateSpace::validate() const {
    const auto n = A.rows();
    if (A.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) +
                        ", expected square");
    }
    if (B.rows() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "B has " + std::to_string(B.rows()) + " rows, expected " + std::to_string(n));
    }
    if (C.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch,
                    "C has " + std::to_string(C.cols()) + " columns, expected " +
                        std::to_string(n));
    }
    if (!A.allFinite() || !B.allFinite() || !C.allFinite()) {
        throw Error(ErrorCode::NonFiniteInput, "state-space matrices contain NaN or Inf");
    }
}

double spectral_abscissa(const Matrix& A) {
    if (A.rows() != A.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "spectral_abscissa needs a square matrix");
    }
    if (A.size() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::EigFailure, "eigenvalue iteration did not converge");
    }
    return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& A) { return spectral_abscissa(A) < 0.0; }

void require_hurwitz(const Matrix& A, const char* what) {
    const double alpha = spectral_abscissa(A);
    if (!(alpha < 0.0)) {
        throw Error(ErrorCode::NotHurwitz,
                    std::string(what) + ": spectral abscissa " + std::to_string(alpha) + " >= 0");
    }
}

SchurForm SchurForm::of(const Matrix& A) {
    Eigen::ComplexSchur<ComplexMatrix> schur(A.cast<std::complex<double>>());
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorCode::EigFailure, "complex Schur decomposition did not converge");
    }
    return {schur.matrixU(), schur.matrixT()};
}

double SchurForm::spectral_abscissa() const {
    if (T.rows() == 0) return -std::numeric_limits<double>::infinity();
    return T.diagonal().real().maxCoeff();
}

StateSpace negative_feedback(const StateSpace& plant, const StateSpace& controller) {
    if (plant.outputs() != controller.inputs() || controller.outputs() != plant.inputs()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "feedback needs plant p == controller m and controller p == plant m");
    }
    const auto np = plant.states();
    const auto nc = controller.states();
    StateSpace cl;
    cl.A.resize(np + nc, np + nc);
    cl.A << plant.A, -plant.B * controller.C, controller.B * plant.C, controller.A;
    cl.B = Matrix::Zero(np + nc, plant.inputs());
    cl.B.topRows(np) = plant.B;
    cl.C = Matrix::Zero(plant.outputs(), np + nc);
    cl.C.leftCols(np) = plant.C;
    return cl;
}

StateSpace difference_system(const StateSpace& first, const StateSpace& second) {
    if (first.inputs() != second.inputs() || first.outputs() != second.outputs()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "systems differ in input or output dimension (" +
                        std::to_string(first.inputs()) + "x" + std::to_string(first.outputs()) +
                        " vs " + std::to_string(second.inputs()) + "x" +
                        std::to_string(second.outputs()) + ")");
    }
    const auto n1 = first.states();
    const auto n2 = second.states();
    StateSpace diff;
    diff.A = Matrix::Zero(n1 + n2, n1 + n2);
    diff.A.topLeftCorner(n1, n1) = first.A;
    diff.A.bottomRightCorner(n2, n2) = second.A;
    diff.B.resize(n1 + n2, first.inputs());
    diff.B << first.B, second.B;
    diff.C.resize(first.outputs(), n1 + n2);
    diff.C << first.C, -second.C;
    return diff;
}

}  // namespace mtctrl

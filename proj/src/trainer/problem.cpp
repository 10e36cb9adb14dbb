#include <algorithm>
#include <cmath>
#include <string>

#include "mtctrl/trainer.hpp"

namespace mtctrl {

void MultiTaskProblem::validate() const {
    if (systems.empty()) throw Error(ErrorCode::InvalidProblem, "problem has no systems");
    if (N < 1) throw Error(ErrorCode::InvalidProblem, "controller dimension N must be >= 1");
    const auto m = systems.front().inputs();
    const auto p = systems.front().outputs();
    for (std::size_t i = 0; i < systems.size(); ++i) {
        const std::string where = "systems[" + std::to_string(i) + "]";
        try {
            systems[i].validate();
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidProblem, where + ": " + e.what());
        }
        if (systems[i].inputs() != m || systems[i].outputs() != p) {
            throw Error(ErrorCode::InvalidProblem,
                        where + ": input/output dimensions differ from systems[0]");
        }
        if (systems[i].states() < 1) {
            throw Error(ErrorCode::InvalidProblem, where + ": empty state dimension");
        }
        if (!is_hurwitz(systems[i].A)) {
            throw Error(ErrorCode::InvalidProblem, where + ": A is not Hurwitz");
        }
    }
}

StateSpace ControllerParams::linearization(std::size_t task) const {
    const auto n = W.rows();
    return {-Matrix::Identity(n, n) + gains.at(task).asDiagonal() * W, B, C};
}

ControllerParams DecisionVars::params() const {
    ControllerParams p{W, {}, B, C};
    p.gains.reserve(theta.size());
    for (const auto& t : theta) p.gains.push_back(sigmoid(t));
    return p;
}

double Gradient::squared_norm() const {
    double s = W.squaredNorm() + B.squaredNorm() + C.squaredNorm();
    for (const auto& d : diag) s += d.squaredNorm();
    return s;
}

double Gradient::norm() const { return std::sqrt(squared_norm()); }

double BlockDiscrepancy::max() const { return std::max({W, diag, B, C}); }

BlockDiscrepancy gradient_discrepancy(const Gradient& analytic, const Gradient& numeric,
                                      double floor) {
    auto rel = [floor](double diff, double a, double b) {
        return diff / std::max({a, b, floor});
    };
    BlockDiscrepancy out;
    out.W = rel((analytic.W - numeric.W).norm(), analytic.W.norm(), numeric.W.norm());
    out.B = rel((analytic.B - numeric.B).norm(), analytic.B.norm(), numeric.B.norm());
    out.C = rel((analytic.C - numeric.C).norm(), analytic.C.norm(), numeric.C.norm());
    double diff = 0.0, a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < analytic.diag.size(); ++i) {
        diff += (analytic.diag[i] - numeric.diag[i]).squaredNorm();
        a += analytic.diag[i].squaredNorm();
        b += numeric.diag[i].squaredNorm();
    }
    out.diag = rel(std::sqrt(diff), std::sqrt(a), std::sqrt(b));
    return out;
}

StateSpace error_system(const StateSpace& desired, const StateSpace& approx) {
    return difference_system(desired, approx);
}

NeuralController realize_controller(const DecisionVars& vars) {
    NeuralController ctrl{vars.W, vars.B, vars.C, {}};
    for (const auto& t : vars.theta) ctrl.tasks.push_back(realize_bias(vars.W, sigmoid(t)));
    return ctrl;
}

}  // namespace mtctrl

// Serial reference for the cost and gradient: assemble the full error system
// of each task and take both Gramians from the Kronecker Lyapunov solver.

#include <cmath>
#include <limits>

#include "mtctrl/trainer.hpp"

namespace mtctrl::reference {

double cost(const MultiTaskProblem& problem, const ControllerParams& params) {
    double total = 0.0;
    for (std::size_t i = 0; i < problem.systems.size(); ++i) {
        const StateSpace approx = params.linearization(i);
        if (!is_hurwitz(approx.A)) return std::numeric_limits<double>::infinity();
        total += h2_norm_sq(error_system(problem.systems[i], approx));
    }
    return total;
}

CostModel::Evaluation evaluate(const MultiTaskProblem& problem, const ControllerParams& params) {
    const auto n = params.W.rows();
    CostModel::Evaluation ev{
        0.0, Gradient{Matrix::Zero(n, n), {}, Matrix::Zero(n, params.B.cols()),
                      Matrix::Zero(params.C.rows(), n)}};
    for (std::size_t i = 0; i < problem.systems.size(); ++i) {
        const StateSpace& desired = problem.systems[i];
        const StateSpace err = error_system(desired, params.linearization(i));
        const Gramians g = gramians(err);
        const auto ni = desired.states();

        const Matrix P12 = g.P.topRightCorner(ni, n);
        const Matrix P22 = g.P.bottomRightCorner(n, n);
        const Matrix Q12 = g.Q.topRightCorner(ni, n);
        const Matrix Q22 = g.Q.bottomRightCorner(n, n);
        const Matrix coupling = Q12.transpose() * P12 + Q22 * P22;

        ev.cost += std::max(0.0, (err.C * g.P * err.C.transpose()).trace());
        ev.grad.W += 2.0 * params.gains[i].asDiagonal() * coupling;
        ev.grad.B += 2.0 * (Q12.transpose() * desired.B + Q22 * params.B);
        ev.grad.C += 2.0 * (-desired.C * P12 + params.C * P22);
        ev.grad.diag.push_back(2.0 * (coupling * params.W.transpose()).diagonal());
    }
    return ev;
}

}  // namespace mtctrl::reference

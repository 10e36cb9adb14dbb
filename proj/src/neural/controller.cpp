#include <cmath>
#include <string>

#include <Eigen/LU>

#include "mtctrl/neural.hpp"

namespace mtctrl {

TaskBias realize_bias(const Matrix& W, const Vector& dbar) {
    if (W.rows() != W.cols() || dbar.size() != W.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "realize_bias: W must be N x N and dbar length N");
    }
    TaskBias task;
    task.dbar = dbar;
    const Vector z = logit(dbar);
    task.x_eq = softplus(z);
    task.d = z - W * task.x_eq;
    return task;
}

StateSpace linearize(const NeuralController& ctrl, const TaskBias& task) {
    const auto n = ctrl.dim();
    if (task.dbar.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "linearize: dbar length differs from N");
    }
    StateSpace sys;
    sys.A = -Matrix::Identity(n, n) + task.dbar.asDiagonal() * ctrl.W;
    sys.B = ctrl.B;
    sys.C = ctrl.C;
    return sys;
}

double fixed_point_residual(const Matrix& W, const TaskBias& task) {
    return (task.x_eq - softplus(Vector(W * task.x_eq + task.d))).cwiseAbs().maxCoeff();
}

double gain_residual(const Matrix& W, const TaskBias& task) {
    return (sigmoid(Vector(W * task.x_eq + task.d)) - task.dbar).cwiseAbs().maxCoeff();
}

Vector equilibrium(const NeuralController& ctrl, const Vector& d, const Vector& x_init) {
    const auto n = ctrl.dim();
    if (d.size() != n || x_init.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "equilibrium: d and x_init must have length N");
    }
    const Matrix& W = ctrl.W;
    auto residual = [&](const Vector& x) -> Vector { return x - softplus(Vector(W * x + d)); };

    Vector x = x_init;
    Vector F = residual(x);
    double norm = F.cwiseAbs().maxCoeff();
    for (int iter = 0; iter < 200; ++iter) {
        if (norm <= 1e-12) return x;
        const Vector gain = sigmoid(Vector(W * x + d));
        const Matrix J = Matrix::Identity(n, n) - gain.asDiagonal() * W;
        const Vector step = J.partialPivLu().solve(-F);
        if (!step.allFinite()) break;

        double t = 1.0;
        Vector trial = x + step;
        Vector F_trial = residual(trial);
        double trial_norm = F_trial.cwiseAbs().maxCoeff();
        for (int halving = 0; halving < 40 && !(trial_norm < norm); ++halving) {
            t *= 0.5;
            trial = x + t * step;
            F_trial = residual(trial);
            trial_norm = F_trial.cwiseAbs().maxCoeff();
        }
        if (!std::isfinite(trial_norm)) break;
        x = std::move(trial);
        F = std::move(F_trial);
        norm = trial_norm;
    }
    if (norm <= 1e-12) return x;
    throw Error(ErrorCode::NoConvergence,
                "equilibrium: Newton stopped with residual " + std::to_string(norm));
}

Trajectory simulate(const NeuralController& ctrl, const Vector& d, const SimulationInput& u,
                    const Vector& x0, double horizon, double dt) {
    const auto n = ctrl.dim();
    if (!(dt > 0.0) || !(horizon >= 0.0)) {
        throw Error(ErrorCode::DomainError, "simulate: need dt > 0 and horizon >= 0");
    }
    if (d.size() != n || x0.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "simulate: d and x0 must have length N");
    }
    if (u.samples.cols() > 0 && u.samples.rows() != ctrl.B.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "simulate: input rows differ from B columns");
    }
    const auto steps = static_cast<long>(std::llround(horizon / dt));

    auto rhs = [&](const Vector& x, const Vector& input) -> Vector {
        Vector dx = -x + softplus(Vector(ctrl.W * x + d));
        if (input.size() > 0) dx.noalias() += ctrl.B * input;
        return dx;
    };

    Trajectory traj;
    traj.t.resize(steps + 1);
    traj.states.resize(n, steps + 1);
    Vector x = x0;
    traj.t[0] = 0.0;
    traj.states.col(0) = x;
    const Vector no_input;
    for (long k = 0; k < steps; ++k) {
        const Vector input = u.samples.cols() == 0
                                 ? no_input
                                 : Vector(u.samples.col(std::min<long>(k, u.samples.cols() - 1)));
        const Vector k1 = rhs(x, input);
        const Vector k2 = rhs(x + 0.5 * dt * k1, input);
        const Vector k3 = rhs(x + 0.5 * dt * k2, input);
        const Vector k4 = rhs(x + dt * k3, input);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double size = x.norm();
        if (!std::isfinite(size) || size > 1e12) {
            throw Error(ErrorCode::NonFinite,
                        "simulate: state diverged at t = " + std::to_string((k + 1) * dt));
        }
        traj.t[k + 1] = static_cast<double>(k + 1) * dt;
        traj.states.col(k + 1) = x;
    }
    traj.outputs = ctrl.C * traj.states;
    return traj;
}

}  // namespace mtctrl

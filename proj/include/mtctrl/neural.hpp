#pragma once

#include <functional>
#include <vector>

#include "mtctrl/lti.hpp"

namespace mtctrl {

// Elementwise activations.  softplus' = sigmoid, and logit = sigmoid^{-1}.
double softplus(double x);
double sigmoid(double x);
double logit(double y);  // DomainError outside (0, 1)

Vector softplus(const Vector& x);
Vector sigmoid(const Vector& x);
Vector logit(const Vector& y);

/// Per-task bias: target gain diagonal `dbar`, the bias `d` that realizes it
/// and the resulting equilibrium `x_eq` (all entries positive).
struct TaskBias {
    Vector dbar;
    Vector d;
    Vector x_eq;
};

/// x' = -x + softplus(W x + d) + B u,  y = C x
struct NeuralController {
    Matrix W;
    Matrix B;
    Matrix C;
    std::vector<TaskBias> tasks;

    Eigen::Index dim() const { return W.rows(); }
};

/// Closed-form bias for a desired gain diagonal: with z = logit(dbar),
/// x_eq = softplus(z) and d = z - W x_eq.
TaskBias realize_bias(const Matrix& W, const Vector& dbar);

/// Local LTI model at the task equilibrium: (-I + diag(dbar) W, B, C).
StateSpace linearize(const NeuralController& ctrl, const TaskBias& task);

/// Fixed-point residual max|x_eq - softplus(W x_eq + d)|.
double fixed_point_residual(const Matrix& W, const TaskBias& task);
/// max|sigmoid(W x_eq + d) - dbar|.
double gain_residual(const Matrix& W, const TaskBias& task);

/// Damped Newton on F(x) = x - softplus(W x + d).  Equilibria of arbitrary
/// biases need not be unique; this returns the first root reached from
/// x_init.  Throws NoConvergence (with the last residual) after 200 steps.
Vector equilibrium(const NeuralController& ctrl, const Vector& d, const Vector& x_init);

struct Trajectory {
    std::vector<double> t;
    Matrix states;   // N x (steps + 1)
    Matrix outputs;  // p x (steps + 1)
};

/// Input samples: column k is held on [k dt, (k + 1) dt).  An input with
/// zero columns means u = 0; fewer columns than steps holds the last one.
struct SimulationInput {
    Matrix samples;
};

/// Classical RK4 on the nonlinear dynamics with bias `d`.  Throws NonFinite
/// when the state norm exceeds 1e12.
Trajectory simulate(const NeuralController& ctrl, const Vector& d, const SimulationInput& u,
                    const Vector& x0, double horizon, double dt = 1e-3);

}  // namespace mtctrl

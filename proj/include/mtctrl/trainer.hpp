#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mtctrl/lti.hpp"
#include "mtctrl/neural.hpp"

namespace mtctrl {

/// M desired systems with shared input/output dimensions, approximated by a
/// single N-dimensional neural controller.  State dimensions may differ.
struct MultiTaskProblem {
    std::vector<StateSpace> systems;
    int N = 1;

    Eigen::Index tasks() const { return static_cast<Eigen::Index>(systems.size()); }
    Eigen::Index inputs() const { return systems.front().inputs(); }
    Eigen::Index outputs() const { return systems.front().outputs(); }

    // Throws InvalidProblem naming the offending system.
    void validate() const;
};

/// Linearization parameters in their natural form: shared (W, B, C) and one
/// gain diagonal per task, D_i = diag(gains[i]).
struct ControllerParams {
    Matrix W;
    std::vector<Vector> gains;
    Matrix B;
    Matrix C;

    StateSpace linearization(std::size_t task) const;
};

/// Optimization state.  D_i = sigmoid(theta_i) lies in (0,1)^N for every
/// finite theta, which keeps every iterate realizable by a bias.
struct DecisionVars {
    Matrix W;
    std::vector<Vector> theta;
    Matrix B;
    Matrix C;

    ControllerParams params() const;
};

/// Gradient blocks.  `diag[i]` holds the derivative w.r.t. the diagonal of
/// D_i (or theta_i, depending on which function produced it).
struct Gradient {
    Matrix W;
    std::vector<Vector> diag;
    Matrix B;
    Matrix C;

    double squared_norm() const;
    double norm() const;
};

struct BlockDiscrepancy {
    double W = 0.0;
    double diag = 0.0;
    double B = 0.0;
    double C = 0.0;

    double max() const;
};

/// Per-block relative error ||a - b||_F / max(||b||_F, ||a||_F, floor).
BlockDiscrepancy gradient_discrepancy(const Gradient& analytic, const Gradient& numeric,
                                      double floor = 1e-8);

// ---- error system and cost ------------------------------------------------

/// (diag(A_i, A_L), [B_i; B], [C_i, -C]).
StateSpace error_system(const StateSpace& desired, const StateSpace& approx);

/// Cost and gradient evaluator with per-problem caches (Schur forms and
/// Gramians of the desired systems).  Tasks are independent and evaluated
/// with an OpenMP loop; the per-task results are summed in task order, so
/// the result does not depend on the thread count.
class CostModel {
public:
    explicit CostModel(MultiTaskProblem problem);

    const MultiTaskProblem& problem() const { return problem_; }

    /// Sum of squared H2 errors, or +inf when some -I + D_i W is not Hurwitz.
    double cost(const ControllerParams& params) const;
    std::vector<double> task_costs(const ControllerParams& params) const;

    struct Evaluation {
        double cost;
        Gradient grad;  // w.r.t. W, diag(D_i), B, C
    };
    /// Throws NotHurwitz when some linearization is unstable.
    Evaluation evaluate(const ControllerParams& params) const;

private:
    struct TaskCache {
        SchurForm a;
        SchurForm at;
        Matrix P11;
        double desired_h2 = 0.0;
    };
    MultiTaskProblem problem_;
    std::vector<TaskCache> cache_;
};

double cost(const MultiTaskProblem& problem, const DecisionVars& vars);
double cost(const MultiTaskProblem& problem, const ControllerParams& params);

/// Analytic gradient w.r.t. (W, diag D_i, B, C).
Gradient gradients(const MultiTaskProblem& problem, const DecisionVars& vars);
Gradient gradients(const MultiTaskProblem& problem, const ControllerParams& params);

/// Chain rule through D = sigmoid(theta): d/dtheta = d/dD * D (1 - D).
Gradient gradients_theta(const MultiTaskProblem& problem, const DecisionVars& vars);
Gradient theta_chain_rule(const Gradient& grad_d, const DecisionVars& vars);

/// Central differences of the cost in (W, diag D_i, B, C).
Gradient finite_diff_gradient(const MultiTaskProblem& problem, const ControllerParams& params,
                              double h = 1e-6);
Gradient finite_diff_gradient(const MultiTaskProblem& problem, const DecisionVars& vars,
                              double h = 1e-6);
/// Central differences in the logit parametrization.
Gradient finite_diff_gradient_theta(const MultiTaskProblem& problem, const DecisionVars& vars,
                                    double h = 1e-6);

/// Serial reference kernels: assemble each full error system and solve its
/// Gramians by Kronecker vectorization.  Kept for testing and benchmarking
/// the structured kernels in CostModel.
namespace reference {
double cost(const MultiTaskProblem& problem, const ControllerParams& params);
CostModel::Evaluation evaluate(const MultiTaskProblem& problem, const ControllerParams& params);
}  // namespace reference

// ---- training ---------------------------------------------------------------

struct ArmijoConfig {
    double c = 1e-4;
    double shrink = 0.5;
    double init_step = 1e-2;
    int max_backtracks = 40;
    // Next line search starts from growth * (last accepted step), or from
    // the Barzilai-Borwein step s.s / s.y when enabled and s.y > 0.
    double growth = 2.0;
    bool barzilai_borwein = true;
    double min_step = 1e-12;
    double max_step = 1e6;
};

struct TrainConfig {
    int max_iters = 5000;
    double grad_tol = 1e-6;
    ArmijoConfig armijo;
    std::uint64_t seed = 0;
    double init_spectral_norm = 0.9;
    int max_failed_searches = 40;

    void validate() const;
};

enum class TrainStatus { Converged, MaxIters, Stalled };
std::string_view to_string(TrainStatus status);

struct TrainResult {
    DecisionVars vars;
    NeuralController controller;
    std::vector<double> cost_history;
    std::vector<double> grad_norm_history;
    TrainStatus status = TrainStatus::MaxIters;
    int iterations = 0;

    double initial_cost() const { return cost_history.front(); }
    double final_cost() const { return cost_history.back(); }
};

/// theta = 0, W ~ N(0,1) rescaled to ||W||_2 = init_spectral_norm, B and C
/// ~ N(0, 1/N).  Deterministic in `seed`.
DecisionVars init_vars(const MultiTaskProblem& problem, const TrainConfig& config,
                       std::uint64_t seed);

/// Gradient descent with Armijo backtracking on (W, theta, B, C).
TrainResult train(const MultiTaskProblem& problem, const TrainConfig& config);
TrainResult train(const MultiTaskProblem& problem, const TrainConfig& config,
                  DecisionVars start);

/// Neural controller with biases realized from sigmoid(theta_i).
NeuralController realize_controller(const DecisionVars& vars);

}  // namespace mtctrl

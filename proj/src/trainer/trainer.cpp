#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/SVD>

#include "mtctrl/trainer.hpp"

namespace mtctrl {

std::string_view to_string(TrainStatus status) {
    switch (status) {
        case TrainStatus::Converged: return "Converged";
        case TrainStatus::MaxIters: return "MaxIters";
        case TrainStatus::Stalled: return "Stalled";
    }
    return "Unknown";
}

void TrainConfig::validate() const {
    const bool ok = max_iters >= 0 && grad_tol > 0.0 && armijo.c > 0.0 && armijo.c < 1.0 &&
                    armijo.shrink > 0.0 && armijo.shrink < 1.0 && armijo.init_step > 0.0 &&
                    armijo.max_backtracks > 0 && armijo.growth >= 1.0 && init_spectral_norm > 0.0 &&
                    max_failed_searches > 0;
    if (!ok) throw Error(ErrorCode::DomainError, "invalid training configuration");
}

DecisionVars init_vars(const MultiTaskProblem& problem, const TrainConfig& config,
                       std::uint64_t seed) {
    problem.validate();
    const int n = problem.N;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
        Matrix m(rows, cols);
        // fill in row-major order so the stream layout is easy to reproduce
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
        return m;
    };

    DecisionVars vars;
    vars.W = draw(n, n);
    const double top = Eigen::JacobiSVD<Matrix>(vars.W).singularValues()(0);
    if (top > 0.0) vars.W *= config.init_spectral_norm / top;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    vars.B = draw(n, problem.inputs()) * scale;
    vars.C = draw(problem.outputs(), n) * scale;
    vars.theta.assign(static_cast<std::size_t>(problem.tasks()), Vector::Zero(n));
    return vars;
}

namespace {

DecisionVars step(const DecisionVars& x, const Gradient& g, double alpha) {
    DecisionVars out{x.W - alpha * g.W, {}, x.B - alpha * g.B, x.C - alpha * g.C};
    out.theta.reserve(x.theta.size());
    for (std::size_t i = 0; i < x.theta.size(); ++i) out.theta.push_back(x.theta[i] - alpha * g.diag[i]);
    return out;
}

double dot(const Gradient& a, const Gradient& b) {
    double s = (a.W.array() * b.W.array()).sum() + (a.B.array() * b.B.array()).sum() +
               (a.C.array() * b.C.array()).sum();
    for (std::size_t i = 0; i < a.diag.size(); ++i) s += a.diag[i].dot(b.diag[i]);
    return s;
}

}  // namespace

TrainResult train(const MultiTaskProblem& problem, const TrainConfig& config) {
    return train(problem, config, init_vars(problem, config, config.seed));
}

TrainResult train(const MultiTaskProblem& problem, const TrainConfig& config, DecisionVars start) {
    config.validate();
    const CostModel model(problem);
    const ArmijoConfig& ls = config.armijo;

    TrainResult result;
    result.vars = std::move(start);
    auto ev = model.evaluate(result.vars.params());
    Gradient grad = theta_chain_rule(ev.grad, result.vars);
    double current = ev.cost;
    result.cost_history.push_back(current);

    double alpha0 = ls.init_step;
    int failed = 0;
    result.status = TrainStatus::MaxIters;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        const double g2 = grad.squared_norm();
        result.grad_norm_history.push_back(std::sqrt(g2));
        if (std::sqrt(g2) <= config.grad_tol) {
            result.status = TrainStatus::Converged;
            break;
        }

        double alpha = alpha0;
        bool accepted = false;
        DecisionVars trial;
        double trial_cost = 0.0;
        for (int bt = 0; bt < ls.max_backtracks; ++bt) {
            trial = step(result.vars, grad, alpha);
            trial_cost = model.cost(trial.params());
            // +inf (unstable linearization) always fails the test
            if (trial_cost <= current - ls.c * alpha * g2) {
                accepted = true;
                break;
            }
            alpha *= ls.shrink;
        }
        result.iterations = iter + 1;

        if (!accepted) {
            alpha0 = alpha;
            if (++failed >= config.max_failed_searches) {
                result.status = TrainStatus::Stalled;
                break;
            }
            continue;
        }
        failed = 0;
        alpha0 = alpha * ls.growth;

        CostModel::Evaluation next;
        try {
            next = model.evaluate(trial.params());
        } catch (const Error&) {
            // accepted point sits on a numerically singular Sylvester
            // operator; treat like a failed search
            alpha0 = alpha * ls.shrink;
            if (++failed >= config.max_failed_searches) {
                result.status = TrainStatus::Stalled;
                break;
            }
            continue;
        }
        result.vars = std::move(trial);
        current = trial_cost;
        Gradient next_grad = theta_chain_rule(next.grad, result.vars);
        if (ls.barzilai_borwein) {
            // s = -alpha g, y = g' - g:  s.s / s.y = alpha |g|^2 / (|g|^2 - g.g')
            const double curvature = g2 - dot(grad, next_grad);
            if (curvature > 0.0) {
                alpha0 = std::clamp(alpha * g2 / curvature, ls.min_step, ls.max_step);
            }
        }
        grad = std::move(next_grad);
        result.cost_history.push_back(current);
    }
    result.controller = realize_controller(result.vars);
    return result;
}

}  // namespace mtctrl

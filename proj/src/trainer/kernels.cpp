// Structured cost/gradient kernels.  The error system is block diagonal, so
// its Gramians split into the desired-system block (cached), a Sylvester
// cross block and the controller block; each is solved on Schur forms.

#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>

#include <omp.h>

#include "mtctrl/trainer.hpp"

namespace mtctrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const MultiTaskProblem& problem, const ControllerParams& params) {
    const auto n = params.W.rows();
    bool ok = params.W.cols() == n && params.B.rows() == n && params.C.cols() == n &&
              params.B.cols() == problem.inputs() && params.C.rows() == problem.outputs() &&
              static_cast<Eigen::Index>(params.gains.size()) == problem.tasks();
    for (const auto& g : params.gains) ok = ok && g.size() == n;
    if (!ok) {
        throw Error(ErrorCode::DimensionMismatch,
                    "controller parameters do not match the problem dimensions");
    }
}

bool use_threads(Eigen::Index tasks) { return tasks > 1 && !omp_in_parallel(); }

struct TaskGradient {
    double cost = kInf;
    Matrix coupling;  // Q12^T P12 + Q22 P22
    Matrix dB;
    Matrix dC;
};

}  // namespace

CostModel::CostModel(MultiTaskProblem problem) : problem_(std::move(problem)) {
    problem_.validate();
    cache_.reserve(problem_.systems.size());
    for (const auto& sys : problem_.systems) {
        TaskCache c;
        c.a = SchurForm::of(sys.A);
        c.at = SchurForm::of(sys.A.transpose());
        c.P11 = solve_sylvester(c.a, c.at, sys.B * sys.B.transpose());
        c.P11 = 0.5 * (c.P11 + c.P11.transpose()).eval();
        c.desired_h2 = (sys.C * c.P11 * sys.C.transpose()).trace();
        cache_.push_back(std::move(c));
    }
}

std::vector<double> CostModel::task_costs(const ControllerParams& params) const {
    check_shapes(problem_, params);
    const auto M = problem_.tasks();
    std::vector<double> costs(static_cast<std::size_t>(M), kInf);
    const Matrix BBt = params.B * params.B.transpose();

#pragma omp parallel for schedule(static) if (use_threads(M))
    for (Eigen::Index i = 0; i < M; ++i) {
        const auto& sys = problem_.systems[static_cast<std::size_t>(i)];
        const auto& c = cache_[static_cast<std::size_t>(i)];
        try {
            const Matrix AL = params.linearization(static_cast<std::size_t>(i)).A;
            if (!AL.allFinite()) continue;
            const SchurForm l = SchurForm::of(AL);
            if (!(l.spectral_abscissa() < 0.0)) continue;
            const SchurForm lt = SchurForm::of(AL.transpose());
            const Matrix P12 = solve_sylvester(c.a, lt, sys.B * params.B.transpose());
            const Matrix P22 = solve_sylvester(l, lt, BBt);
            const double value = c.desired_h2 -
                                 2.0 * (sys.C * P12 * params.C.transpose()).trace() +
                                 (params.C * P22 * params.C.transpose()).trace();
            if (std::isfinite(value)) costs[static_cast<std::size_t>(i)] = std::max(0.0, value);
        } catch (const Error&) {
            // singular Sylvester operator: leave the +inf sentinel
        }
    }
    return costs;
}

double CostModel::cost(const ControllerParams& params) const {
    double total = 0.0;
    for (double c : task_costs(params)) total += c;
    return total;
}

CostModel::Evaluation CostModel::evaluate(const ControllerParams& params) const {
    check_shapes(problem_, params);
    const auto M = problem_.tasks();
    const auto n = params.W.rows();
    std::vector<TaskGradient> parts(static_cast<std::size_t>(M));
    std::vector<std::optional<Error>> failures(static_cast<std::size_t>(M));
    const Matrix BBt = params.B * params.B.transpose();
    const Matrix CtC = params.C.transpose() * params.C;

#pragma omp parallel for schedule(static) if (use_threads(M))
    for (Eigen::Index i = 0; i < M; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const auto& sys = problem_.systems[idx];
        const auto& c = cache_[idx];
        try {
            const Matrix AL = params.linearization(idx).A;
            const SchurForm l = SchurForm::of(AL);
            if (!(l.spectral_abscissa() < 0.0)) {
                throw Error(ErrorCode::NotHurwitz,
                            "linearization of task " + std::to_string(i) + " is not Hurwitz");
            }
            const SchurForm lt = SchurForm::of(AL.transpose());
            const Matrix P12 = solve_sylvester(c.a, lt, sys.B * params.B.transpose());
            const Matrix P22 = solve_sylvester(l, lt, BBt);
            const Matrix Q12 = solve_sylvester(c.at, l, -(sys.C.transpose() * params.C));
            const Matrix Q22 = solve_sylvester(lt, l, CtC);

            TaskGradient& out = parts[idx];
            out.cost = std::max(0.0, c.desired_h2 -
                                         2.0 * (sys.C * P12 * params.C.transpose()).trace() +
                                         (params.C * P22 * params.C.transpose()).trace());
            out.coupling = Q12.transpose() * P12 + Q22 * P22;
            out.dB = 2.0 * (Q12.transpose() * sys.B + Q22 * params.B);
            out.dC = 2.0 * (-sys.C * P12 + params.C * P22);
        } catch (const Error& e) {
            failures[idx] = e;
        }
    }
    for (const auto& f : failures) {
        if (f) throw *f;
    }

    Evaluation ev{0.0, Gradient{Matrix::Zero(n, n), {}, Matrix::Zero(n, params.B.cols()),
                                Matrix::Zero(params.C.rows(), n)}};
    ev.grad.diag.reserve(static_cast<std::size_t>(M));
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& part = parts[i];
        ev.cost += part.cost;
        ev.grad.W += 2.0 * params.gains[i].asDiagonal() * part.coupling;
        ev.grad.B += part.dB;
        ev.grad.C += part.dC;
        ev.grad.diag.push_back(2.0 * (part.coupling * params.W.transpose()).diagonal());
    }
    return ev;
}

double cost(const MultiTaskProblem& problem, const ControllerParams& params) {
    return CostModel(problem).cost(params);
}

double cost(const MultiTaskProblem& problem, const DecisionVars& vars) {
    return cost(problem, vars.params());
}

Gradient gradients(const MultiTaskProblem& problem, const ControllerParams& params) {
    return CostModel(problem).evaluate(params).grad;
}

Gradient gradients(const MultiTaskProblem& problem, const DecisionVars& vars) {
    return gradients(problem, vars.params());
}

Gradient theta_chain_rule(const Gradient& grad_d, const DecisionVars& vars) {
    Gradient g = grad_d;
    for (std::size_t i = 0; i < g.diag.size(); ++i) {
        const Vector D = sigmoid(vars.theta[i]);
        g.diag[i] = grad_d.diag[i].cwiseProduct(D.cwiseProduct((1.0 - D.array()).matrix()));
    }
    return g;
}

Gradient gradients_theta(const MultiTaskProblem& problem, const DecisionVars& vars) {
    return theta_chain_rule(gradients(problem, vars), vars);
}

namespace {

// Central difference of f over every entry of `x`, writing into `out`.
template <typename Dense, typename F>
void central_differences(Dense& x, Dense& out, double h, F&& f) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double saved = x.data()[k];
        x.data()[k] = saved + h;
        const double plus = f();
        x.data()[k] = saved - h;
        const double minus = f();
        x.data()[k] = saved;
        out.data()[k] = (plus - minus) / (2.0 * h);
    }
}

template <typename Vars, typename CostFn>
Gradient finite_diff_impl(Vars vars, std::vector<Vector>& (*diag_of)(Vars&), double h,
                          CostFn&& cost_of) {
    if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "finite difference step must be positive");
    Gradient g{Matrix::Zero(vars.W.rows(), vars.W.cols()), {}, Matrix::Zero(vars.B.rows(), vars.B.cols()),
               Matrix::Zero(vars.C.rows(), vars.C.cols())};
    auto f = [&] { return cost_of(vars); };
    central_differences(vars.W, g.W, h, f);
    central_differences(vars.B, g.B, h, f);
    central_differences(vars.C, g.C, h, f);
    auto& diag = diag_of(vars);
    for (auto& d : diag) {
        Vector out = Vector::Zero(d.size());
        central_differences(d, out, h, f);
        g.diag.push_back(std::move(out));
    }
    return g;
}

std::vector<Vector>& gains_of(ControllerParams& p) { return p.gains; }
std::vector<Vector>& theta_of(DecisionVars& v) { return v.theta; }

}  // namespace

Gradient finite_diff_gradient(const MultiTaskProblem& problem, const ControllerParams& params,
                              double h) {
    const CostModel model(problem);
    return finite_diff_impl(params, &gains_of, h,
                            [&](const ControllerParams& p) { return model.cost(p); });
}

Gradient finite_diff_gradient(const MultiTaskProblem& problem, const DecisionVars& vars,
                              double h) {
    return finite_diff_gradient(problem, vars.params(), h);
}

Gradient finite_diff_gradient_theta(const MultiTaskProblem& problem, const DecisionVars& vars,
                                    double h) {
    const CostModel model(problem);
    return finite_diff_impl(vars, &theta_of, h,
                            [&](const DecisionVars& v) { return model.cost(v.params()); });
}

}  // namespace mtctrl

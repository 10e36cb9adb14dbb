#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <omp.h>

#include "mtctrl/benchmarks.hpp"

namespace mtctrl {

Quartiles quartiles(std::vector<double> values) {
    std::erase_if(values, [](double v) { return !std::isfinite(v); });
    Quartiles q;
    if (values.empty()) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan, nan, nan};
    }
    std::sort(values.begin(), values.end());
    auto at = [&](double frac) {
        const double pos = frac * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    q.min = values.front();
    q.q1 = at(0.25);
    q.median = at(0.5);
    q.q3 = at(0.75);
    q.max = values.back();
    return q;
}

std::vector<double> ExperimentRecord::costs_at(int sweep_value) const {
    std::vector<double> out;
    for (const auto& row : rows)
        if (row.sweep == sweep_value) out.push_back(row.final_cost);
    return out;
}

Quartiles ExperimentRecord::summary(int sweep_value) const { return quartiles(costs_at(sweep_value)); }

std::vector<StateSpace> count_sweep_systems(std::uint64_t base_seed, int trial, int count) {
    const std::uint64_t seed = trial_seed(base_seed, static_cast<std::uint64_t>(trial));
    std::vector<StateSpace> systems;
    systems.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        systems.push_back(random_siso(2, trial_seed(seed, static_cast<std::uint64_t>(k))));
    }
    return systems;
}

namespace {

int worker_count(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

// Runs every (trial, sweep value) job; results land in a fixed slot, so
// the output does not depend on scheduling.
template <typename Job>
std::vector<TrialRecord> run_jobs(const ExperimentConfig& config, const std::vector<int>& sweep,
                                  Job&& job) {
    const int total = config.trials * static_cast<int>(sweep.size());
    std::vector<TrialRecord> rows(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic) num_threads(worker_count(config.workers))
    for (int k = 0; k < total; ++k) {
        const int trial = k / static_cast<int>(sweep.size());
        const int value = sweep[static_cast<std::size_t>(k % static_cast<int>(sweep.size()))];
        TrialRecord& row = rows[static_cast<std::size_t>(k)];
        row.sweep = value;
        row.trial = trial;
        row.seed = trial_seed(config.seed, static_cast<std::uint64_t>(trial));
        try {
            job(row);
        } catch (const std::exception& e) {
            row.final_cost = std::numeric_limits<double>::quiet_NaN();
            row.status = std::string("error: ") + e.what();
        }
    }
    return rows;
}

TrainConfig trial_train_config(const ExperimentConfig& config, std::uint64_t seed) {
    TrainConfig tc = config.train;
    tc.max_iters = config.iters;
    tc.seed = seed;
    return tc;
}

}  // namespace

ExperimentRecord experiment_cost_vs_dim(const ExperimentConfig& config, int M,
                                        std::vector<int> n_range) {
    ExperimentRecord rec{"N", n_range, config.trials, {}};
    rec.rows = run_jobs(config, n_range, [&](TrialRecord& row) {
        MultiTaskProblem problem;
        problem.N = row.sweep;
        for (int k = 0; k < M; ++k) {
            problem.systems.push_back(random_siso(2, trial_seed(row.seed, static_cast<std::uint64_t>(k))));
        }
        const TrainResult res = train(problem, trial_train_config(config, row.seed));
        row.final_cost = res.final_cost();
        row.status = std::string(to_string(res.status));
    });
    return rec;
}

ExperimentRecord experiment_cost_vs_count(const ExperimentConfig& config, int N,
                                          std::vector<int> m_range) {
    ExperimentRecord rec{"M", m_range, config.trials, {}};
    const int largest = *std::max_element(m_range.begin(), m_range.end());
    rec.rows = run_jobs(config, m_range, [&](TrialRecord& row) {
        auto systems = count_sweep_systems(config.seed, row.trial, largest);
        systems.resize(static_cast<std::size_t>(row.sweep));
        const MultiTaskProblem problem{std::move(systems), N};
        const TrainResult res = train(problem, trial_train_config(config, row.seed));
        row.final_cost = res.final_cost();
        row.status = std::string(to_string(res.status));
        row.upper_bound = upper_bound(problem, N).value;
    });
    return rec;
}

std::vector<BoundGapRow> experiment_bound_gap(const ExperimentRecord& count_record) {
    std::map<int, BoundGapRow> by_m;
    for (const auto& row : count_record.rows) {
        if (!std::isfinite(row.final_cost) || row.upper_bound < 0.0) continue;
        BoundGapRow& g = by_m[row.sweep];
        g.M = row.sweep;
        g.mean_cost += row.final_cost;
        g.mean_bound += row.upper_bound;
        g.trials += 1;
        if (row.final_cost > row.upper_bound) g.violations += 1;
    }
    std::vector<BoundGapRow> out;
    for (auto& [m, g] : by_m) {
        g.mean_cost /= g.trials;
        g.mean_bound /= g.trials;
        out.push_back(g);
    }
    return out;
}

double ImpulseComparison::max_gap() const {
    return desired.size() == 0 ? 0.0 : (desired - neural).cwiseAbs().maxCoeff();
}

ImpulseComparison impulse_comparison(const StateSpace& plant, const StateSpace& desired,
                                     const StateSpace& neural_linear, double t_max, double dt,
                                     Eigen::Index input) {
    if (!(dt > 0.0) || !(t_max >= 0.0)) {
        throw Error(ErrorCode::DomainError, "impulse_comparison: need dt > 0 and t_max >= 0");
    }
    if (input < 0 || input >= plant.inputs()) {
        throw Error(ErrorCode::DimensionMismatch, "impulse_comparison: input channel out of range");
    }
    StateSpace loop_d = negative_feedback(plant, desired);
    StateSpace loop_n = negative_feedback(plant, neural_linear);
    loop_d.B = loop_d.B.col(input).eval();
    loop_n.B = loop_n.B.col(input).eval();

    ImpulseComparison out;
    const auto steps = static_cast<long>(std::llround(t_max / dt));
    for (long k = 0; k <= steps; ++k) out.t.push_back(static_cast<double>(k) * dt);
    const auto gd = impulse_response(loop_d, out.t);
    const auto gn = impulse_response(loop_n, out.t);
    out.desired.resize(static_cast<Eigen::Index>(out.t.size()), plant.outputs());
    out.neural.resize(static_cast<Eigen::Index>(out.t.size()), plant.outputs());
    for (std::size_t k = 0; k < out.t.size(); ++k) {
        out.desired.row(static_cast<Eigen::Index>(k)) = gd[k].col(0).transpose();
        out.neural.row(static_cast<Eigen::Index>(k)) = gn[k].col(0).transpose();
    }
    return out;
}

FourPlantDemo four_plant_demo(const TrainConfig& config, int N, double t_max, double dt) {
    FourPlantDemo demo;
    demo.plants = plant_catalog();
    demo.problem.N = N;
    for (const StateSpace* plant : demo.plants.all()) {
        demo.problem.systems.push_back(lqg_controller(*plant));
    }
    demo.result = train(demo.problem, config);
    const auto plants = demo.plants.all();
    for (std::size_t i = 0; i < plants.size(); ++i) {
        const StateSpace neural = linearize(demo.result.controller, demo.result.controller.tasks[i]);
        demo.responses.push_back(
            impulse_comparison(*plants[i], demo.problem.systems[i], neural, t_max, dt));
        demo.closed_loop_abscissa.push_back(spectral_abscissa(negative_feedback(*plants[i], neural).A));
    }
    return demo;
}

}  // namespace mtctrl

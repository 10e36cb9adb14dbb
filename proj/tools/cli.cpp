#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>

#include <CLI11.hpp>

#include "mtctrl/benchmarks.hpp"
#include "mtctrl/bounds.hpp"
#include "mtctrl/io.hpp"
#include "mtctrl/trainer.hpp"

namespace mtctrl::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  input error (bad flags, unreadable or invalid files)\n"
    "  2  training stalled (line search failed repeatedly)\n"
    "  3  self-test failure (gradcheck mismatch)\n";

int default_workers() {
    if (const char* env = std::getenv("MTCTRL_WORKERS")) {
        try {
            return std::stoi(env);
        } catch (...) {
            return 0;
        }
    }
    return 0;
}

struct ProblemArgs {
    std::string problem;
    std::optional<int> dim;
};

void add_problem_args(CLI::App* cmd, ProblemArgs& a) {
    cmd->add_option("--problem", a.problem, "problem file (JSON)")->required();
    cmd->add_option("--dim", a.dim, "controller dimension N (overrides controller_dim)");
}

MultiTaskProblem load_problem(const ProblemArgs& a) {
    return io::read_problem(a.problem).to_problem(a.dim);
}

std::string fmt(double v) { return io::format_double(v); }

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    ProblemArgs problem;
    std::uint64_t seed = 0;
    int max_iters = TrainConfig{}.max_iters;
    double tol = TrainConfig{}.grad_tol;
    std::string out;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const MultiTaskProblem problem = load_problem(a.problem);
    TrainConfig config;
    config.seed = a.seed;
    config.max_iters = a.max_iters;
    config.grad_tol = a.tol;
    config.validate();
    const TrainResult res = train(problem, config);
    if (!a.out.empty()) io::write_result(a.out, io::ResultFile::from(res, config));
    out << "final cost: " << fmt(res.final_cost()) << "\n"
        << "initial cost: " << fmt(res.initial_cost()) << "\n"
        << "iterations: " << res.iterations << "\n"
        << "status: " << to_string(res.status) << "\n";
    return res.status == TrainStatus::Stalled ? Stalled : Ok;
}

// ---- gradcheck ---------------------------------------------------------------

struct GradcheckArgs {
    ProblemArgs problem;
    std::uint64_t seed = 0;
    bool perturb = false;
};

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out) {
    const MultiTaskProblem problem = load_problem(a.problem);
    TrainConfig config;
    config.seed = a.seed;
    DecisionVars vars = init_vars(problem, config, a.seed);
    // Random gain logits so the check does not sit at the symmetric D = 0.5 I.
    std::mt19937_64 rng(a.seed ^ 0x5DEECE66DULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& t : vars.theta)
        for (Eigen::Index k = 0; k < t.size(); ++k) t(k) = normal(rng);

    Gradient analytic = gradients_theta(problem, vars);
    if (a.perturb) analytic.C = -analytic.C;
    const Gradient numeric = finite_diff_gradient_theta(problem, vars);
    const BlockDiscrepancy d = gradient_discrepancy(analytic, numeric);
    const double tol = 1e-4;
    out << "block,max_rel_error\n"
        << "W," << fmt(d.W) << "\n"
        << "D," << fmt(d.diag) << "\n"
        << "B," << fmt(d.B) << "\n"
        << "C," << fmt(d.C) << "\n";
    const bool ok = d.max() <= tol;
    out << (ok ? "gradcheck passed" : "gradcheck FAILED") << " (tolerance " << tol << ")\n";
    return ok ? Ok : SelfTestFailure;
}

// ---- bounds ------------------------------------------------------------------

struct BoundsArgs {
    ProblemArgs problem;
    bool sharpen = false;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
    const MultiTaskProblem problem = load_problem(a.problem);
    const BoundsReport r = compute_bounds(problem, problem.N, a.sharpen);
    out << "upper: " << fmt(r.upper.value) << "\n"
        << "upper_case: " << (r.upper.which == UpperCase::RgtN ? "R>N" : "R<=N") << "\n"
        << "R: " << r.upper.R << "\n"
        << "jB: " << fmt(r.upper.truncation_term) << "\n"
        << "deltaC_fro: " << fmt(r.upper.deltaC_fro) << "\n"
        << "lower_sup: " << fmt(r.lower_sup) << "\n";
    if (r.lower_l1) {
        out << "lower_l1: " << fmt(r.lower_l1->value) << " (pair " << r.lower_l1->j << ","
            << r.lower_l1->l << ")\n";
    } else {
        out << "lower_l1: not applicable (needs N = 1 and scalar systems with a < 0, b c > 0)\n";
    }
    return Ok;
}

// ---- simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string result;
    std::size_t task = 0;
    std::string plant;
    std::string problem;
    bool impulse = false;
    bool open_loop = false;
    double t_max = 10.0;
    double dt = 0.01;
    int input = 0;
    double amplitude = 1e-3;
    std::string out;
};

const StateSpace& pick(const io::ProblemFile& f, std::size_t task, const std::string& what) {
    if (f.systems.size() == 1) return f.systems.front();
    if (task >= f.systems.size()) {
        throw Error(ErrorCode::InvalidProblem, what + " file has no system " + std::to_string(task));
    }
    return f.systems[task];
}

std::vector<std::string> output_header(const std::string& prefix, Eigen::Index p) {
    std::vector<std::string> h;
    for (Eigen::Index k = 1; k <= p; ++k) h.push_back(prefix + std::to_string(k));
    return h;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const io::ResultFile res = io::read_result(a.result);
    const NeuralController ctrl = res.controller();
    if (a.task >= ctrl.tasks.size()) {
        throw Error(ErrorCode::InvalidProblem, "--task " + std::to_string(a.task) + " out of range");
    }
    const TaskBias& bias = ctrl.tasks[a.task];
    const StateSpace linear = linearize(ctrl, bias);
    if (a.input < 0 || a.input >= linear.inputs()) {
        throw Error(ErrorCode::DimensionMismatch, "--input channel out of range");
    }

    std::vector<std::string> header{"t"};
    io::CsvWriter* writer = nullptr;
    std::optional<io::CsvWriter> csv;

    if (a.open_loop) {
        // Impulse on input `input` as a state kick x(0) = x_eq + alpha B e_k;
        // output deviation scaled by 1/alpha against the linearized response.
        const Eigen::Index p = linear.outputs();
        for (auto& h : output_header("y_linear_", p)) header.push_back(h);
        for (auto& h : output_header("y_neural_", p)) header.push_back(h);
        csv.emplace(header);
        writer = &*csv;
        const Vector x0 = bias.x_eq + a.amplitude * ctrl.B.col(a.input);
        const Trajectory traj = simulate(ctrl, bias.d, SimulationInput{}, x0, a.t_max, a.dt);
        StateSpace lin_k = linear;
        lin_k.B = linear.B.col(a.input).eval();
        const auto g = impulse_response(lin_k, traj.t);
        const Vector y_eq = ctrl.C * bias.x_eq;
        for (std::size_t k = 0; k < traj.t.size(); ++k) {
            std::vector<double> row{traj.t[k]};
            for (Eigen::Index i = 0; i < p; ++i) row.push_back(g[k](i, 0));
            const Vector y = (traj.outputs.col(static_cast<Eigen::Index>(k)) - y_eq) / a.amplitude;
            for (Eigen::Index i = 0; i < p; ++i) row.push_back(y(i));
            writer->add_row(row);
        }
    } else {
        if (a.plant.empty() || a.problem.empty()) {
            throw Error(ErrorCode::InvalidProblem,
                        "closed-loop impulse comparison needs --plant and --problem");
        }
        const io::ProblemFile plants = io::read_problem(a.plant);
        const io::ProblemFile desired = io::read_problem(a.problem);
        const StateSpace& plant = pick(plants, a.task, "plant");
        const StateSpace& ctrl_d = pick(desired, a.task, "problem");
        const ImpulseComparison cmp = impulse_comparison(plant, ctrl_d, linear, a.t_max, a.dt, a.input);
        const Eigen::Index p = plant.outputs();
        for (auto& h : output_header("y_desired_", p)) header.push_back(h);
        for (auto& h : output_header("y_neural_", p)) header.push_back(h);
        csv.emplace(header);
        writer = &*csv;
        for (std::size_t k = 0; k < cmp.t.size(); ++k) {
            std::vector<double> row{cmp.t[k]};
            const auto r = static_cast<Eigen::Index>(k);
            for (Eigen::Index i = 0; i < p; ++i) row.push_back(cmp.desired(r, i));
            for (Eigen::Index i = 0; i < p; ++i) row.push_back(cmp.neural(r, i));
            writer->add_row(row);
        }
        out << "max |y_desired - y_neural|: " << fmt(cmp.max_gap()) << "\n";
    }
    if (a.out.empty()) {
        out << writer->str();
    } else {
        writer->write(a.out);
        out << "wrote " << a.out << "\n";
    }
    return Ok;
}

// ---- bench ---------------------------------------------------------------------

struct BenchArgs {
    int trials = ExperimentConfig{}.trials;
    int iters = ExperimentConfig{}.iters;
    std::uint64_t seed = ExperimentConfig{}.seed;
    std::string out = ".";
    int workers = 0;
};

ExperimentConfig experiment_config(const BenchArgs& a) {
    ExperimentConfig c;
    c.trials = a.trials;
    c.iters = a.iters;
    c.seed = a.seed;
    c.workers = a.workers;
    if (c.trials < 1) throw Error(ErrorCode::DomainError, "--trials must be >= 1");
    if (c.iters < 1) throw Error(ErrorCode::DomainError, "--iters must be >= 1");
    return c;
}

void write_trials(const ExperimentRecord& rec, bool with_bound, const fs::path& path) {
    std::vector<std::string> header{rec.sweep_name, "trial", "seed", "final_cost"};
    if (with_bound) header.push_back("upper_bound");
    io::CsvWriter csv(header);
    for (const auto& r : rec.rows) {
        std::vector<std::string> row{std::to_string(r.sweep), std::to_string(r.trial),
                                     std::to_string(r.seed), fmt(r.final_cost)};
        if (with_bound) row.push_back(fmt(r.upper_bound));
        csv.add_row(row);
    }
    csv.write(path);
}

void write_summary(const ExperimentRecord& rec, const fs::path& path) {
    io::CsvWriter csv({rec.sweep_name, "min", "q1", "median", "q3", "max"});
    for (int v : rec.sweep_values) {
        const Quartiles q = rec.summary(v);
        csv.add_row({static_cast<double>(v), q.min, q.q1, q.median, q.q3, q.max});
    }
    csv.write(path);
}

void print_medians(const ExperimentRecord& rec, std::ostream& out) {
    for (int v : rec.sweep_values) {
        out << rec.sweep_name << "=" << v << " median " << fmt(rec.summary(v).median) << "\n";
    }
}

int bench_cost_vs_dim(const BenchArgs& a, std::ostream& out) {
    const ExperimentRecord rec = experiment_cost_vs_dim(experiment_config(a));
    const fs::path dir(a.out);
    write_trials(rec, false, dir / "cost_vs_dim.csv");
    write_summary(rec, dir / "cost_vs_dim_summary.csv");
    print_medians(rec, out);
    return Ok;
}

ExperimentRecord run_count(const BenchArgs& a, std::ostream& out) {
    const ExperimentRecord rec = experiment_cost_vs_count(experiment_config(a));
    const fs::path dir(a.out);
    write_trials(rec, true, dir / "cost_vs_count.csv");
    write_summary(rec, dir / "cost_vs_count_summary.csv");
    print_medians(rec, out);
    return rec;
}

int bench_cost_vs_count(const BenchArgs& a, std::ostream& out) {
    run_count(a, out);
    return Ok;
}

int bench_bound_gap(const BenchArgs& a, std::ostream& out) {
    const ExperimentRecord rec = run_count(a, out);
    const fs::path dir(a.out);
    write_trials(rec, true, dir / "bound_gap.csv");
    io::CsvWriter csv({"M", "mean_cost", "mean_bound", "violations", "trials"});
    int violations = 0;
    for (const BoundGapRow& g : experiment_bound_gap(rec)) {
        csv.add_row({static_cast<double>(g.M), g.mean_cost, g.mean_bound,
                     static_cast<double>(g.violations), static_cast<double>(g.trials)});
        violations += g.violations;
    }
    csv.write(dir / "bound_gap_summary.csv");
    out << "bound violations: " << violations << "\n";
    return Ok;
}

int bench_plants(const BenchArgs& a, std::ostream& out) {
    const PlantCatalog cat = plant_catalog();
    io::ProblemFile plants, controllers;
    controllers.controller_dim = 3;
    const auto all = cat.all();
    for (std::size_t i = 0; i < all.size(); ++i) {
        plants.systems.push_back(*all[i]);
        plants.labels.emplace_back(PlantCatalog::names[i]);
        controllers.systems.push_back(lqg_controller(*all[i]));
        controllers.labels.emplace_back(std::string(PlantCatalog::names[i]) + "_lqg");
    }
    const fs::path dir(a.out);
    io::write_problem(dir / "plants.json", plants);
    io::write_problem(dir / "lqg_controllers.json", controllers);
    out << "wrote " << (dir / "plants.json").string() << " and "
        << (dir / "lqg_controllers.json").string() << " (" << all.size() << " systems each)\n";
    return Ok;
}

int bench_four_plant(const BenchArgs& a, std::ostream& out) {
    TrainConfig config;
    config.seed = a.seed;
    config.max_iters = a.iters;
    const FourPlantDemo demo = four_plant_demo(config);
    const fs::path dir(a.out);
    io::write_result(dir / "four_plant_result.json", io::ResultFile::from(demo.result, config));
    for (std::size_t i = 0; i < demo.responses.size(); ++i) {
        const ImpulseComparison& cmp = demo.responses[i];
        std::vector<std::string> header{"t"};
        for (auto& h : output_header("y_desired_", cmp.desired.cols())) header.push_back(h);
        for (auto& h : output_header("y_neural_", cmp.neural.cols())) header.push_back(h);
        io::CsvWriter csv(header);
        for (std::size_t k = 0; k < cmp.t.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            std::vector<double> row{cmp.t[k]};
            for (Eigen::Index j = 0; j < cmp.desired.cols(); ++j) row.push_back(cmp.desired(r, j));
            for (Eigen::Index j = 0; j < cmp.neural.cols(); ++j) row.push_back(cmp.neural(r, j));
            csv.add_row(row);
        }
        csv.write(dir / ("impulse_" + std::string(PlantCatalog::names[i]) + ".csv"));
        out << PlantCatalog::names[i] << ": closed-loop abscissa "
            << fmt(demo.closed_loop_abscissa[i]) << ", max impulse gap " << fmt(cmp.max_gap())
            << "\n";
    }
    const double reduction = 1.0 - demo.result.final_cost() / demo.result.initial_cost();
    out << "cost " << fmt(demo.result.initial_cost()) << " -> " << fmt(demo.result.final_cost())
        << " (reduction " << fmt(100.0 * reduction) << "%), status "
        << to_string(demo.result.status) << "\n";
    return demo.result.status == TrainStatus::Stalled ? Stalled : Ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-task neural controller synthesis and bound certification", "mtctrl"};
    app.footer(kExitCodes);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(MTCTRL_VERSION));

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "fit a neural controller to a problem file");
    add_problem_args(train_cmd, train_args.problem);
    train_cmd->add_option("--seed", train_args.seed, "initialization seed");
    train_cmd->add_option("--max-iters", train_args.max_iters, "iteration cap")->capture_default_str();
    train_cmd->add_option("--tol", train_args.tol, "gradient-norm tolerance")->capture_default_str();
    train_cmd->add_option("--out", train_args.out, "result file (JSON)");

    GradcheckArgs grad_args;
    auto* grad_cmd = app.add_subcommand("gradcheck", "compare analytic and finite-difference gradients");
    add_problem_args(grad_cmd, grad_args.problem);
    grad_cmd->add_option("--seed", grad_args.seed, "seed for the evaluation point");
    grad_cmd->add_flag("--perturb", grad_args.perturb,
                       "flip the sign of the analytic C gradient (negative control)");

    BoundsArgs bounds_args;
    auto* bounds_cmd = app.add_subcommand("bounds", "upper and lower bounds on the optimal cost");
    add_problem_args(bounds_cmd, bounds_args.problem);
    bounds_cmd->add_flag("--sharpen", bounds_args.sharpen, "maximize the L1 bound over all pairs");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "impulse responses of a trained controller");
    sim_cmd->add_option("--result", sim_args.result, "result file from train")->required();
    sim_cmd->add_option("--task", sim_args.task, "task index")->capture_default_str();
    sim_cmd->add_option("--plant", sim_args.plant,
                        "plant problem file (system --task, or the only system)");
    sim_cmd->add_option("--problem", sim_args.problem, "desired controllers (problem file)");
    auto* impulse_flag = sim_cmd->add_flag("--impulse", sim_args.impulse,
                                           "closed-loop impulse comparison (default)");
    sim_cmd->add_flag("--open-loop", sim_args.open_loop,
                      "nonlinear open-loop response vs the linearization")
        ->excludes(impulse_flag);
    sim_cmd->add_option("--t-max", sim_args.t_max, "horizon")->capture_default_str();
    sim_cmd->add_option("--dt", sim_args.dt, "sample step")->capture_default_str();
    sim_cmd->add_option("--input", sim_args.input, "input channel")->capture_default_str();
    sim_cmd->add_option("--amplitude", sim_args.amplitude, "open-loop kick size")->capture_default_str();
    sim_cmd->add_option("--out", sim_args.out, "CSV output (stdout if omitted)");

    BenchArgs bench_args;
    bench_args.workers = default_workers();
    auto* bench_cmd = app.add_subcommand("bench", "experiment drivers writing CSV data");
    bench_cmd->require_subcommand(1);
    bench_cmd->add_option("--trials", bench_args.trials, "trials per sweep value")->capture_default_str();
    bench_cmd->add_option("--iters", bench_args.iters, "training iterations")->capture_default_str();
    bench_cmd->add_option("--seed", bench_args.seed, "base seed")->capture_default_str();
    bench_cmd->add_option("--out", bench_args.out, "output directory")->capture_default_str();
    bench_cmd->add_option("--workers", bench_args.workers,
                          "parallel trials (0: all processors; env MTCTRL_WORKERS)")
        ->capture_default_str();
    for (auto* sub : {bench_cmd->add_subcommand("cost-vs-dim", "cost against controller dimension"),
                      bench_cmd->add_subcommand("cost-vs-count", "cost against number of systems"),
                      bench_cmd->add_subcommand("bound-gap", "trained cost against the upper bound"),
                      bench_cmd->add_subcommand("plants", "plant catalog and LQG controllers"),
                      bench_cmd->add_subcommand("four-plant", "four-plant training and impulse CSVs")}) {
        sub->fallthrough();
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : InputError;
    }

    try {
        if (*train_cmd) return cmd_train(train_args, out);
        if (*grad_cmd) return cmd_gradcheck(grad_args, out);
        if (*bounds_cmd) return cmd_bounds(bounds_args, out);
        if (*sim_cmd) return cmd_simulate(sim_args, out);
        if (*bench_cmd) {
            fs::create_directories(bench_args.out);
            if (bench_cmd->got_subcommand("cost-vs-dim")) return bench_cost_vs_dim(bench_args, out);
            if (bench_cmd->got_subcommand("cost-vs-count")) return bench_cost_vs_count(bench_args, out);
            if (bench_cmd->got_subcommand("bound-gap")) return bench_bound_gap(bench_args, out);
            if (bench_cmd->got_subcommand("plants")) return bench_plants(bench_args, out);
            if (bench_cmd->got_subcommand("four-plant")) return bench_four_plant(bench_args, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return InputError;
    }
    return InputError;
}

}  // namespace mtctrl::cli

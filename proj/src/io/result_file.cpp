#include "json_matrix.hpp"
#include "mtctrl/io.hpp"

namespace mtctrl::io {

using namespace detail;

namespace {

json config_json(const TrainConfig& c) {
    return {{"max_iters", c.max_iters},
            {"grad_tol", c.grad_tol},
            {"seed", c.seed},
            {"init_spectral_norm", c.init_spectral_norm},
            {"max_failed_searches", c.max_failed_searches},
            {"armijo",
             {{"c", c.armijo.c},
              {"shrink", c.armijo.shrink},
              {"init_step", c.armijo.init_step},
              {"max_backtracks", c.armijo.max_backtracks},
              {"growth", c.armijo.growth}}}};
}

TrainConfig config_from(const json& j) {
    TrainConfig c;
    c.max_iters = to_int(field(j, "max_iters", "config"), "config.max_iters");
    c.grad_tol = to_real(field(j, "grad_tol", "config"), "config.grad_tol");
    const json& seed = field(j, "seed", "config");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) fail("config.seed", "expected an integer");
    c.seed = seed.get<std::uint64_t>();
    c.init_spectral_norm = to_real(field(j, "init_spectral_norm", "config"), "config.init_spectral_norm");
    c.max_failed_searches = to_int(field(j, "max_failed_searches", "config"), "config.max_failed_searches");
    const json& a = field(j, "armijo", "config");
    c.armijo.c = to_real(field(a, "c", "config.armijo"), "config.armijo.c");
    c.armijo.shrink = to_real(field(a, "shrink", "config.armijo"), "config.armijo.shrink");
    c.armijo.init_step = to_real(field(a, "init_step", "config.armijo"), "config.armijo.init_step");
    c.armijo.max_backtracks =
        to_int(field(a, "max_backtracks", "config.armijo"), "config.armijo.max_backtracks");
    c.armijo.growth = to_real(field(a, "growth", "config.armijo"), "config.armijo.growth");
    return c;
}

}  // namespace

ResultFile ResultFile::from(const TrainResult& result, const TrainConfig& config) {
    ResultFile f;
    f.tool_version = MTCTRL_VERSION;
    f.status = std::string(to_string(result.status));
    f.iterations = result.iterations;
    f.config = config;
    f.vars = result.vars;
    f.tasks = result.controller.tasks;
    f.cost_history = result.cost_history;
    f.grad_norm_history = result.grad_norm_history;
    return f;
}

NeuralController ResultFile::controller() const { return {vars.W, vars.B, vars.C, tasks}; }

ResultFile parse_result(const std::string& json_text) {
    const json doc = parse_text(json_text);
    if (!doc.is_object()) fail("<root>", "expected an object");
    ResultFile f;
    const json& version = field(doc, "tool_version", "");
    if (!version.is_string()) fail("tool_version", "expected a string");
    f.tool_version = version.get<std::string>();
    const json& status = field(doc, "status", "");
    if (!status.is_string()) fail("status", "expected a string");
    f.status = status.get<std::string>();
    f.iterations = to_int(field(doc, "iterations", ""), "iterations");
    f.config = config_from(field(doc, "config", ""));

    f.vars.W = to_matrix(field(doc, "W", ""), "W");
    const auto n = f.vars.W.rows();
    if (f.vars.W.cols() != n || n == 0) fail("W", "expected a non-empty square matrix");
    f.vars.B = to_matrix(field(doc, "B", ""), "B");
    f.vars.C = to_matrix(field(doc, "C", ""), "C", n);
    if (f.vars.B.rows() != n) fail("B", "row count must equal dim(W)");
    if (f.vars.C.cols() != n) fail("C", "column count must equal dim(W)");

    const json& tasks = field(doc, "tasks", "");
    if (!tasks.is_array()) fail("tasks", "expected an array");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string where = "tasks[" + std::to_string(i) + "]";
        const json& t = tasks[i];
        auto vec = [&](const char* key) {
            Vector v = to_vector(field(t, key, where), where + "." + key);
            if (v.size() != n) fail(where + "." + key, "length must equal dim(W)");
            return v;
        };
        f.vars.theta.push_back(vec("theta"));
        f.tasks.push_back({vec("dbar"), vec("d"), vec("x_eq")});
    }
    f.cost_history = to_doubles(field(doc, "cost_history", ""), "cost_history");
    f.grad_norm_history = to_doubles(field(doc, "grad_norm_history", ""), "grad_norm_history");
    return f;
}

ResultFile read_result(const std::filesystem::path& path) { return parse_result(read_text(path)); }

std::string dump_result(const ResultFile& f) {
    json doc;
    doc["tool_version"] = f.tool_version;
    doc["status"] = f.status;
    doc["iterations"] = f.iterations;
    doc["config"] = config_json(f.config);
    doc["W"] = from_matrix(f.vars.W);
    doc["B"] = from_matrix(f.vars.B);
    doc["C"] = from_matrix(f.vars.C);
    json tasks = json::array();
    for (std::size_t i = 0; i < f.tasks.size(); ++i) {
        tasks.push_back({{"theta", from_vector(f.vars.theta.at(i))},
                         {"dbar", from_vector(f.tasks[i].dbar)},
                         {"d", from_vector(f.tasks[i].d)},
                         {"x_eq", from_vector(f.tasks[i].x_eq)}});
    }
    doc["tasks"] = std::move(tasks);
    doc["cost_history"] = f.cost_history;
    doc["grad_norm_history"] = f.grad_norm_history;
    return doc.dump(2) + "\n";
}

void write_result(const std::filesystem::path& path, const ResultFile& file) {
    write_text(path, dump_result(file));
}

}  // namespace mtctrl::io

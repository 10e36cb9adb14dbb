#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtctrl/trainer.hpp"

namespace mtctrl::io {

/// JSON problem file:
///   { "controller_dim": N,                      (optional)
///     "systems": [ { "label": "...",             (optional)
///                    "A": [[...], ...], "B": [[...]], "C": [[...]] }, ... ] }
/// Matrices are row-major nested arrays.
struct ProblemFile {
    std::vector<StateSpace> systems;
    std::vector<std::string> labels;
    std::optional<int> controller_dim;

    /// Throws InvalidProblem when neither the file nor `override_dim` give N.
    MultiTaskProblem to_problem(std::optional<int> override_dim = std::nullopt) const;
};

ProblemFile parse_problem(const std::string& json_text);
ProblemFile read_problem(const std::filesystem::path& path);
std::string dump_problem(const ProblemFile& file);
void write_problem(const std::filesystem::path& path, const ProblemFile& file);

/// Training output: decision variables, realized biases per task, history,
/// status and an echo of the configuration.
struct ResultFile {
    std::string tool_version;
    std::string status;
    int iterations = 0;
    TrainConfig config;
    DecisionVars vars;
    std::vector<TaskBias> tasks;
    std::vector<double> cost_history;
    std::vector<double> grad_norm_history;

    static ResultFile from(const TrainResult& result, const TrainConfig& config);
    NeuralController controller() const;
};

ResultFile parse_result(const std::string& json_text);
ResultFile read_result(const std::filesystem::path& path);
std::string dump_result(const ResultFile& file);
void write_result(const std::filesystem::path& path, const ResultFile& file);

// ---- CSV ------------------------------------------------------------------

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_double(double value);

/// Comma separated, header row first, LF line endings.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& values);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t columns() const { return header_.size(); }

private:
    std::vector<std::string> header_;
    std::string body_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mtctrl::io

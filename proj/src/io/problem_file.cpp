#include "json_matrix.hpp"
#include "mtctrl/io.hpp"

namespace mtctrl::io {

using namespace detail;

MultiTaskProblem ProblemFile::to_problem(std::optional<int> override_dim) const {
    const std::optional<int> n = override_dim ? override_dim : controller_dim;
    if (!n) throw Error(ErrorCode::InvalidProblem, "controller_dim missing; pass --dim");
    MultiTaskProblem problem{systems, *n};
    problem.validate();
    return problem;
}

ProblemFile parse_problem(const std::string& json_text) {
    const json doc = parse_text(json_text);
    if (!doc.is_object()) fail("<root>", "expected an object");
    ProblemFile out;
    const json& systems = field(doc, "systems", "");
    if (!systems.is_array()) fail("systems", "expected an array");
    if (systems.empty()) fail("systems", "at least one system is required");
    for (std::size_t i = 0; i < systems.size(); ++i) {
        const std::string where = "systems[" + std::to_string(i) + "]";
        const json& s = systems[i];
        if (!s.is_object()) fail(where, "expected an object");
        Matrix A = to_matrix(field(s, "A", where), where + ".A");
        Matrix B = to_matrix(field(s, "B", where), where + ".B");
        Matrix C = to_matrix(field(s, "C", where), where + ".C", A.rows());
        try {
            out.systems.push_back(StateSpace::make(std::move(A), std::move(B), std::move(C)));
        } catch (const Error& e) {
            fail(where, e.what());
        }
        std::string label;
        if (const auto it = s.find("label"); it != s.end()) {
            if (!it->is_string()) fail(where + ".label", "expected a string");
            label = it->get<std::string>();
        }
        out.labels.push_back(std::move(label));
    }
    if (const auto it = doc.find("controller_dim"); it != doc.end()) {
        const int n = to_int(*it, "controller_dim");
        if (n < 1) fail("controller_dim", "must be >= 1");
        out.controller_dim = n;
    }
    return out;
}

ProblemFile read_problem(const std::filesystem::path& path) { return parse_problem(read_text(path)); }

std::string dump_problem(const ProblemFile& file) {
    json doc;
    if (file.controller_dim) doc["controller_dim"] = *file.controller_dim;
    json systems = json::array();
    for (std::size_t i = 0; i < file.systems.size(); ++i) {
        json s;
        if (i < file.labels.size() && !file.labels[i].empty()) s["label"] = file.labels[i];
        s["A"] = from_matrix(file.systems[i].A);
        s["B"] = from_matrix(file.systems[i].B);
        s["C"] = from_matrix(file.systems[i].C);
        systems.push_back(std::move(s));
    }
    doc["systems"] = std::move(systems);
    return doc.dump(2) + "\n";
}

void write_problem(const std::filesystem::path& path, const ProblemFile& file) {
    write_text(path, dump_problem(file));
}

}  // namespace mtctrl::io

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mtctrl/io.hpp"

namespace mtctrl::io {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) {
        throw Error(ErrorCode::DimensionMismatch, "CSV row has " + std::to_string(cells.size()) +
                                                      " cells, header has " +
                                                      std::to_string(header_.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    add_row(cells);
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    return out + body_;
}

void CsvWriter::write(const std::filesystem::path& path) const { write_text(path, str()); }

CsvTable read_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

}  // namespace mtctrl::io

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mtctrl/error.hpp"
#include "mtctrl/lti.hpp"

namespace mtctrl::io::detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ParseError, where + ": " + what);
}

inline const json& field(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(where.empty() ? key : where + "." + key, "missing field");
    return *it;
}

inline double to_real(const json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(where, "non-finite number");
    return x;
}

inline int to_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
}

/// Row-major nested array.  An empty outer array is a 0 x `empty_cols` matrix.
inline Matrix to_matrix(const json& v, const std::string& where, Eigen::Index empty_cols = 0) {
    if (!v.is_array()) fail(where, "expected a nested array");
    const auto rows = static_cast<Eigen::Index>(v.size());
    if (rows == 0) return Matrix(0, empty_cols);
    if (!v[0].is_array()) fail(where + "[0]", "expected an array row");
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        const json& row = v[static_cast<std::size_t>(i)];
        if (!row.is_array()) fail(row_where, "expected an array row");
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            fail(row_where, "ragged row: " + std::to_string(row.size()) + " entries, expected " +
                                std::to_string(cols));
        }
        for (Eigen::Index j = 0; j < cols; ++j) {
            m(i, j) = to_real(row[static_cast<std::size_t>(j)],
                              row_where + "[" + std::to_string(j) + "]");
        }
    }
    return m;
}

inline Vector to_vector(const json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = to_real(v[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

inline std::vector<double> to_doubles(const json& v, const std::string& where) {
    const Vector x = to_vector(v, where);
    return {x.data(), x.data() + x.size()};
}

inline json from_matrix(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

inline json from_vector(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

inline json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
    }
}

}  // namespace mtctrl::io::detail

#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cruisesafe/errors.hpp"

namespace cruisesafe::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file: " + path);
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline const json& expect(const json& j, const char* field, const std::string& ctx) {
    auto it = j.find(field);
    if (it == j.end()) {
        throw ParseError("missing field '" + std::string(field) + "' in " + ctx);
    }
    return *it;
}

inline std::string expect_string(const json& j, const char* field, const std::string& ctx) {
    const json& v = expect(j, field, ctx);
    if (!v.is_string()) {
        throw ParseError("field '" + std::string(field) + "' in " + ctx + " must be a string");
    }
    return v.get<std::string>();
}

inline double expect_number(const json& j, const char* field, const std::string& ctx) {
    const json& v = expect(j, field, ctx);
    if (!v.is_number()) {
        throw ParseError("field '" + std::string(field) + "' in " + ctx + " must be a number");
    }
    return v.get<double>();
}

inline const json& expect_array(const json& j, const char* field, const std::string& ctx) {
    const json& v = expect(j, field, ctx);
    if (!v.is_array()) {
        throw ParseError("field '" + std::string(field) + "' in " + ctx + " must be an array");
    }
    return v;
}

inline std::string get_string_or(const json& j, const char* field, const std::string& fallback) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    return it->get<std::string>();
}

inline double get_number_or(const json& j, const char* field, double fallback) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    return it->get<double>();
}

inline bool get_bool_or(const json& j, const char* field, bool fallback) {
    auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        return fallback;
    }
    return it->get<bool>();
}

/// Directory part of a path ("" when the path has no separator), used to
/// resolve references relative to the file that contains them.
inline std::string dir_of(const std::string& path) {
    auto pos = path.find_last_of("/\\");
    return pos == std::string::npos ? std::string() : path.substr(0, pos);
}

inline std::string join_path(const std::string& dir, const std::string& rel) {
    if (dir.empty() || rel.empty() || rel.front() == '/') {
        return rel;
    }
    return dir + "/" + rel;
}

}  // namespace cruisesafe::detail

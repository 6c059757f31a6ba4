#pragma once

// Parameter-file ingestion. Schema:
//   { "upper": [[a, alpha], ...], "lower": [[b, beta], ...],
//     "allow_white_noise": bool (optional) }

#include <fstream>
#include <string>

#include <json.hpp>

#include "gwright/errors.hpp"
#include "gwright/wright.hpp"

namespace gwright {

inline WrightParams parse_params_json(const std::string& text, const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw parse_error(origin + ": " + e.what());
    }
    if (!j.is_object()) throw parse_error(origin + ": top level must be an object");

    WrightParams p;
    auto read_pairs = [&](const char* field, param_pairs& out) {
        if (!j.contains(field)) return;
        const auto& arr = j.at(field);
        if (!arr.is_array()) throw parse_error(origin + ": '" + field + "' must be an array");
        for (size_t i = 0; i < arr.size(); ++i) {
            const auto& pr = arr[i];
            if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number()) {
                throw parse_error(origin + ": '" + field + "' entry " + std::to_string(i + 1) +
                                  " must be a [real, real] pair");
            }
            out.emplace_back(pr[0].get<double>(), pr[1].get<double>());
        }
    };
    read_pairs("upper", p.upper);
    read_pairs("lower", p.lower);
    if (j.contains("allow_white_noise")) {
        if (!j.at("allow_white_noise").is_boolean()) {
            throw parse_error(origin + ": 'allow_white_noise' must be a boolean");
        }
        p.allow_white_noise = j.at("allow_white_noise").get<bool>();
    }
    for (const auto& [key, _] : j.items()) {
        if (key != "upper" && key != "lower" && key != "allow_white_noise") {
            throw parse_error(origin + ": unknown field '" + key + "'");
        }
    }
    return p;
}

inline WrightParams load_params_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open parameter file");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_params_json(text, path);
}

}  // namespace gwright

// Copyright 2026 The chainlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

using namespace chainlogic;
using namespace chainlogic::cli;
using nlohmann::json;

namespace {

void check_keys(const json &obj, const std::string &where, std::initializer_list<const char *> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto &[key, value] : obj.items()) {
        if (!ok.count(key)) {
            throw ConfigError(where + key, "unknown field");
        }
    }
}

double as_number(const json &j, const std::string &field) {
    if (!j.is_number()) {
        throw ConfigError(field, "expected a number");
    }
    double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ConfigError(field, "expected a finite number");
    }
    return v;
}

const json &as_object(const json &j, const std::string &field) {
    if (!j.is_object()) {
        throw ConfigError(field, "expected an object");
    }
    return j;
}

const json &as_array(const json &j, const std::string &field, std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) {
        throw ConfigError(field, "expected an array");
    }
    if (size.has_value() && j.size() != *size) {
        throw ConfigError(field, "expected " + std::to_string(*size) + " entries");
    }
    return j;
}

Complex as_complex(const json &j, const std::string &field) {
    if (j.is_number()) {
        return {as_number(j, field), 0.0};
    }
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(field, "expected a number or an [re, im] pair");
    }
    return {as_number(j[0], field + "/0"), as_number(j[1], field + "/1")};
}

HardyAmplitudes parse_triple(const json &j, const std::string &field, std::vector<std::string> &warnings) {
    as_array(j, field, 3);
    std::array<Complex, 3> t;
    for (std::size_t i = 0; i < 3; i++) {
        t[i] = as_complex(j[i], field + "/" + std::to_string(i));
    }
    double n = std::norm(t[0]) + std::norm(t[1]) + std::norm(t[2]);
    if (std::abs(n - 1.0) >= kNormalizeSlack) {
        throw ConfigError(field, "|a|^2 + |b|^2 + |c|^2 = " + std::to_string(n) + " is not normalizable (must be 1)");
    }
    if (n != 1.0) {
        double s = 1.0 / std::sqrt(n);
        for (auto &x : t) {
            x *= s;
        }
        if (std::abs(n - 1.0) > kAlgebraTol) {
            warnings.push_back("warning: " + field + " renormalized (norm^2 was " + std::to_string(n) + ")");
        }
    }
    return HardyAmplitudes::make(t[0], t[1], t[2]);
}

ChoiceAmplitudes parse_weights(const json &j, const std::string &field, std::vector<std::string> &warnings) {
    as_array(j, field, 2);
    double w1 = as_number(j[0], field + "/0");
    double w2 = as_number(j[1], field + "/1");
    if (!(w1 > 0.0) || !(w2 > 0.0)) {
        throw ConfigError(field, "choice weights must be positive");
    }
    double sum = w1 + w2;
    if (std::abs(sum - 1.0) >= kNormalizeSlack) {
        throw ConfigError(field, "choice weights must sum to 1");
    }
    if (std::abs(sum - 1.0) > kAlgebraTol) {
        warnings.push_back("warning: " + field + " renormalized (sum was " + std::to_string(sum) + ")");
    }
    return ChoiceAmplitudes::from_weights(w1 / sum, w2 / sum);
}

double parse_tolerance(const json &j, const std::string &field) {
    double v = as_number(j, field);
    if (!(v > 0.0)) {
        throw ConfigError(field, "tolerance must be positive");
    }
    return v;
}

SweepSpec parse_sweep(const json &j, std::vector<std::string> &warnings) {
    as_object(j, "/sweep");
    check_keys(j, "/sweep/", {"family", "b", "grid", "triples"});
    SweepSpec spec;
    if (j.contains("family")) {
        if (!j["family"].is_string()) {
            throw ConfigError("/sweep/family", "expected a string");
        }
        spec.family = parse_sweep_family(j["family"].get<std::string>());
        if (!spec.family.has_value()) {
            throw ConfigError("/sweep/family", "expected \"symmetric_ac\" or \"equal_bc\"");
        }
    }
    if (j.contains("b") && j.contains("grid")) {
        throw ConfigError("/sweep/grid", "give either b or grid, not both");
    }
    if (j.contains("b")) {
        const json &b = as_array(j["b"], "/sweep/b");
        for (std::size_t i = 0; i < b.size(); i++) {
            spec.b_values.push_back(as_number(b[i], "/sweep/b/" + std::to_string(i)));
        }
    }
    if (j.contains("grid")) {
        const json &g = as_object(j["grid"], "/sweep/grid");
        check_keys(g, "/sweep/grid/", {"from", "to", "steps"});
        for (const char *key : {"from", "to", "steps"}) {
            if (!g.contains(key)) {
                throw ConfigError(std::string("/sweep/grid/") + key, "missing");
            }
        }
        double from = as_number(g["from"], "/sweep/grid/from");
        double to = as_number(g["to"], "/sweep/grid/to");
        if (!g["steps"].is_number_integer() || g["steps"].get<long long>() < 1) {
            throw ConfigError("/sweep/grid/steps", "expected a positive integer");
        }
        auto steps = g["steps"].get<long long>();
        for (long long i = 0; i < steps; i++) {
            spec.b_values.push_back(steps == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(steps - 1));
        }
    }
    if (!spec.b_values.empty() && !spec.family.has_value()) {
        throw ConfigError("/sweep/family", "required when b values are given");
    }
    if (spec.family.has_value()) {
        auto [lo, hi] = family_range(*spec.family);
        for (std::size_t i = 0; i < spec.b_values.size(); i++) {
            double b = spec.b_values[i];
            if (!(b > lo && b < hi)) {
                throw ConfigError(
                    "/sweep/b/" + std::to_string(i),
                    "b = " + std::to_string(b) + " is outside the open range (" + std::to_string(lo) + ", " +
                        std::to_string(hi) + ")");
            }
        }
    }
    if (j.contains("triples")) {
        const json &t = as_array(j["triples"], "/sweep/triples");
        for (std::size_t i = 0; i < t.size(); i++) {
            spec.triples.push_back(parse_triple(t[i], "/sweep/triples/" + std::to_string(i), warnings));
        }
    }
    return spec;
}

}  // namespace

ScenarioOptions ScenarioConfig::options(bool prune) const {
    ScenarioOptions o;
    o.mode = mode;
    o.left = left;
    o.right = right;
    o.tol = tol;
    o.prune = prune;
    return o;
}

std::optional<double> chainlogic::cli::tolerance_from_env() {
    const char *raw = std::getenv("CHAINLOGIC_TOL");
    if (raw == nullptr || *raw == '\0') {
        return std::nullopt;
    }
    char *end = nullptr;
    double v = std::strtod(raw, &end);
    if (end == raw || *end != '\0' || !std::isfinite(v) || !(v > 0.0)) {
        throw ConfigError("CHAINLOGIC_TOL", "expected a positive number, got '" + std::string(raw) + "'");
    }
    return v;
}

ScenarioConfig chainlogic::cli::default_config() {
    ScenarioConfig cfg;
    if (auto env = tolerance_from_env()) {
        cfg.tol.consistency = *env;
    }
    return cfg;
}

ScenarioConfig chainlogic::cli::parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    as_object(j, "/");
    check_keys(j, "/", {"schema", "amplitudes", "choice_weights", "mode", "tolerances", "sweep"});
    if (!j.contains("schema")) {
        throw ConfigError("/schema", "missing");
    }
    if (!j["schema"].is_number_integer() || j["schema"].get<long long>() != 1) {
        throw ConfigError("/schema", "expected 1");
    }

    ScenarioConfig cfg = default_config();
    if (j.contains("amplitudes")) {
        cfg.amplitudes = parse_triple(j["amplitudes"], "/amplitudes", cfg.warnings);
    }
    if (j.contains("choice_weights")) {
        const json &w = as_object(j["choice_weights"], "/choice_weights");
        check_keys(w, "/choice_weights/", {"L", "R"});
        if (w.contains("L")) {
            cfg.left = parse_weights(w["L"], "/choice_weights/L", cfg.warnings);
        }
        if (w.contains("R")) {
            cfg.right = parse_weights(w["R"], "/choice_weights/R", cfg.warnings);
        }
    }
    if (j.contains("mode")) {
        if (j["mode"] == "particle") {
            cfg.mode = ScenarioMode::particle;
        } else if (j["mode"] == "apparatus") {
            cfg.mode = ScenarioMode::apparatus;
        } else {
            throw ConfigError("/mode", "expected \"particle\" or \"apparatus\"");
        }
    }
    if (j.contains("tolerances")) {
        const json &t = as_object(j["tolerances"], "/tolerances");
        check_keys(t, "/tolerances/", {"algebra", "consistency", "prune"});
        if (t.contains("algebra")) {
            cfg.tol.algebra = parse_tolerance(t["algebra"], "/tolerances/algebra");
        }
        if (t.contains("consistency")) {
            cfg.tol.consistency = parse_tolerance(t["consistency"], "/tolerances/consistency");
        }
        if (t.contains("prune")) {
            cfg.tol.prune = parse_tolerance(t["prune"], "/tolerances/prune");
        }
    }
    if (j.contains("sweep")) {
        cfg.sweep = parse_sweep(j["sweep"], cfg.warnings);
    }
    return cfg;
}

ScenarioConfig chainlogic::cli::load_config(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read config file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading config file '" + path + "'");
    }
    return parse_config(buf.str());
}

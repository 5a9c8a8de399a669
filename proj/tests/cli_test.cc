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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

using namespace chainlogic;
using namespace chainlogic::cli;
using json = nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string> &args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
   public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0;; i++) {
            path_ = base / ("chainlogic_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(i));
            if (std::filesystem::create_directory(path_)) {
                break;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string write(const std::string &name, const std::string &text) const {
        auto p = path_ / name;
        std::ofstream(p) << text;
        return p.string();
    }
    std::string file(const std::string &name) const {
        return (path_ / name).string();
    }

   private:
    std::filesystem::path path_;
};

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class EnvGuard {
   public:
    explicit EnvGuard(const char *value) {
        if (value) {
            ::setenv("CHAINLOGIC_TOL", value, 1);
        } else {
            ::unsetenv("CHAINLOGIC_TOL");
        }
    }
    ~EnvGuard() {
        ::unsetenv("CHAINLOGIC_TOL");
    }
};

bool contains(const std::string &haystack, const std::string &needle) {
    return haystack.find(needle) != std::string::npos;
}

std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> cells;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) {
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace

TEST(cli, requires_subcommand) {
    EXPECT_EQ(run({}).code, exit_usage);
    EXPECT_EQ(run({"bogus"}).code, exit_usage);
    EXPECT_EQ(run({"hardy", "--frobnicate"}).code, exit_usage);
}

TEST(cli, help_exits_zero) {
    auto r = run({"--help"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_TRUE(contains(r.out, "counterfactual"));
}

TEST(cli, consistency_default_is_consistent) {
    auto r = run({"consistency"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_TRUE(contains(r.out, "verdict: consistent"));
    EXPECT_TRUE(contains(r.out, "0.187500  ML2 -> ML2- -> MR2 -> MR2+"));
}

TEST(cli, consistency_demo_is_inconsistent) {
    auto r = run({"consistency", "--demo", "xzx"});
    EXPECT_EQ(r.code, exit_inconsistent);
    EXPECT_TRUE(contains(r.out, "INCONSISTENT"));
    EXPECT_TRUE(contains(r.out, "0.125000"));

    auto j = run({"consistency", "--demo", "xzx", "--json"});
    EXPECT_EQ(j.code, exit_inconsistent);
    auto doc = json::parse(j.out);
    EXPECT_EQ(doc["consistent"], false);
    EXPECT_EQ(doc["exit_code"], exit_inconsistent);
    EXPECT_NEAR(doc["worst_offdiag"]["magnitude"].get<double>(), oracle::xzx_named_offdiag(), 1e-12);
}

TEST(cli, consistency_no_prune_lists_sixteen_leaves) {
    auto doc = json::parse(run({"consistency", "--no-prune", "--json"}).out);
    EXPECT_EQ(doc["histories"].size(), 16u);
    double total = 0;
    for (const auto &h : doc["histories"]) {
        total += h["weight"].get<double>();
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(cli, hardy_text_and_json_agree) {
    auto t = run({"hardy"});
    ASSERT_EQ(t.code, exit_ok);
    EXPECT_TRUE(contains(t.out, "S4  0.083333  pass"));
    auto j = run({"hardy", "--json"});
    ASSERT_EQ(j.code, exit_ok);
    auto doc = json::parse(j.out);
    EXPECT_EQ(doc["schema"], 1);
    EXPECT_EQ(doc["command"], "hardy");
    EXPECT_EQ(doc["is_hardy"], true);
    for (const auto &s : doc["statements"]) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", s["probability"].get<double>());
        std::string row = s["name"].get<std::string>() + "  " + buf;
        EXPECT_TRUE(contains(t.out, row)) << row;
    }
    EXPECT_NEAR(doc["statements"][3]["probability"].get<double>(), 1.0 / 12.0, 1e-12);
}

TEST(cli, json_reports_are_byte_identical_across_runs) {
    for (std::vector<std::string> args : {std::vector<std::string>{"hardy", "--json"},
                                          {"consistency", "--json"},
                                          {"counterfactual", "--both", "--json"},
                                          {"export", "--format", "json"}}) {
        EXPECT_EQ(run(args).out, run(args).out);
    }
}

TEST(cli, hardy_b_zero_exits_not_hardy) {
    TempDir dir;
    auto cfg = dir.write("b0.json", R"({"schema": 1, "amplitudes": [0.6, 0, 0.8]})");
    auto r = run({"hardy", "--config", cfg});
    EXPECT_EQ(r.code, exit_not_hardy);
    EXPECT_TRUE(contains(r.out, "FAIL"));
    auto j = json::parse(run({"hardy", "--config", cfg, "--json"}).out);
    EXPECT_EQ(j["is_hardy"], false);
    EXPECT_EQ(j["exit_code"], exit_not_hardy);
}

TEST(cli, counterfactual_verdict_lines) {
    auto r1 = run({"counterfactual", "--setting", "ML1"});
    EXPECT_EQ(r1.code, exit_ok);
    EXPECT_TRUE(contains(r1.out, "necessary(MR2+), p = 1.000000"));
    auto r2 = run({"counterfactual", "--setting", "ML2"});
    EXPECT_EQ(r2.code, exit_ok);
    EXPECT_TRUE(contains(r2.out, "possible: P(MR2-|ML2+ path) = 0.500000"));
    auto both = run({"counterfactual", "--both"});
    EXPECT_TRUE(contains(both.out, "NONLOCALITY DEMONSTRATED (no-signaling intact: max marginal discrepancy < 1e-10)"));
}

TEST(cli, counterfactual_json) {
    auto doc = json::parse(run({"counterfactual", "--both", "--json"}).out);
    ASSERT_EQ(doc["results"].size(), 2u);
    EXPECT_EQ(doc["results"][0]["verdict"], "necessary");
    EXPECT_EQ(doc["results"][0]["outcome"], "MR2+");
    EXPECT_EQ(doc["results"][1]["verdict"], "possible");
    EXPECT_TRUE(doc["results"][1]["outcome"].is_null());
    EXPECT_EQ(doc["locality"]["nonlocality_demonstrated"], true);
    bool found = false;
    for (const auto &p : doc["results"][1]["pivot_paths"]) {
        if (p["path"].back() == "ML2+") {
            EXPECT_NEAR(p["outcomes"]["MR2-"].get<double>(), 0.5, 1e-12);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(cli, counterfactual_usage_errors) {
    EXPECT_EQ(run({"counterfactual"}).code, exit_usage);
    EXPECT_EQ(run({"counterfactual", "--setting", "ML3"}).code, exit_usage);
    EXPECT_EQ(run({"counterfactual", "--setting", "ML1", "--both"}).code, exit_usage);
}

TEST(cli, counterfactual_not_hardy) {
    TempDir dir;
    auto cfg = dir.write("b0.json", R"({"schema": 1, "amplitudes": [0.6, 0, 0.8]})");
    EXPECT_EQ(run({"counterfactual", "--setting", "ML1", "--config", cfg}).code, exit_not_hardy);
}

TEST(cli, sweep_formats_agree) {
    TempDir dir;
    auto cfg = dir.write("s.json", R"({"schema": 1, "sweep": {"family": "symmetric_ac", "b": [0.5, 0.1, 0.01]}})");
    auto text = run({"sweep", "--config", cfg});
    ASSERT_EQ(text.code, exit_ok);
    auto csv = run({"sweep", "--config", cfg, "--format", "csv"});
    ASSERT_EQ(csv.code, exit_ok);
    auto js = run({"sweep", "--config", cfg, "--json"});
    ASSERT_EQ(js.code, exit_ok);
    auto doc = json::parse(js.out);
    auto lines = split_lines(csv.out);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0],
              "a_re,a_im,b_re,b_im,c_re,c_im,s4,p_mr2_plus_given_ml2_plus,sr_ml1,sr_ml2,no_signaling_max_discrepancy");
    ASSERT_EQ(doc["rows"].size(), 3u);
    for (std::size_t i = 0; i < 3; i++) {
        auto cells = split_csv(lines[i + 1]);
        ASSERT_EQ(cells.size(), 11u);
        const auto &row = doc["rows"][i];
        EXPECT_EQ(std::stod(cells[6]), row["s4"].get<double>());
        EXPECT_EQ(std::stod(cells[7]), row["p_mr2_plus_given_ml2_plus"].get<double>());
        EXPECT_EQ(std::stod(cells[10]), row["no_signaling_max_discrepancy"].get<double>());
        EXPECT_EQ(cells[8], "necessary(MR2+)");
        double a2 = std::pow(std::stod(cells[0]), 2);
        double b2 = std::pow(std::stod(cells[2]), 2);
        EXPECT_NEAR(std::stod(cells[7]), b2 / (a2 + b2), 1e-10);
    }
    EXPECT_LT(doc["rows"][2]["s4"].get<double>(), 2e-4);
    EXPECT_TRUE(contains(text.out, "0.075000"));
}

TEST(cli, sweep_maximize_equal_bc) {
    TempDir dir;
    auto cfg = dir.write("m.json", R"({"schema": 1, "sweep": {"family": "equal_bc"}})");
    auto r = run({"sweep", "--config", cfg, "--maximize-s4", "--json"});
    ASSERT_EQ(r.code, exit_ok);
    auto doc = json::parse(r.out);
    EXPECT_TRUE(doc["rows"].empty());
    EXPECT_NEAR(doc["maximum"]["s4"].get<double>(), oracle::grid_max_s4_equal_bc(10000), 1e-3);
    auto csv = run({"sweep", "--config", cfg, "--maximize-s4", "--format", "csv"});
    EXPECT_TRUE(contains(csv.out, "# max_s4,"));
    EXPECT_EQ(run({"sweep", "--config", cfg}).code, exit_usage);
}

TEST(cli, sweep_errors) {
    TempDir dir;
    EXPECT_EQ(run({"sweep"}).code, exit_usage);
    auto out_of_range = dir.write("r.json", R"({"schema": 1, "sweep": {"family": "equal_bc", "b": [0.9]}})");
    auto r = run({"sweep", "--config", out_of_range});
    EXPECT_EQ(r.code, exit_usage);
    EXPECT_TRUE(contains(r.err, "/sweep/b"));
    auto non_strict = dir.write("n.json", R"({"schema": 1, "sweep": {"triples": [[0.6, 0, 0.8]]}})");
    EXPECT_EQ(run({"sweep", "--config", non_strict}).code, exit_not_hardy);
}

TEST(cli, export_round_trip) {
    TempDir dir;
    auto path = dir.file("tree.json");
    ASSERT_EQ(run({"export", "--format", "json", "--out", path}).code, exit_ok);
    auto imported = import_tree_json(slurp(path));
    auto scenario = build_measurement_scenario(HardyAmplitudes::equal(), ScenarioOptions{});
    EXPECT_EQ(imported, skeleton_of(scenario.tree));

    auto dot_path = dir.file("tree.dot");
    ASSERT_EQ(run({"export", "--out", dot_path}).code, exit_ok);
    auto dot = slurp(dot_path);
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    EXPECT_EQ(dot, run({"export"}).out);
}

TEST(cli, export_no_prune_has_sixteen_leaves) {
    auto unpruned = import_tree_json(run({"export", "--format", "json", "--no-prune"}).out);
    std::size_t leaves = 0;
    std::vector<const SkeletonNode *> stack{&unpruned.root};
    while (!stack.empty()) {
        const SkeletonNode *n = stack.back();
        stack.pop_back();
        if (n->children.empty()) {
            leaves++;
        }
        for (const auto &c : n->children) {
            stack.push_back(&c);
        }
    }
    EXPECT_EQ(leaves, 16u);
}

TEST(cli, export_unwritable_path) {
    EXPECT_EQ(run({"export", "--out", "/nonexistent_dir_for_test/x.dot"}).code, exit_io);
}

TEST(cli, missing_config_file) {
    EXPECT_EQ(run({"hardy", "--config", "/nonexistent_dir_for_test/cfg.json"}).code, exit_io);
}

TEST(cli, malformed_config_names_field) {
    TempDir dir;
    struct Case {
        std::string body;
        std::string field;
    };
    std::vector<Case> cases = {
        {R"({"schema": 1, "amplitudes": [1, 2]})", "/amplitudes"},
        {R"({"schema": 2})", "/schema"},
        {R"({"schema": 1, "mode": "wave"})", "/mode"},
        {R"({"schema": 1, "tolerances": {"consistency": -1}})", "/tolerances/consistency"},
        {R"({"schema": 1, "choice_weights": {"L": [0.5, 0.2]}})", "/choice_weights/L"},
        {R"({"schema": 1, "unknown": true})", "/unknown"},
        {R"({"schema": 1, "amplitudes": [0.9, 0.9, 0.9]})", "/amplitudes"},
        {"{not json", ""},
    };
    for (const auto &c : cases) {
        auto cfg = dir.write("bad.json", c.body);
        auto r = run({"hardy", "--config", cfg});
        EXPECT_EQ(r.code, exit_usage) << c.body;
        EXPECT_TRUE(contains(r.err, "'" + c.field)) << r.err;
    }
}

TEST(cli, slightly_unnormalized_config_warns) {
    TempDir dir;
    auto cfg = dir.write("w.json", R"({"schema": 1, "amplitudes": [0.5773503, 0.5773503, 0.5773503]})");
    auto r = run({"hardy", "--config", cfg});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_TRUE(contains(r.err, "warning"));
}

TEST(cli, complex_amplitudes_accepted) {
    TempDir dir;
    double t = 1.0 / std::sqrt(3.0);
    auto cfg = dir.write("c.json", "{\"schema\": 1, \"amplitudes\": [[0, " + std::to_string(t) + "], " +
                                       std::to_string(t) + ", [" + std::to_string(t) + ", 0]]}");
    auto r = run({"hardy", "--config", cfg, "--json"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    auto doc = json::parse(r.out);
    EXPECT_NEAR(doc["statements"][3]["probability"].get<double>(), 1.0 / 12.0, 1e-6);
}

TEST(cli, tolerance_environment_override) {
    {
        EnvGuard env("1e-3");
        auto doc = json::parse(run({"hardy", "--json"}).out);
        EXPECT_EQ(doc["no_signaling"]["tol"].get<double>(), 1e-3);
    }
    {
        EnvGuard env("abc");
        auto r = run({"hardy"});
        EXPECT_EQ(r.code, exit_usage);
        EXPECT_TRUE(contains(r.err, "CHAINLOGIC_TOL"));
    }
    {
        EnvGuard env("1e-3");
        TempDir dir;
        auto cfg = dir.write("t.json", R"({"schema": 1, "tolerances": {"consistency": 1e-8}})");
        auto doc = json::parse(run({"hardy", "--config", cfg, "--json"}).out);
        EXPECT_EQ(doc["no_signaling"]["tol"].get<double>(), 1e-8);
    }
}

TEST(cli, particle_mode_matches_apparatus_mode) {
    TempDir dir;
    auto cfg = dir.write("p.json", R"({"schema": 1, "mode": "particle"})");
    auto p = json::parse(run({"hardy", "--config", cfg, "--json"}).out);
    auto a = json::parse(run({"hardy", "--json"}).out);
    EXPECT_EQ(p["mode"], "particle");
    for (std::size_t i = 0; i < 4; i++) {
        EXPECT_NEAR(p["statements"][i]["probability"].get<double>(), a["statements"][i]["probability"].get<double>(),
                    1e-10);
    }
}

#pragma once

#include "bellforge/prepare.hpp"
#include "bellforge/selftest.hpp"
#include "bellforge/verifier.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace bellforge {

struct RunConfig {
    int n = 1;
    int m = 5;
    std::uint64_t seed = 0;
    std::vector<std::string> specials;  // explicit; empty means generate
    std::size_t specials_count = 1;
    double min_z_fraction = 0.0;
    NoiseSpec noise;
    bool conjugate = false;
    std::uint64_t trials = 0;
    double alpha = 0.01;
    double tolerance = 1e-9;
    std::optional<double> gate;
    std::optional<double> threshold;   // prepare
    std::optional<double> prep_bound;  // prepare
    std::vector<std::string> chi;      // prepare / selftest subset
    std::string strategy;              // JSON path; empty means honest
    std::string out = ".";
    bool write_trials = false;
    std::size_t families = 1000;
    std::size_t vector_pairs = 500;
    double c = 2.0 / 3.0;

    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

// Specials from the config; duplicates are dropped and reported in warnings.
QuestionSet resolve_specials(const RunConfig& cfg, std::vector<std::string>& warnings);
Strategy resolve_strategy(const RunConfig& cfg);

nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const RelationReport& r, double epsilon);
nlohmann::json to_json(const IsometryResult& r);
nlohmann::json to_json(const PrepReport& r);

struct CommandResult {
    int exit_code = 0;
    nlohmann::json report;
};

CommandResult cmd_gen_questions(const RunConfig& cfg);
CommandResult cmd_audit(const RunConfig& cfg);
CommandResult cmd_selftest(const RunConfig& cfg);
CommandResult cmd_prepare(const RunConfig& cfg);
CommandResult cmd_oracle(const RunConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace bellforge

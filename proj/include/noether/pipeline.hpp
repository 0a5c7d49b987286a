#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "noether/noether2.hpp"
#include "noether/problem.hpp"
#include "noether/verifier.hpp"

namespace noether {

enum class PipelineStage { Euler, Relations, Claw, Verify };

struct PipelineOptions {
    ZeroTestOptions zt;
    PipelineStage stage = PipelineStage::Verify;
    // when set, every computed Euler expression, relation, residual and flux
    // must be covered by an expect block
    bool expect_strict = false;
};

// Verdict rendered for the result document: plain data, loss-free through
// JSON serialization.
struct VerdictInfo {
    std::string status;
    int trials = 0;
    double max_residual = 0;
    std::string counterexample_json;  // empty when absent
    std::string residual_value;

    bool ok() const { return status == "ProvedZero" || status == "ProbablyZero"; }
};

VerdictInfo verdict_info(const Verdict& v);

struct RelationResult {
    int index = 0;
    std::string expression;
    VerdictInfo verdict;
};

struct ExpectResult {
    std::string target;
    bool matched = false;
    std::string expected;
    std::string computed;
};

struct ResultDocument {
    std::string name;
    std::string kind;
    std::vector<std::string> axes;
    std::vector<std::string> deps;
    std::vector<std::string> arbitrary;
    std::uint64_t seed = 0;
    int trials = 0;
    double tol = 0;

    std::vector<std::pair<std::string, std::string>> euler;  // dep -> expression
    bool has_gauge = false;
    std::string action_variation;
    VerdictInfo gauge_verdict;
    std::vector<std::pair<std::string, VerdictInfo>> divergence_checks;
    std::vector<RelationResult> relations;
    std::vector<RelationResult> residuals;
    bool has_claw = false;
    std::vector<std::pair<std::string, std::string>> fluxes;  // axis -> expression
    std::string claw_divergence;
    bool has_potential_link = false;
    std::string potential_product;
    bool potential_holds = false;
    std::vector<ExpectResult> expects;
    std::vector<std::string> notes;

    bool verdicts_ok = true;
    bool golden_ok = true;
    bool ok() const { return verdicts_ok && golden_ok; }

    std::string to_text() const;
    std::string to_json() const;  // seed-deterministic, byte-identical output
    static ResultDocument from_json(const std::string& text);
};

ResultDocument run_pipeline(const ProblemFile& p, const PipelineOptions& opts = {});

// Throws GoldenMismatch naming the first differing expression.
void require_golden(const ResultDocument& doc);

}  // namespace noether

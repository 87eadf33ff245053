#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crnforge::verify {

struct CriterionResult {
    int id = 0;
    std::string key;
    std::string title;
    bool pass = false;
    std::string detail;
};

// Keys in criterion order: classification_table, canonical_round_trip, ...
const std::vector<std::string>& criterion_keys();

CriterionResult run_criterion(const std::string& key, std::uint64_t seed);

// suite: "all", one key, a criterion number, or a comma-separated list of those.
std::vector<CriterionResult> run_suite(const std::string& suite, std::uint64_t seed);

// "PASS [3] flow_invariance: ..." one line per result.
std::string format_line(const CriterionResult& r);

}  // namespace crnforge::verify

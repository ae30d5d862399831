#pragma once

#include <string>

#include "padmm/config.hpp"

namespace padmm {

constexpr int kReportSchemaVersion = 1;

struct ExperimentResult {
    std::string text;   // human-readable report
    std::string jsonl;  // schema header line, then one record per line
    // A certified statement failed on an instance (recorded in the report).
    bool internal_failure = false;
};

/// Output depends only on the config: thread count changes scheduling, never
/// the bytes written.
ExperimentResult run_experiment(const ExperimentConfig& c, int threads = 1);

}  // namespace padmm

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>

#include "asian/estimate.hpp"
#include "asian_cli/config.hpp"

#include "json.hpp"

namespace asian::cli {

struct RunRecord {
  RunConfig config;
  PriceEstimate estimate;
  std::int64_t runtime_ns = 0;
};

/// Dispatches to the pricer named by the config. Module errors propagate.
RunRecord run(const RunConfig& config);

nlohmann::json to_json(const RunRecord& record);
nlohmann::json error_json(const std::exception& error);

/// method,n,k_or_N,sigma,price,error_bound,runtime_ns,seed
std::string csv_header();
std::string csv_row(const RunRecord& record);

/// Runs every cell in order and returns the CSV table (header first).
std::string bench_compare(std::span<const RunConfig> cells);

enum ExitCode : int { kOk = 0, kConfigError = 2, kPreconditionError = 3, kInvariantError = 4 };

/// Exit status for an exception escaping a run.
int exit_code_for(const std::exception& error) noexcept;

}  // namespace asian::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "asian/estimate.hpp"
#include "asian/monte_carlo.hpp"
#include "asian/tree_model.hpp"

namespace asian::cli {

enum class MethodName { Exact, Mc, Btt, RecBtt, Basket };
enum class OutputFormat { JsonLines, Csv };

std::string_view to_string(MethodName method) noexcept;

/// One pricing run. Market keys at the top level apply to every stock;
/// each `[stock]` block adds a stock and may override them.
struct RunConfig {
  MethodName method = MethodName::Exact;
  std::vector<MarketParams> stocks;
  double strike = 0.0;
  AccuracySpec accuracy;
  std::optional<std::uint64_t> seed;
  std::int64_t k = 64;
  std::int64_t k0 = 16;
  int R = 3;
  BaseSolver base_solver = BaseSolver::Exact;
  unsigned threads = 1;
  OutputFormat format = OutputFormat::JsonLines;
};

/// Flat `key = value` text, one key per line, `#` starts a comment.
/// Throws PricingError(ConfigError) on anything malformed.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// A grid is a config whose top-level keys are defaults for each `[cell]`
/// block. `[stock]` blocks belong to the enclosing cell. No cells means an
/// empty grid.
std::vector<RunConfig> parse_grid(std::istream& in);
std::vector<RunConfig> load_grid(const std::filesystem::path& path);

}  // namespace asian::cli

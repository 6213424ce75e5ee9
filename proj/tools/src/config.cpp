#include "asian_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "asian/error.hpp"

namespace asian::cli {
namespace {

struct Entry {
  std::string value;
  int line = 0;
};
using Keys = std::map<std::string, Entry, std::less<>>;

struct Block {
  Keys keys;
  std::vector<Keys> stocks;
};

const std::set<std::string, std::less<>> kMarketKeys = {"s0", "sigma", "u", "r", "n"};
const std::set<std::string, std::less<>> kRunKeys = {"method", "strike", "epsilon", "delta", "seed", "k",
                                                     "k0",     "R",      "base_solver", "threads", "format"};

[[noreturn]] void config_fail(int line, const std::string& message) {
  fail(ErrorCode::ConfigError, line > 0 ? "line " + std::to_string(line) + ": " + message : message);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const Entry& e, std::string_view key) {
  T out{};
  const char* begin = e.value.data();
  const char* end = begin + e.value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) config_fail(e.line, "bad value '" + e.value + "' for " + std::string(key));
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) config_fail(e.line, std::string(key) + " must be finite");
  }
  return out;
}

const Entry* find(const Keys& keys, std::string_view key) {
  const auto it = keys.find(key);
  return it == keys.end() ? nullptr : &it->second;
}

MethodName parse_method(const Entry& e) {
  if (e.value == "exact") return MethodName::Exact;
  if (e.value == "mc") return MethodName::Mc;
  if (e.value == "btt") return MethodName::Btt;
  if (e.value == "recbtt") return MethodName::RecBtt;
  if (e.value == "basket") return MethodName::Basket;
  config_fail(e.line, "unknown method '" + e.value + "'");
}

BaseSolver parse_base_solver(const Entry& e) {
  if (e.value == "exact") return BaseSolver::Exact;
  if (e.value == "btt") return BaseSolver::BTT;
  if (e.value == "mc") return BaseSolver::StrongMC;
  config_fail(e.line, "unknown base_solver '" + e.value + "'");
}

OutputFormat parse_format(const Entry& e) {
  if (e.value == "json-lines") return OutputFormat::JsonLines;
  if (e.value == "csv") return OutputFormat::Csv;
  config_fail(e.line, "unknown format '" + e.value + "'");
}

MarketParams build_stock(const Keys& keys) {
  MarketParams p;
  const Entry* n = find(keys, "n");
  if (n == nullptr) config_fail(0, "missing key n");
  p.n = parse_number<int>(*n, "n");
  if (const Entry* e = find(keys, "s0")) p.s0 = parse_number<double>(*e, "s0");
  if (const Entry* e = find(keys, "r")) p.r = parse_number<double>(*e, "r");
  const Entry* sigma = find(keys, "sigma");
  const Entry* u = find(keys, "u");
  if (sigma != nullptr && u != nullptr) config_fail(u->line, "give either sigma or u, not both");
  if (sigma != nullptr) {
    p.sigma = parse_number<double>(*sigma, "sigma");
  } else if (u != nullptr) {
    const double up = parse_number<double>(*u, "u");
    if (!(up > 1.0)) config_fail(u->line, "u must exceed 1");
    if (p.n < 1) config_fail(n->line, "n must be at least 1");
    p.sigma = std::log(up) * std::sqrt(static_cast<double>(p.n));
  } else {
    config_fail(0, "missing key sigma");
  }
  return p;
}

RunConfig build(const Keys& keys, const std::vector<Keys>& stock_blocks) {
  RunConfig c;
  const Entry* method = find(keys, "method");
  if (method == nullptr) config_fail(0, "missing key method");
  c.method = parse_method(*method);
  const Entry* strike = find(keys, "strike");
  if (strike == nullptr) config_fail(0, "missing key strike");
  c.strike = parse_number<double>(*strike, "strike");
  if (const Entry* e = find(keys, "epsilon")) c.accuracy.epsilon = parse_number<double>(*e, "epsilon");
  if (const Entry* e = find(keys, "delta")) c.accuracy.delta = parse_number<double>(*e, "delta");
  if (const Entry* e = find(keys, "seed")) c.seed = parse_number<std::uint64_t>(*e, "seed");
  if (const Entry* e = find(keys, "k")) c.k = parse_number<std::int64_t>(*e, "k");
  if (const Entry* e = find(keys, "k0")) c.k0 = parse_number<std::int64_t>(*e, "k0");
  if (const Entry* e = find(keys, "R")) c.R = parse_number<int>(*e, "R");
  if (const Entry* e = find(keys, "base_solver")) c.base_solver = parse_base_solver(*e);
  if (const Entry* e = find(keys, "threads")) c.threads = parse_number<unsigned>(*e, "threads");
  if (const Entry* e = find(keys, "format")) c.format = parse_format(*e);

  if (stock_blocks.empty()) {
    c.stocks.push_back(build_stock(keys));
  } else {
    for (const Keys& block : stock_blocks) {
      Keys merged = block;
      for (const auto& [key, entry] : keys) {
        if (kMarketKeys.contains(key)) merged.emplace(key, entry);
      }
      // A stock that gives sigma should not inherit a top-level u, and vice versa.
      if (block.contains("sigma")) merged.erase("u");
      if (block.contains("u")) merged.erase("sigma");
      c.stocks.push_back(build_stock(merged));
    }
  }

  if (c.method == MethodName::Mc && !c.seed) config_fail(0, "method mc requires an explicit seed");
  if ((c.method == MethodName::Btt || c.method == MethodName::RecBtt) && c.stocks.size() != 1) {
    config_fail(0, "method " + std::string(to_string(c.method)) + " prices a single stock");
  }
  return c;
}

enum class Section { Top, Stock, Cell };

/// Splits the text into a top block plus the `[cell]` blocks.
std::pair<Block, std::vector<Block>> tokenize(std::istream& in, bool allow_cells) {
  Block top;
  std::vector<Block> cells;
  Section section = Section::Top;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    Block& owner = section == Section::Cell || (section == Section::Stock && !cells.empty()) ? cells.back() : top;
    if (text.front() == '[') {
      if (text == "[stock]") {
        owner.stocks.emplace_back();
        section = Section::Stock;
      } else if (text == "[cell]" && allow_cells) {
        cells.emplace_back();
        section = Section::Cell;
      } else {
        config_fail(line, "unknown section " + std::string(text));
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) config_fail(line, "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty() || value.empty()) config_fail(line, "expected key = value");
    const bool market = kMarketKeys.contains(key);
    if (!market && !kRunKeys.contains(key)) config_fail(line, "unknown key '" + key + "'");
    if (section == Section::Stock && !market) config_fail(line, "key '" + key + "' is not allowed in [stock]");
    Keys& target = section == Section::Stock ? owner.stocks.back() : owner.keys;
    if (!target.emplace(key, Entry{value, line}).second) config_fail(line, "duplicate key '" + key + "'");
  }
  return {std::move(top), std::move(cells)};
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot open " + path.string());
  return in;
}

}  // namespace

std::string_view to_string(MethodName method) noexcept {
  switch (method) {
    case MethodName::Exact: return "exact";
    case MethodName::Mc: return "mc";
    case MethodName::Btt: return "btt";
    case MethodName::RecBtt: return "recbtt";
    case MethodName::Basket: return "basket";
  }
  return "unknown";
}

RunConfig parse_config(std::istream& in) {
  auto [top, cells] = tokenize(in, false);
  return build(top.keys, top.stocks);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in = open(path);
  return parse_config(in);
}

std::vector<RunConfig> parse_grid(std::istream& in) {
  auto [top, cells] = tokenize(in, true);
  std::vector<RunConfig> out;
  out.reserve(cells.size());
  for (const Block& cell : cells) {
    Keys keys = cell.keys;
    for (const auto& [key, entry] : top.keys) {
      // Cell-level sigma and u replace each other's defaults.
      if ((key == "u" && keys.contains("sigma")) || (key == "sigma" && keys.contains("u"))) continue;
      keys.emplace(key, entry);
    }
    out.push_back(build(keys, cell.stocks.empty() ? top.stocks : cell.stocks));
  }
  return out;
}

std::vector<RunConfig> load_grid(const std::filesystem::path& path) {
  std::ifstream in = open(path);
  return parse_grid(in);
}

}  // namespace asian::cli

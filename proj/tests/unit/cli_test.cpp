#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "asian_cli/config.hpp"
#include "asian_cli/run.hpp"
#include "expect_error.hpp"

using namespace asian;
using namespace asian::cli;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::vector<RunConfig> grid(const std::string& text) {
  std::istringstream in(text);
  return parse_grid(in);
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "asian_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

int run_exe(const std::string& args, const std::filesystem::path& out) {
  const std::string cmd = std::string(ASIANPRICE_EXE) + " " + args + " > " + out.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ParseConfig, SingleStock) {
  const RunConfig c = parse(
      "# comment line\n"
      "method = btt   # trailing comment\n"
      "s0 = 90\n sigma=0.25\nr = 0.001\nn = 12\nstrike = 95\nk = 128\n");
  EXPECT_EQ(c.method, MethodName::Btt);
  ASSERT_EQ(c.stocks.size(), 1u);
  EXPECT_EQ(c.stocks[0].s0, 90.0);
  EXPECT_EQ(c.stocks[0].sigma, 0.25);
  EXPECT_EQ(c.stocks[0].r, 0.001);
  EXPECT_EQ(c.stocks[0].n, 12);
  EXPECT_EQ(c.strike, 95.0);
  EXPECT_EQ(c.k, 128);
  EXPECT_FALSE(c.seed.has_value());
}

TEST(ParseConfig, StockBlocksInheritTopLevel) {
  const RunConfig c = parse("method = basket\nn = 8\nr = 0.0\nstrike = 200\nk0 = 64\n[stock]\ns0 = 100\nsigma = 0.2\n[stock]\ns0 = 80\nsigma = 0.4\n");
  ASSERT_EQ(c.stocks.size(), 2u);
  EXPECT_EQ(c.stocks[1].s0, 80.0);
  EXPECT_EQ(c.stocks[1].n, 8);
  EXPECT_EQ(c.k0, 64);
}

TEST(ParseConfig, UptickKey) {
  const RunConfig c = parse("method = exact\nn = 1\nu = 2\nstrike = 120\n");
  EXPECT_NEAR(c.stocks[0].sigma, std::log(2.0), 1e-15);
}

TEST(ParseConfig, Errors) {
  EXPECT_PRICING_ERROR(parse("method = mc\nn = 4\nsigma = 0.2\nstrike = 1\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn = 4\nsigma = 0.2\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = magic\nn = 4\nsigma = 0.2\nstrike = 1\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn = four\nsigma = 0.2\nstrike = 1\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn = 4\nsigma = 0.2\nstrike = 1\nbogus = 3\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn = 4\nn = 5\nsigma = 0.2\nstrike = 1\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn 4\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn = 4\nsigma = 0.2\nstrike = 1\n[cell]\n"), ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nstrike = 1\nn = 4\n[stock]\nsigma = 0.2\n[stock]\nsigma = 0.3\n"),
                       ErrorCode::ConfigError);
  EXPECT_PRICING_ERROR(parse("method = btt\nn = 4\nsigma = 0.2\nstrike = 1\n[stock]\nk = 3\n"), ErrorCode::ConfigError);
}

TEST(Run, TwoPathExample) {
  const RunRecord r = run(parse("method = exact\nn = 1\nu = 2\ns0 = 100\nstrike = 120\n"));
  EXPECT_NEAR(r.estimate.price, 10.0, 1e-12);
  EXPECT_GE(r.runtime_ns, 0);
}

TEST(Run, BttZeroStrike) {
  const RunRecord r = run(parse("method = btt\nn = 8\nsigma = 0.3\nstrike = 0\n"));
  EXPECT_NEAR(r.estimate.price, 100.0, 1e-12);
  EXPECT_EQ(r.estimate.error_value, 0.0);
}

TEST(Run, JsonRoundTrip) {
  for (const char* text : {"method = exact\nn = 6\nsigma = 0.3\nstrike = 100\n",
                           "method = mc\nn = 6\nsigma = 0.3\nstrike = 100\nseed = 4\n",
                           "method = btt\nn = 6\nsigma = 0.3\nstrike = 100\n",
                           "method = recbtt\nn = 16\nsigma = 0.3\nstrike = 100\nk0 = 32\n",
                           "method = basket\nn = 6\nstrike = 200\n[stock]\nsigma = 0.3\n[stock]\nsigma = 0.2\n"}) {
    const RunRecord r = run(parse(text));
    const std::string line = to_json(r).dump();
    const nlohmann::json back = nlohmann::json::parse(line);
    EXPECT_EQ(back.at("method"), std::string(to_string(r.config.method)));
    EXPECT_EQ(back.at("price").get<double>(), r.estimate.price);
    EXPECT_EQ(back.at("error_value").get<double>(), r.estimate.error_value);
    EXPECT_EQ(back.at("error_kind"), std::string(to_string(r.estimate.error_kind)));
    EXPECT_EQ(back.at("confidence").get<double>(), r.estimate.confidence);
    EXPECT_TRUE(back.at("diagnostics").is_object());
    EXPECT_TRUE(back.at("inputs").at("stocks").is_array());
    EXPECT_EQ(back.at("runtime_ns").get<std::int64_t>(), r.runtime_ns);
    EXPECT_EQ(line.find('\n'), std::string::npos);
  }
}

TEST(Run, DeterministicExceptRuntime) {
  const RunConfig c = parse("method = mc\nn = 10\nsigma = 0.3\nstrike = 100\nseed = 11\nthreads = 4\n");
  nlohmann::json a = to_json(run(c));
  nlohmann::json b = to_json(run(c));
  a.erase("runtime_ns");
  b.erase("runtime_ns");
  EXPECT_EQ(a, b);
}

TEST(Run, ModuleErrorsSurface) {
  try {
    run(parse("method = btt\nn = 4\nsigma = 0\nstrike = 100\n"));
    FAIL() << "expected DegenerateVolatility";
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), kPreconditionError);
    EXPECT_EQ(error_json(e).at("error"), "DegenerateVolatility");
  }
  const PricingError config(ErrorCode::ConfigError, "x");
  const PricingError invariant(ErrorCode::InvariantViolation, "x");
  EXPECT_EQ(exit_code_for(config), kConfigError);
  EXPECT_EQ(exit_code_for(invariant), kInvariantError);
}

TEST(BenchCompare, EmptyAndSingleCell) {
  EXPECT_EQ(bench_compare(grid("n = 8\nsigma = 0.2\n")), csv_header() + "\n");
  const auto one = grid("n = 8\nsigma = 0.2\nstrike = 100\n[cell]\nmethod = btt\nk = 32\n");
  ASSERT_EQ(one.size(), 1u);
  const std::string table = bench_compare(one);
  std::istringstream lines(table);
  std::string header;
  std::string row;
  std::string extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_EQ(header, "method,n,k_or_N,sigma,price,error_bound,runtime_ns,seed");
  EXPECT_EQ(row.rfind("btt,8,32,0.2,", 0), 0u) << row;
}

TEST(BenchCompare, CellsOverrideDefaultsInOrder) {
  const auto cells = grid(
      "n = 16\nsigma = 0.3\nstrike = 100\n"
      "[cell]\nmethod = btt\nk = 64\n"
      "[cell]\nmethod = recbtt\nk0 = 16\n"
      "[cell]\nmethod = mc\nseed = 5\nsigma = 0.1\n");
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_EQ(cells[0].method, MethodName::Btt);
  EXPECT_EQ(cells[1].k0, 16);
  EXPECT_EQ(cells[2].stocks[0].sigma, 0.1);
  EXPECT_EQ(cells[0].stocks[0].sigma, 0.3);
  const std::string table = bench_compare(cells);
  EXPECT_NE(table.find("\nrecbtt,16,16,"), std::string::npos);
  EXPECT_NE(table.find(",5\n"), std::string::npos);
}

TEST(Executable, PriceAndExitCodes) {
  const auto good = scratch("good.cfg");
  std::ofstream(good) << "method = exact\nn = 1\nu = 2\ns0 = 100\nstrike = 120\n";
  const auto out = scratch("out.txt");
  ASSERT_EQ(run_exe("price --config " + good.string(), out), 0);
  const nlohmann::json record = nlohmann::json::parse(slurp(out));
  EXPECT_NEAR(record.at("price").get<double>(), 10.0, 1e-12);

  ASSERT_EQ(run_exe("price --config " + good.string() + " --format csv", out), 0);
  EXPECT_EQ(slurp(out).rfind(csv_header() + "\nexact,1,2,", 0), 0u);

  const auto no_seed = scratch("noseed.cfg");
  std::ofstream(no_seed) << "method = mc\nn = 4\nsigma = 0.2\nstrike = 100\n";
  EXPECT_EQ(run_exe("price --config " + no_seed.string(), out), 2);
  EXPECT_EQ(nlohmann::json::parse(slurp(out)).at("error"), "ConfigError");

  EXPECT_EQ(run_exe("price --config " + scratch("missing.cfg").string(), out), 2);

  const auto vacuous = scratch("vacuous.cfg");
  std::ofstream(vacuous) << "method = mc\nn = 4\nsigma = 3\nstrike = 100\nseed = 1\n";
  EXPECT_EQ(run_exe("price --config " + vacuous.string(), out), 3);
  EXPECT_EQ(nlohmann::json::parse(slurp(out)).at("error"), "VarianceBoundVacuous");

  const auto bad_r = scratch("badr.cfg");
  std::ofstream(bad_r) << "method = recbtt\nn = 16\nsigma = 0.3\nstrike = 100\nR = 2\n";
  EXPECT_EQ(run_exe("price --config " + bad_r.string(), out), 3);
}

TEST(Executable, Bench) {
  const auto g = scratch("grid.txt");
  std::ofstream(g) << "n = 10\nsigma = 0.2\nstrike = 100\n[cell]\nmethod = btt\nk = 16\n[cell]\nmethod = exact\n";
  const auto csv = scratch("bench.csv");
  const auto out = scratch("bench_out.txt");
  ASSERT_EQ(run_exe("bench --grid " + g.string() + " --out " + csv.string(), out), 0);
  const std::string table = slurp(csv);
  EXPECT_EQ(table.rfind(csv_header() + "\nbtt,10,16,", 0), 0u);
  EXPECT_NE(table.find("\nexact,10,1024,"), std::string::npos);
  EXPECT_EQ(run_exe("bench --grid " + g.string(), out), 2);
}

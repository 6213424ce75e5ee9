#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "asian/error.hpp"
#include "asian_cli/config.hpp"
#include "asian_cli/run.hpp"

namespace {

using namespace asian::cli;

int price_command(const std::string& config_path, const std::string& format_flag) {
  OutputFormat format = OutputFormat::JsonLines;
  try {
    const RunConfig config = load_config(config_path);
    format = format_flag.empty() ? config.format : (format_flag == "csv" ? OutputFormat::Csv : OutputFormat::JsonLines);
    const RunRecord record = run(config);
    if (format == OutputFormat::Csv) {
      std::cout << csv_header() << '\n' << csv_row(record) << '\n';
    } else {
      std::cout << to_json(record).dump() << '\n';
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << error_json(e).dump() << '\n';
    return exit_code_for(e);
  }
}

int bench_command(const std::string& grid_path, const std::string& out_path) {
  try {
    const std::vector<RunConfig> cells = load_grid(grid_path);
    const std::string table = bench_compare(cells);
    std::ofstream out(out_path);
    if (!out) asian::fail(asian::ErrorCode::ConfigError, "cannot write " + out_path);
    out << table;
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << error_json(e).dump() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asian option pricing on binomial trees"};
  app.require_subcommand(1);

  std::string config_path;
  std::string format;
  CLI::App* price = app.add_subcommand("price", "Price one configured option");
  price->add_option("--config", config_path, "key = value config file")->required();
  price->add_option("--format", format, "json-lines or csv")->check(CLI::IsMember({"json-lines", "csv"}));

  std::string grid_path;
  std::string out_path;
  CLI::App* bench = app.add_subcommand("bench", "Run a grid of cells into a CSV table");
  bench->add_option("--grid", grid_path, "grid file with [cell] blocks")->required();
  bench->add_option("--out", out_path, "CSV output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : kConfigError;
  }
  if (price->parsed()) return price_command(config_path, format);
  return bench_command(grid_path, out_path);
}

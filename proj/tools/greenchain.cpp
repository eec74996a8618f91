// greenchain: border prices and consumer supply costs for imported hydrogen carriers.

#include <iostream>

#include <CLI11.hpp>

#include "greenchain/runner.hpp"

namespace gc = greenchain;

int main(int argc, char** argv) {
  CLI::App app{"Hydrogen and ammonia import cost model"};
  app.set_version_flag("--version", std::string(gc::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = gc::default_jobs();
  app.add_option("-j,--jobs", jobs, "Worker threads (default GREENCHAIN_JOBS or all cores)")
      ->check(CLI::PositiveNumber);

  std::string dir;
  std::string out = "out";

  auto* validate = app.add_subcommand("validate", "Check a scenario directory");
  validate->add_option("dir", dir, "Scenario directory")->required();

  std::vector<int> years;
  double demand_twh = 0.0;
  auto* wtb = app.add_subcommand("wtb", "Border prices and supply curves");
  wtb->add_option("dir", dir, "Scenario directory")->required();
  wtb->add_option("--year", years, "Year(s); default every scenario year");
  auto* demand_opt = wtb->add_option("--demand-twh", demand_twh, "Demand per commodity, TWh")
                         ->check(CLI::NonNegativeNumber);
  wtb->add_option("--out", out, "Output directory");

  int year = 2030;
  std::string prices;
  auto* btc = app.add_subcommand("btc", "Supply costs at the scenario's consumer sites");
  btc->add_option("dir", dir, "Scenario directory")->required();
  btc->add_option("--year", year, "Year")->required();
  auto* btc_prices = btc->add_option("--prices", prices, "prices.json from wtb");
  btc->add_flag("--inline-wtb", "Recompute border prices instead of reading --prices");
  btc->add_option("--out", out, "Output directory");

  std::string product = "hydrogen";
  auto* sweep = app.add_subcommand("sweep", "Generic demand x distance grid");
  sweep->add_option("dir", dir, "Scenario directory")->required();
  sweep->add_option("--year", year, "Year")->required();
  sweep->add_option("--product", product, "ammonia or hydrogen")
      ->required()
      ->check(CLI::IsMember({"ammonia", "hydrogen"}));
  auto* sweep_prices = sweep->add_option("--prices", prices, "prices.json from wtb");
  sweep->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : gc::kExitModel;
  }

  if (validate->parsed()) return gc::cmd_validate(dir, std::cout, std::cerr);
  if (wtb->parsed()) {
    gc::WtbArgs a{dir, years, std::nullopt, out, jobs};
    if (*demand_opt) a.demand_twh = demand_twh;
    return gc::cmd_wtb(a, std::cout, std::cerr);
  }
  if (btc->parsed()) {
    if (!*btc_prices && btc->count("--inline-wtb") == 0) {
      std::cerr << "error: btc needs --prices or --inline-wtb\n";
      return gc::kExitModel;
    }
    gc::BtcArgs a{dir, year, std::nullopt, out, jobs};
    if (*btc_prices) a.prices = prices;
    return gc::cmd_btc(a, std::cout, std::cerr);
  }
  gc::SweepArgs a{dir, year, gc::parse_product(product), std::nullopt, out, jobs};
  if (*sweep_prices) a.prices = prices;
  return gc::cmd_sweep(a, std::cout, std::cerr);
}

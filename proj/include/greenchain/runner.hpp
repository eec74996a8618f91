#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenchain/border_to_consumer.hpp"
#include "greenchain/parallel.hpp"
#include "greenchain/reports.hpp"
#include "greenchain/scenario_io.hpp"
#include "greenchain/well_to_border.hpp"

#ifndef GREENCHAIN_VERSION
#define GREENCHAIN_VERSION "1.0.0"
#endif

namespace greenchain {

inline constexpr std::string_view kToolVersion = GREENCHAIN_VERSION;

enum ExitCode : int { kExitOk = 0, kExitModel = 1, kExitIo = 2 };

/// Annual demand levels of the generic sweep, GWh.
inline const std::vector<double> kSweepDemandsGwh{10, 20, 40, 100, 200, 400, 1000, 2000, 4000, 10000};
inline const std::vector<double> kSweepDistancesKm{5, 100, 200, 300, 400, 500, 600, 700, 800, 900};

inline const char* kLadderNote =
    "demand ladder 10,20,40,100,200,400,1000,2000,4000,10000 GWh is an assumed logarithmic interpolation "
    "between the published 10 and 10000 GWh endpoints";

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline RunManifest make_manifest(const std::string& command, const Scenario& s,
                                 std::vector<std::pair<std::string, std::string>> flags) {
  RunManifest m;
  m.command = command;
  m.scenario_hash = scenario_hash(s);
  m.tool_version = std::string(kToolVersion);
  m.timestamp = utc_timestamp();
  m.flags = std::move(flags);
  return m;
}

inline void write_manifest(const RunManifest& m, const std::filesystem::path& out) {
  csv::write_file(out / "manifest.json", m.to_json().dump(2) + "\n");
}

struct CommodityMarket {
  SupplyCurve curve;
  BorderPrice price;
  PriceDecomposition decomposition;
  std::vector<std::string> skipped_sites;
};

struct YearMarkets {
  int year = 0;
  std::map<Commodity, CommodityMarket> markets;

  BorderPriceSet prices() const {
    BorderPriceSet p;
    for (const auto& [c, m] : markets) p[c] = m.price.price;
    return p;
  }
};

/// Sizes every site for each scenario commodity and prices the given demand
/// (the scenario's own demand for the year when none is passed).
inline YearMarkets compute_markets(const Scenario& s, int year, std::optional<double> demand_mwh, int jobs) {
  YearMarkets y;
  y.year = year;
  const double demand = demand_mwh ? *demand_mwh : s.demand_for(year);
  for (Commodity c : s.commodities) {
    CommodityMarket m;
    auto designs = size_sites(s, c, year, jobs, &m.skipped_sites);
    m.curve = build_supply_curve(designs);
    m.curve.commodity = c;
    m.curve.year = year;
    m.price = price_at(m.curve, demand);
    m.decomposition = decompose_price(m.curve, demand);
    y.markets.emplace(c, std::move(m));
  }
  return y;
}

inline json prices_document(const std::vector<YearMarkets>& years, const RunManifest& m) {
  json doc;
  doc["manifest"] = m.to_json();
  json list = json::array();
  for (const auto& y : years)
    for (const auto& [c, mk] : y.markets) {
      auto j = border_price_json(mk.price, mk.decomposition);
      j["skipped_sites"] = mk.skipped_sites;
      list.push_back(std::move(j));
    }
  doc["prices"] = list;
  return doc;
}

/// Border prices for one year from a prices.json written by `wtb`.
inline BorderPriceSet read_prices(const std::filesystem::path& path, const Scenario& s, int year) {
  json doc;
  try {
    doc = json::parse(csv::read_file(path));
  } catch (const json::exception& e) {
    throw SchemaViolation(path.string() + ": " + e.what());
  }
  try {
    const std::string hash = doc.at("manifest").at("scenario_hash").get<std::string>();
    if (hash != scenario_hash(s))
      throw ScenarioMismatch(path.string() + ": prices were computed for scenario " + hash + ", not " +
                             scenario_hash(s));
    BorderPriceSet out;
    for (const auto& p : doc.at("prices"))
      if (p.at("year").get<int>() == year)
        out[parse_commodity(p.at("commodity").get<std::string>())] = p.at("price_eur_per_mwh").get<double>();
    if (out.empty()) throw CrossRefError(path.string() + ": no prices for year " + std::to_string(year));
    return out;
  } catch (const json::exception& e) {
    throw SchemaViolation(path.string() + ": " + e.what());
  }
}

inline ConsumerResult cost_consumer(const ConsumerSite& c, const BorderPriceSet& prices, const Scenario& s, int year) {
  ConsumerResult r;
  r.consumer = c;
  r.year = year;
  r.options = build_options(c, prices, s, year);
  r.plan = optimize_plan(r.options, c.demand(year));
  r.plan.year = year;
  r.per_mwh = cost_breakdown(r.plan, r.options);
  return r;
}

/// Generic consumer with one import node for all commodities.
inline ConsumerSite generic_consumer(Product product, double demand_mwh, double distance_km, int year) {
  ConsumerSite c;
  c.name = "generic_" + csv::format_number(demand_mwh / 1e3) + "gwh_" + csv::format_number(distance_km) + "km";
  c.desired_product = product;
  c.demand_mwh[year] = demand_mwh;
  c.dist_truck_km = c.dist_rail_km = c.dist_gh2pipe_km = c.dist_nh3pipe_km = distance_km;
  return c;
}

/// The 10 x 10 grid, demand-major.
inline std::vector<SweepCell> run_sweep(const Scenario& s, int year, Product product, const BorderPriceSet& prices,
                                        int jobs, const std::vector<double>& demands_gwh = kSweepDemandsGwh,
                                        const std::vector<double>& distances_km = kSweepDistancesKm) {
  const std::size_t nd = distances_km.size();
  return parallel_map(jobs, demands_gwh.size() * nd, [&](std::size_t i) {
    SweepCell cell;
    cell.demand_gwh = demands_gwh[i / nd];
    cell.distance_km = distances_km[i % nd];
    auto r = cost_consumer(generic_consumer(product, cell.demand_gwh * 1e3, cell.distance_km, year), prices, s, year);
    cell.options = std::move(r.options);
    cell.plan = std::move(r.plan);
    cell.per_mwh = r.per_mwh;
    return cell;
  });
}

/// Runs `body` and maps exceptions to exit codes with a message on `err`.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitModel;
  }
}

inline int cmd_validate(const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!std::filesystem::is_directory(dir)) throw MissingFile(dir.string());
    Scenario s;
    try {
      s = parse_scenario(dir);
    } catch (const IoError&) {
      throw;
    } catch (const Error& e) {
      out << "error: " << e.what() << '\n';
      return static_cast<int>(kExitModel);
    }
    const auto findings = validate_scenario(s);
    for (const auto& f : findings) out << format_finding(f) << '\n';
    const bool bad = has_errors(findings);
    out << (bad ? "invalid" : "valid") << ": " << findings.size() << " finding(s), scenario " << scenario_hash(s)
        << '\n';
    return static_cast<int>(bad ? kExitModel : kExitOk);
  });
}

struct WtbArgs {
  std::filesystem::path dir;
  std::vector<int> years;  ///< empty means every scenario year
  std::optional<double> demand_twh;
  std::filesystem::path out;
  int jobs = 1;
};

inline int cmd_wtb(const WtbArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(a.dir);
    const auto years = a.years.empty() ? s.years : a.years;
    std::vector<std::pair<std::string, std::string>> flags{{"jobs", std::to_string(a.jobs)}};
    std::string ys;
    for (int y : years) ys += (ys.empty() ? "" : ",") + std::to_string(y);
    flags.emplace_back("years", ys);
    if (a.demand_twh) flags.emplace_back("demand_twh", csv::format_number(*a.demand_twh));
    auto m = make_manifest("wtb", s, flags);
    m.notes.push_back(
        "NH3 domestic pipeline throughput is scenario data; the bundled set scales the GH2 value by the "
        "NH3/GH2 volumetric energy ratio");
    std::vector<YearMarkets> results;
    for (int y : years) {
      const std::optional<double> d = a.demand_twh ? std::optional<double>(*a.demand_twh * 1e6) : std::nullopt;
      results.push_back(compute_markets(s, y, d, a.jobs));
    }
    for (const auto& y : results)
      for (const auto& [c, mk] : y.markets) {
        supply_curve_csv(mk.curve, s.constants.curve_extent_mwh, m)
            .save(a.out / ("supply_curve_" + std::string(to_string(c)) + "_" + std::to_string(y.year) + ".csv"));
        out << y.year << ' ' << to_string(c) << ": " << csv::format_number(mk.price.price) << " EUR/MWh (margin "
            << to_string(mk.price.marginal_site) << ")\n";
      }
    csv::write_file(a.out / "prices.json", prices_document(results, m).dump(2) + "\n");
    write_manifest(m, a.out);
    return static_cast<int>(kExitOk);
  });
}

struct BtcArgs {
  std::filesystem::path dir;
  int year = 2030;
  std::optional<std::filesystem::path> prices;  ///< absent: recompute border prices
  std::filesystem::path out;
  int jobs = 1;
};

inline BorderPriceSet prices_for(const Scenario& s, int year, const std::optional<std::filesystem::path>& path,
                                 int jobs) {
  if (path) return read_prices(*path, s, year);
  return compute_markets(s, year, std::nullopt, jobs).prices();
}

inline int cmd_btc(const BtcArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(a.dir);
    std::vector<std::pair<std::string, std::string>> flags{{"year", std::to_string(a.year)},
                                                           {"jobs", std::to_string(a.jobs)}};
    flags.emplace_back("prices", a.prices ? a.prices->string() : "inline");
    auto m = make_manifest("btc", s, flags);
    const auto prices = prices_for(s, a.year, a.prices, a.jobs);
    auto rows = parallel_map(a.jobs, s.consumers.size(),
                             [&](std::size_t i) { return cost_consumer(s.consumers[i], prices, s, a.year); });
    consumer_costs_csv(rows, m).save(a.out / "consumer_costs.csv");
    write_manifest(m, a.out);
    out << rows.size() << " consumer(s) costed for " << a.year << '\n';
    return static_cast<int>(kExitOk);
  });
}

struct SweepArgs {
  std::filesystem::path dir;
  int year = 2030;
  Product product = Product::Hydrogen;
  std::optional<std::filesystem::path> prices;
  std::filesystem::path out;
  int jobs = 1;
};

inline int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(a.dir);
    std::vector<std::pair<std::string, std::string>> flags{{"year", std::to_string(a.year)},
                                                           {"product", std::string(to_string(a.product))},
                                                           {"jobs", std::to_string(a.jobs)}};
    flags.emplace_back("prices", a.prices ? a.prices->string() : "inline");
    auto m = make_manifest("sweep", s, flags);
    m.notes.push_back(kLadderNote);
    const auto prices = prices_for(s, a.year, a.prices, a.jobs);
    const auto cells = run_sweep(s, a.year, a.product, prices, a.jobs);
    auto modes = modes_csv(cells, a.product, a.year, m);
    modes.add_comment(kLadderNote);
    modes.save(a.out / "modes.csv");
    heatmap_csv(cells, kSweepDemandsGwh, kSweepDistancesKm, m).save(a.out / "heatmap.csv");
    write_manifest(m, a.out);
    out << cells.size() << " cells swept for " << to_string(a.product) << ' ' << a.year << '\n';
    return static_cast<int>(kExitOk);
  });
}

}  // namespace greenchain

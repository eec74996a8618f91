#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "greenchain/config.hpp"
#include "greenchain/csv.hpp"
#include "greenchain/scenario.hpp"

namespace greenchain {

namespace fs = std::filesystem;

namespace detail {

inline const std::vector<std::string> kTechColumns{"technology", "year", "capex_eur_per_kw", "opex_frac",
                                                   "lifetime_y", "efficiency", "power_demand"};
inline const std::vector<std::string> kStorageColumns{"kind", "year", "capex_eur_per_mwh", "opex_frac",
                                                      "efficiency", "lifetime_y", "e2p_hours", "tank_eur_per_mwh"};
inline const std::vector<std::string> kCountryColumns{"country", "wacc", "capex_index"};
inline const std::vector<std::string> kPotentialColumns{"country", "tech", "class", "band", "potential_mw"};
inline const std::vector<std::string> kProfileColumns{"hour", "cf", "weight"};
inline const std::vector<std::string> kShipColumns{
    "commodity",   "capex_eur",        "opex_frac",        "lifetime_y",  "operating_eur_per_h",
    "available_h", "velocity_kmh",     "fuel_mwh_per_km",  "fuel_eur_per_mwh", "payload_mwh",
    "load_time_h", "flash_loss",       "boiloff_per_h"};
inline const std::vector<std::string> kPipelineColumns{
    "scope", "capex_eur_per_km", "opex_frac", "lifetime_y", "capacity_factor", "throughput_mwh",
    "electricity_mwh_per_mwh_km", "electricity_eur_per_mwh", "loss_per_100km"};
inline const std::vector<std::string> kLandsideColumns{
    "mode", "commodity", "year", "trailer_capex_eur", "trailer_lifetime_y", "tractor_capex_eur",
    "tractor_lifetime_y", "payload_mwh", "speed_kmh", "load_time_h", "driver_eur_per_h", "fuel_mwh_per_km",
    "fuel_eur_per_mwh", "freight_eur_per_km", "throughput_loss", "throughput_boiloff", "boiloff_per_day",
    "wagons_per_train", "operating_hours"};
inline const std::vector<std::string> kConsumerColumns{"name",          "product",        "dist_truck_km",
                                                       "dist_rail_km",  "dist_gh2pipe_km", "dist_nh3pipe_km"};
inline const std::vector<std::string> kDemandColumns{"year", "demand_twh"};

/// Runs a row parser and tags schema errors that lack a location.
template <class F>
void each_row(const csv::Table& t, F&& f) {
  for (const auto& row : t.rows()) {
    try {
      f(row);
    } catch (const SchemaViolation& e) {
      std::string msg = e.what();
      if (msg.rfind(t.name(), 0) == 0) throw;
      throw SchemaViolation(t.name() + ":" + std::to_string(row.line()) + ": " + msg);
    }
  }
}

/// Text for v / scale that parses back to exactly v after multiplying by scale.
inline std::string format_scaled(double v, double scale) {
  double c = v / scale;
  for (double cand : {c, std::nextafter(c, -INFINITY), std::nextafter(c, INFINITY)}) {
    auto text = csv::format_number(cand);
    if (*csv::try_parse_number(text) * scale == v) return text;
  }
  char buf[64];
  for (int prec = 15; prec <= 25; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, c);
    if (*csv::try_parse_number(buf) * scale == v) return buf;
  }
  throw NumericalFailure("cannot serialize " + csv::format_number(v) + " exactly");
}

inline std::string opt_number(const std::optional<double>& v) { return v ? csv::format_number(*v) : ""; }

}  // namespace detail

struct ScenarioFiles {
  std::string technologies = "technologies.csv";
  std::string storage = "storage.csv";
  std::string countries = "countries.csv";
  std::string potentials = "potentials.csv";
  std::string profiles = "profiles";
  std::string transport_ship = "transport_ship.csv";
  std::string transport_pipeline = "transport_pipeline.csv";
  std::string transport_landside = "transport_landside.csv";
  std::string consumers = "consumers.csv";
  std::string demand = "demand.csv";
};

/// Reads a scenario directory without checking value invariants.
inline Scenario parse_scenario(const fs::path& root) {
  using detail::each_row;
  if (!fs::is_directory(root)) throw MissingFile(root.string());
  const auto cfg = KeyValueConfig::load(root / "scenario.conf");
  Scenario s;
  ScenarioFiles files;
  s.name = cfg.text("name", root.filename().string());
  for (const auto& y : cfg.list("years")) {
    auto v = csv::try_parse_number(y);
    if (!v || *v != std::floor(*v)) throw SchemaViolation(cfg.where("years") + ": bad year '" + y + "'");
    s.years.push_back(static_cast<int>(*v));
  }
  for (const auto& c : cfg.list("commodities")) s.commodities.push_back(parse_commodity(c));

  auto& k = s.constants;
  k.desalination_eur_per_mwh = cfg.number("desalination_eur_per_mwh", k.desalination_eur_per_mwh);
  k.electricity_eur_per_mwh = cfg.number("electricity_price_eur_per_mwh", k.electricity_eur_per_mwh);
  k.importer_wacc = cfg.number("importer_wacc", k.importer_wacc);
  k.conversion_full_load_hours = cfg.number("conversion_full_load_hours", k.conversion_full_load_hours);
  k.consumer_storage_turnovers = cfg.number("consumer_storage_turnovers", k.consumer_storage_turnovers);
  auto bound = cfg.text("electrolyzer_bound", "combined");
  if (bound == "combined")
    k.electrolyzer_bound = ElectrolyzerBound::Combined;
  else if (bound == "conversion")
    k.electrolyzer_bound = ElectrolyzerBound::Conversion;
  else
    throw SchemaViolation(cfg.where("electrolyzer_bound") + ": expected 'combined' or 'conversion'");
  k.variable_motion_costs_per_mwh = cfg.flag("variable_motion_costs_per_mwh", k.variable_motion_costs_per_mwh);
  k.landside_daily_boiloff = cfg.flag("landside_daily_boiloff", k.landside_daily_boiloff);
  k.supply_curve_extensions = cfg.flag("supply_curve_extensions", k.supply_curve_extensions);
  k.curve_extent_mwh = cfg.number("curve_extent_twh", 0.0) * 1e6;

  files.technologies = cfg.text("technologies", files.technologies);
  files.storage = cfg.text("storage", files.storage);
  files.countries = cfg.text("countries", files.countries);
  files.potentials = cfg.text("potentials", files.potentials);
  files.profiles = cfg.text("profiles", files.profiles);
  files.transport_ship = cfg.text("transport_ship", files.transport_ship);
  files.transport_pipeline = cfg.text("transport_pipeline", files.transport_pipeline);
  files.transport_landside = cfg.text("transport_landside", files.transport_landside);
  files.consumers = cfg.text("consumers", files.consumers);
  files.demand = cfg.text("demand", files.demand);
  if (auto extra = cfg.unused_keys(); !extra.empty())
    throw SchemaViolation(cfg.where(extra.front()) + ": unknown key '" + extra.front() + "'");

  auto tech = csv::Table::load(root / files.technologies, detail::kTechColumns);
  each_row(tech, [&](const csv::Row& r) {
    TechCost t{r.number("capex_eur_per_kw"), r.number("opex_frac"), r.number("lifetime_y"), r.number("efficiency"),
               r.number("power_demand")};
    auto key = std::make_pair(parse_technology(r.text("technology")), r.integer("year"));
    if (!s.tech_costs.emplace(key, t).second) throw SchemaViolation(r.location("technology") + ": duplicate entry");
  });

  auto storage = csv::Table::load(root / files.storage, detail::kStorageColumns);
  each_row(storage, [&](const csv::Row& r) {
    StorageParams p;
    p.kind = parse_storage_kind(r.text("kind"));
    p.capex_eur_per_mwh = r.number("capex_eur_per_mwh");
    p.opex_frac = r.number("opex_frac");
    p.efficiency = r.number("efficiency");
    p.lifetime_years = r.number("lifetime_y");
    p.e2p_hours = r.optional_number("e2p_hours").value_or(0.0);
    p.tank_eur_per_mwh = r.optional_number("tank_eur_per_mwh").value_or(0.0);
    if (!s.storage.emplace(std::make_pair(p.kind, r.integer("year")), p).second)
      throw SchemaViolation(r.location("kind") + ": duplicate entry");
  });

  auto countries = csv::Table::load(root / files.countries, detail::kCountryColumns);
  each_row(countries, [&](const csv::Row& r) {
    CountryFinance f;
    f.country = r.text("country");
    if (f.country.empty()) throw SchemaViolation(r.location("country") + ": empty country");
    f.wacc = r.number("wacc");
    f.capex_index = r.number("capex_index");
    if (countries.has_column("ship_distance_km")) f.ship_distance_km = r.optional_number("ship_distance_km");
    if (countries.has_column("pipeline_distance_km"))
      f.pipeline_distance_km = r.optional_number("pipeline_distance_km");
    s.finance.push_back(f);
  });

  auto potentials = csv::Table::load(root / files.potentials, detail::kPotentialColumns);
  const fs::path profile_dir = root / files.profiles;
  if (!potentials.rows().empty() && !fs::is_directory(profile_dir)) throw MissingFile(profile_dir.string());
  each_row(potentials, [&](const csv::Row& r) {
    ResourceProfile p;
    p.site = {r.text("country"), parse_technology(r.text("tech")), r.integer("class"), r.integer("band")};
    p.potential_mw = r.number("potential_mw");
    auto table = csv::Table::load(profile_dir / (to_string(p.site) + ".csv"), detail::kProfileColumns);
    int last = std::numeric_limits<int>::min();
    each_row(table, [&](const csv::Row& h) {
      int hour = h.integer("hour");
      if (hour <= last) throw SchemaViolation(h.location("hour") + ": hours must be strictly increasing");
      last = hour;
      p.hours.push_back({h.number("cf"), h.number("weight")});
    });
    s.profiles.push_back(std::move(p));
  });

  auto ships = csv::Table::load(root / files.transport_ship, detail::kShipColumns);
  each_row(ships, [&](const csv::Row& r) {
    ShipParams p;
    p.commodity = parse_commodity(r.text("commodity"));
    p.capex_eur = r.number("capex_eur");
    p.opex_frac = r.number("opex_frac");
    p.lifetime_years = r.number("lifetime_y");
    p.operating_eur_per_h = r.number("operating_eur_per_h");
    p.available_hours = r.number("available_h");
    p.velocity_kmh = r.number("velocity_kmh");
    p.fuel_mwh_per_km = r.number("fuel_mwh_per_km");
    p.fuel_eur_per_mwh = r.number("fuel_eur_per_mwh");
    p.payload_mwh = r.number("payload_mwh");
    p.load_time_h = r.number("load_time_h");
    p.flash_loss = r.number("flash_loss");
    p.boiloff_per_h = r.number("boiloff_per_h");
    s.ships.push_back(p);
  });

  auto pipes = csv::Table::load(root / files.transport_pipeline, detail::kPipelineColumns);
  each_row(pipes, [&](const csv::Row& r) {
    PipelineParams p;
    p.scope = parse_pipeline_scope(r.text("scope"));
    p.capex_eur_per_km = r.number("capex_eur_per_km");
    p.opex_frac = r.number("opex_frac");
    p.lifetime_years = r.number("lifetime_y");
    p.capacity_factor = r.number("capacity_factor");
    p.annual_throughput_mwh = r.number("throughput_mwh");
    p.electricity_mwh_per_mwh_km = r.number("electricity_mwh_per_mwh_km");
    p.electricity_eur_per_mwh = r.number("electricity_eur_per_mwh");
    p.loss_per_100km = r.number("loss_per_100km");
    s.pipelines.push_back(p);
  });

  auto land = csv::Table::load(root / files.transport_landside, detail::kLandsideColumns);
  each_row(land, [&](const csv::Row& r) {
    LandsideParams p;
    p.mode = parse_mode(r.text("mode"));
    p.commodity = parse_commodity(r.text("commodity"));
    p.year = r.integer("year");
    p.trailer_capex_eur = r.number("trailer_capex_eur");
    p.trailer_lifetime_years = r.number("trailer_lifetime_y");
    p.tractor_capex_eur = r.number("tractor_capex_eur");
    p.tractor_lifetime_years = r.number("tractor_lifetime_y");
    p.payload_mwh = r.number("payload_mwh");
    p.speed_kmh = r.number("speed_kmh");
    p.load_time_h = r.number("load_time_h");
    p.driver_eur_per_h = r.number("driver_eur_per_h");
    p.fuel_mwh_per_km = r.number("fuel_mwh_per_km");
    p.fuel_eur_per_mwh = r.number("fuel_eur_per_mwh");
    p.freight_eur_per_km = r.number("freight_eur_per_km");
    p.throughput_loss = r.number("throughput_loss");
    p.throughput_boiloff = r.number("throughput_boiloff");
    p.boiloff_per_day = r.number("boiloff_per_day");
    p.wagons_per_train = r.integer("wagons_per_train");
    p.operating_hours = r.number("operating_hours");
    s.landside.push_back(p);
  });

  auto demand = csv::Table::load(root / files.demand, detail::kDemandColumns);
  each_row(demand, [&](const csv::Row& r) { s.demand.push_back({r.integer("year"), r.number("demand_twh") * 1e6}); });

  auto consumers = csv::Table::load(root / files.consumers, detail::kConsumerColumns);
  each_row(consumers, [&](const csv::Row& r) {
    ConsumerSite c;
    c.name = r.text("name");
    if (c.name.empty()) throw SchemaViolation(r.location("name") + ": empty name");
    c.desired_product = parse_product(r.text("product"));
    for (int y : s.years) {
      auto col = "demand_" + std::to_string(y) + "_gwh";
      if (!consumers.has_column(col)) throw SchemaViolation(consumers.name() + ": missing column '" + col + "'");
      c.demand_mwh[y] = r.number(col) * 1e3;
    }
    c.dist_truck_km = r.optional_number("dist_truck_km");
    c.dist_rail_km = r.optional_number("dist_rail_km");
    c.dist_gh2pipe_km = r.optional_number("dist_gh2pipe_km");
    c.dist_nh3pipe_km = r.optional_number("dist_nh3pipe_km");
    s.consumers.push_back(std::move(c));
  });
  return s;
}

/// Throws the exception matching the first Error finding.
inline void throw_on_errors(const std::vector<Finding>& findings) {
  for (const auto& f : findings) {
    if (f.severity != Severity::Error) continue;
    auto msg = f.location + ": " + f.message;
    switch (f.kind) {
      case FindingKind::Schema: throw SchemaViolation(msg);
      case FindingKind::CrossRef: throw CrossRefError(msg);
      case FindingKind::Unit: throw UnitError(msg);
    }
  }
}

inline Scenario load_scenario(const fs::path& root) {
  Scenario s = parse_scenario(root);
  throw_on_errors(validate_scenario(s));
  return s;
}

/// Canonical file contents keyed by relative path.
inline std::map<std::string, std::string> serialize_scenario(const Scenario& s) {
  using csv::format_number;
  using detail::format_scaled;
  using detail::opt_number;
  std::map<std::string, std::string> out;
  const auto& k = s.constants;

  std::string conf = "name = " + s.name + "\nyears = ";
  for (std::size_t i = 0; i < s.years.size(); ++i) conf += (i ? ", " : "") + std::to_string(s.years[i]);
  conf += "\ncommodities = ";
  for (std::size_t i = 0; i < s.commodities.size(); ++i)
    conf += (i ? ", " : "") + std::string(to_string(s.commodities[i]));
  conf += "\ndesalination_eur_per_mwh = " + format_number(k.desalination_eur_per_mwh);
  conf += "\nelectricity_price_eur_per_mwh = " + format_number(k.electricity_eur_per_mwh);
  conf += "\nimporter_wacc = " + format_number(k.importer_wacc);
  conf += "\nconversion_full_load_hours = " + format_number(k.conversion_full_load_hours);
  conf += "\nconsumer_storage_turnovers = " + format_number(k.consumer_storage_turnovers);
  conf += std::string("\nelectrolyzer_bound = ") +
          (k.electrolyzer_bound == ElectrolyzerBound::Combined ? "combined" : "conversion");
  conf += std::string("\nvariable_motion_costs_per_mwh = ") + (k.variable_motion_costs_per_mwh ? "true" : "false");
  conf += std::string("\nlandside_daily_boiloff = ") + (k.landside_daily_boiloff ? "true" : "false");
  conf += std::string("\nsupply_curve_extensions = ") + (k.supply_curve_extensions ? "true" : "false");
  conf += "\ncurve_extent_twh = " + format_scaled(k.curve_extent_mwh, 1e6) + "\n";
  out["scenario.conf"] = conf;

  csv::Writer tech(detail::kTechColumns);
  for (const auto& [key, t] : s.tech_costs)
    tech.add_row({std::string(to_string(key.first)), std::to_string(key.second), format_number(t.capex_eur_per_kw),
                  format_number(t.opex_frac), format_number(t.lifetime_years), format_number(t.efficiency),
                  format_number(t.power_demand)});
  out["technologies.csv"] = tech.str();

  csv::Writer storage(detail::kStorageColumns);
  for (const auto& [key, p] : s.storage)
    storage.add_row({std::string(to_string(key.first)), std::to_string(key.second), format_number(p.capex_eur_per_mwh),
                     format_number(p.opex_frac), format_number(p.efficiency), format_number(p.lifetime_years),
                     format_number(p.e2p_hours), format_number(p.tank_eur_per_mwh)});
  out["storage.csv"] = storage.str();

  csv::Writer countries({"country", "wacc", "capex_index", "ship_distance_km", "pipeline_distance_km"});
  for (const auto& f : s.finance)
    countries.add_row({f.country, format_number(f.wacc), format_number(f.capex_index), opt_number(f.ship_distance_km),
                       opt_number(f.pipeline_distance_km)});
  out["countries.csv"] = countries.str();

  csv::Writer potentials(detail::kPotentialColumns);
  for (const auto& p : s.profiles) {
    potentials.add_row({p.site.country, std::string(to_string(p.site.technology)),
                        std::to_string(p.site.resource_class), std::to_string(p.site.shore_band),
                        format_number(p.potential_mw)});
    csv::Writer prof(detail::kProfileColumns);
    for (std::size_t h = 0; h < p.hours.size(); ++h)
      prof.add_row({std::to_string(h + 1), format_number(p.hours[h].capacity_factor),
                    format_number(p.hours[h].weight)});
    out["profiles/" + to_string(p.site) + ".csv"] = prof.str();
  }
  out["potentials.csv"] = potentials.str();

  csv::Writer ships(detail::kShipColumns);
  for (const auto& p : s.ships)
    ships.add_row({std::string(to_string(p.commodity)), format_number(p.capex_eur), format_number(p.opex_frac),
                   format_number(p.lifetime_years), format_number(p.operating_eur_per_h),
                   format_number(p.available_hours), format_number(p.velocity_kmh), format_number(p.fuel_mwh_per_km),
                   format_number(p.fuel_eur_per_mwh), format_number(p.payload_mwh), format_number(p.load_time_h),
                   format_number(p.flash_loss), format_number(p.boiloff_per_h)});
  out["transport_ship.csv"] = ships.str();

  csv::Writer pipes(detail::kPipelineColumns);
  for (const auto& p : s.pipelines)
    pipes.add_row({std::string(to_string(p.scope)), format_number(p.capex_eur_per_km), format_number(p.opex_frac),
                   format_number(p.lifetime_years), format_number(p.capacity_factor),
                   format_number(p.annual_throughput_mwh), format_number(p.electricity_mwh_per_mwh_km),
                   format_number(p.electricity_eur_per_mwh), format_number(p.loss_per_100km)});
  out["transport_pipeline.csv"] = pipes.str();

  csv::Writer land(detail::kLandsideColumns);
  for (const auto& p : s.landside)
    land.add_row({std::string(to_string(p.mode)), std::string(to_string(p.commodity)), std::to_string(p.year),
                  format_number(p.trailer_capex_eur), format_number(p.trailer_lifetime_years),
                  format_number(p.tractor_capex_eur), format_number(p.tractor_lifetime_years),
                  format_number(p.payload_mwh), format_number(p.speed_kmh), format_number(p.load_time_h),
                  format_number(p.driver_eur_per_h), format_number(p.fuel_mwh_per_km),
                  format_number(p.fuel_eur_per_mwh), format_number(p.freight_eur_per_km),
                  format_number(p.throughput_loss), format_number(p.throughput_boiloff),
                  format_number(p.boiloff_per_day), std::to_string(p.wagons_per_train),
                  format_number(p.operating_hours)});
  out["transport_landside.csv"] = land.str();

  csv::Writer demand(detail::kDemandColumns);
  for (const auto& d : s.demand) demand.add_row({std::to_string(d.year), format_scaled(d.annual_demand_mwh, 1e6)});
  out["demand.csv"] = demand.str();

  std::vector<std::string> ccols{"name", "product"};
  for (int y : s.years) ccols.push_back("demand_" + std::to_string(y) + "_gwh");
  for (auto c : {"dist_truck_km", "dist_rail_km", "dist_gh2pipe_km", "dist_nh3pipe_km"}) ccols.emplace_back(c);
  csv::Writer consumers(ccols);
  for (const auto& c : s.consumers) {
    std::vector<std::string> row{c.name, std::string(to_string(c.desired_product))};
    for (int y : s.years) row.push_back(format_scaled(c.demand(y), 1e3));
    for (const auto& d : {c.dist_truck_km, c.dist_rail_km, c.dist_gh2pipe_km, c.dist_nh3pipe_km})
      row.push_back(opt_number(d));
    consumers.add_row(std::move(row));
  }
  out["consumers.csv"] = consumers.str();
  return out;
}

inline void save_scenario(const Scenario& s, const fs::path& root) {
  for (const auto& [rel, content] : serialize_scenario(s)) csv::write_file(root / rel, content);
}

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hex digest of the canonical serialization; identical scenarios hash equally
/// regardless of how their source files were formatted.
inline std::string scenario_hash(const Scenario& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [rel, content] : serialize_scenario(s)) {
    h = fnv1a64(rel, h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(content, h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace greenchain

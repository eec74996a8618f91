#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "greenchain/transport_costs.hpp"
#include "greenchain/types.hpp"

namespace greenchain {

struct HourSample {
  double capacity_factor = 0.0;
  double weight = 0.0;
  bool operator==(const HourSample&) const = default;
};

struct ResourceProfile {
  SiteKey site;
  double potential_mw = 0.0;
  std::vector<HourSample> hours;

  double weighted_full_load_hours() const {
    double s = 0.0;
    for (const auto& h : hours) s += h.capacity_factor * h.weight;
    return s;
  }
  bool operator==(const ResourceProfile&) const = default;
};

struct TechCost {
  double capex_eur_per_kw = 0.0;
  double opex_frac = 0.0;
  double lifetime_years = 1.0;
  double efficiency = 1.0;
  double power_demand = 0.0;
  bool operator==(const TechCost&) const = default;
};

struct StorageParams {
  StorageKind kind = StorageKind::Battery;
  double capex_eur_per_mwh = 0.0;
  double opex_frac = 0.0;
  double efficiency = 1.0;
  double lifetime_years = 1.0;
  double e2p_hours = 0.0;
  double tank_eur_per_mwh = 0.0;  ///< export terminal storage rate per MWh throughput
  bool operator==(const StorageParams&) const = default;
};

struct CountryFinance {
  std::string country;
  double wacc = 0.0;
  double capex_index = 1.0;
  std::optional<double> ship_distance_km;
  /// Set only for countries reachable by an international GH2 pipeline.
  std::optional<double> pipeline_distance_km;

  bool pipeline_reachable() const { return pipeline_distance_km.has_value(); }
  bool operator==(const CountryFinance&) const = default;
};

struct DemandSpec {
  int year = 2030;
  double annual_demand_mwh = 0.0;
  bool operator==(const DemandSpec&) const = default;
};

enum class Route { Truck, Rail, GH2Pipeline, NH3Pipeline };

struct ConsumerSite {
  std::string name;
  Product desired_product = Product::Ammonia;
  std::map<int, double> demand_mwh;  ///< per scenario year
  std::optional<double> dist_truck_km;
  std::optional<double> dist_rail_km;
  std::optional<double> dist_gh2pipe_km;
  std::optional<double> dist_nh3pipe_km;

  std::optional<double> distance(Commodity c, TransportMode m) const {
    switch (m) {
      case TransportMode::Truck: return dist_truck_km;
      case TransportMode::Rail: return dist_rail_km;
      case TransportMode::Pipeline:
        return c == Commodity::GaseousHydrogen ? dist_gh2pipe_km : dist_nh3pipe_km;
    }
    return std::nullopt;
  }
  double demand(int year) const {
    auto it = demand_mwh.find(year);
    return it == demand_mwh.end() ? 0.0 : it->second;
  }
  bool operator==(const ConsumerSite&) const = default;
};

enum class ElectrolyzerBound { Combined, Conversion };

struct Constants {
  double desalination_eur_per_mwh = 1.0;
  double electricity_eur_per_mwh = 53.0;
  double importer_wacc = 0.08;
  double conversion_full_load_hours = 8000.0;
  double consumer_storage_turnovers = 52.0;
  ElectrolyzerBound electrolyzer_bound = ElectrolyzerBound::Combined;
  bool variable_motion_costs_per_mwh = false;
  bool landside_daily_boiloff = true;
  bool supply_curve_extensions = true;
  /// Demand at which supply curves are cut for export; 0 exports the whole curve.
  double curve_extent_mwh = 0.0;
  bool operator==(const Constants&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<int> years;
  std::vector<Commodity> commodities;
  std::vector<ResourceProfile> profiles;
  std::map<std::pair<Technology, int>, TechCost> tech_costs;
  std::map<std::pair<StorageKind, int>, StorageParams> storage;
  std::vector<CountryFinance> finance;
  std::vector<ShipParams> ships;
  std::vector<PipelineParams> pipelines;
  std::vector<LandsideParams> landside;
  std::vector<DemandSpec> demand;
  std::vector<ConsumerSite> consumers;
  Constants constants;

  bool operator==(const Scenario&) const = default;

  const CountryFinance* find_finance(const std::string& country) const {
    for (const auto& f : finance)
      if (f.country == country) return &f;
    return nullptr;
  }
  const CountryFinance& finance_for(const std::string& country) const {
    if (auto f = find_finance(country)) return *f;
    throw CrossRefError("no finance entry for country '" + country + "'");
  }
  const TechCost& tech(Technology t, int year) const {
    auto it = tech_costs.find({t, year});
    if (it == tech_costs.end())
      throw CrossRefError("no cost entry for " + std::string(to_string(t)) + " " + std::to_string(year));
    return it->second;
  }
  const StorageParams& storage_for(StorageKind k, int year) const {
    auto it = storage.find({k, year});
    if (it == storage.end())
      throw CrossRefError("no storage entry for " + std::string(to_string(k)) + " " + std::to_string(year));
    return it->second;
  }
  const ShipParams& ship(Commodity c) const {
    for (const auto& s : ships)
      if (s.commodity == c) return s;
    throw CrossRefError("no ship parameters for " + std::string(to_string(c)));
  }
  const PipelineParams& pipeline(PipelineScope s) const {
    for (const auto& p : pipelines)
      if (p.scope == s) return p;
    throw CrossRefError("no pipeline parameters for " + std::string(to_string(s)));
  }
  const LandsideParams& landside_for(TransportMode m, Commodity c, int year) const {
    for (const auto& l : landside)
      if (l.mode == m && l.commodity == c && l.year == year) return l;
    throw CrossRefError("no landside parameters for " + std::string(to_string(m)) + " " +
                        std::string(short_label(c)) + " " + std::to_string(year));
  }
  double demand_for(int year) const {
    for (const auto& d : demand)
      if (d.year == year) return d.annual_demand_mwh;
    throw CrossRefError("no demand for year " + std::to_string(year));
  }
};

enum class Severity { Error, Warning };

enum class FindingKind { Schema, CrossRef, Unit };

struct Finding {
  Severity severity = Severity::Error;
  FindingKind kind = FindingKind::Unit;
  std::string location;
  std::string message;

  auto operator<=>(const Finding&) const = default;
};

inline std::string_view to_string(Severity s) { return s == Severity::Error ? "error" : "warning"; }

inline std::string format_finding(const Finding& f) {
  return std::string(to_string(f.severity)) + ": " + f.location + ": " + f.message;
}

namespace detail {

class FindingSink {
 public:
  void error(FindingKind k, std::string loc, std::string msg) {
    out.push_back({Severity::Error, k, std::move(loc), std::move(msg)});
  }
  void warning(FindingKind k, std::string loc, std::string msg) {
    out.push_back({Severity::Warning, k, std::move(loc), std::move(msg)});
  }
  void range(bool ok, std::string loc, std::string msg) {
    if (!ok) error(FindingKind::Unit, std::move(loc), std::move(msg));
  }
  std::vector<Finding> out;
};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace detail

/// Checks every typed invariant. Findings come back in a fixed order:
/// constants, years, technologies, storage, countries, profiles, transport,
/// demand, consumers.
inline std::vector<Finding> validate_scenario(const Scenario& s) {
  detail::FindingSink f;
  using detail::num;
  const auto& c = s.constants;
  const auto U = FindingKind::Unit;
  const auto X = FindingKind::CrossRef;

  f.range(c.desalination_eur_per_mwh >= 0, "scenario.conf", "desalination cost must be >= 0");
  f.range(c.electricity_eur_per_mwh >= 0, "scenario.conf", "electricity price must be >= 0");
  f.range(c.importer_wacc >= 0 && c.importer_wacc < 1, "scenario.conf", "importer_wacc must be in [0,1)");
  f.range(c.conversion_full_load_hours > 0 && c.conversion_full_load_hours <= kHoursPerYear, "scenario.conf",
          "conversion_full_load_hours must be in (0,8760]");
  f.range(c.consumer_storage_turnovers > 0, "scenario.conf", "consumer_storage_turnovers must be > 0");
  f.range(c.curve_extent_mwh >= 0, "scenario.conf", "curve_extent must be >= 0");

  if (s.years.empty()) f.error(FindingKind::Schema, "scenario.conf", "no years configured");
  for (int y : s.years)
    if (y != 2030 && y != 2040) f.error(U, "scenario.conf", "year " + std::to_string(y) + " is not 2030 or 2040");
  if (s.commodities.empty()) f.error(FindingKind::Schema, "scenario.conf", "no commodities configured");
  auto has_commodity = [&](Commodity x) {
    return std::find(s.commodities.begin(), s.commodities.end(), x) != s.commodities.end();
  };

  for (const auto& [key, t] : s.tech_costs) {
    auto loc = "technologies.csv: " + std::string(to_string(key.first)) + " " + std::to_string(key.second);
    f.range(t.capex_eur_per_kw >= 0, loc, "capex must be >= 0, found " + num(t.capex_eur_per_kw));
    f.range(t.opex_frac >= 0 && t.opex_frac <= 1, loc, "opex_frac must be in [0,1], found " + num(t.opex_frac));
    f.range(t.lifetime_years >= 1, loc, "lifetime must be >= 1, found " + num(t.lifetime_years));
    f.range(t.efficiency > 0 && t.efficiency <= 1.01, loc, "efficiency must be in (0,1.01], found " + num(t.efficiency));
    f.range(t.power_demand >= 0, loc, "power_demand must be >= 0, found " + num(t.power_demand));
  }

  // Technologies each configured chain needs, per year.
  std::set<Technology> needed;
  for (const auto& p : s.profiles) needed.insert(p.site.technology);
  needed.insert(Technology::Electrolysis);
  if (has_commodity(Commodity::Ammonia)) needed.insert(Technology::HaberBosch);
  if (has_commodity(Commodity::LiquidHydrogen)) needed.insert(Technology::Liquefaction);
  if (!s.consumers.empty())
    for (auto t : {Technology::Cracking, Technology::Regasification, Technology::HaberBosch}) needed.insert(t);
  for (int y : s.years)
    for (auto t : needed)
      if (!s.tech_costs.count({t, y}))
        f.error(X, "technologies.csv", "missing entry for " + std::string(to_string(t)) + " " + std::to_string(y));

  for (const auto& [key, st] : s.storage) {
    auto loc = "storage.csv: " + std::string(to_string(key.first)) + " " + std::to_string(key.second);
    f.range(st.capex_eur_per_mwh >= 0, loc, "capex must be >= 0");
    f.range(st.opex_frac >= 0 && st.opex_frac <= 1, loc, "opex_frac must be in [0,1]");
    f.range(st.lifetime_years >= 1, loc, "lifetime must be >= 1");
    f.range(st.tank_eur_per_mwh >= 0, loc, "tank rate must be >= 0");
    if (key.first == StorageKind::Battery) {
      f.range(st.efficiency > 0 && st.efficiency <= 1, loc, "battery efficiency must be in (0,1]");
      f.range(st.e2p_hours > 0, loc, "battery e2p_hours must be > 0");
      if (st.efficiency != 0.98) f.warning(U, loc, "battery efficiency differs from reference 0.98");
      if (st.e2p_hours != 6) f.warning(U, loc, "battery e2p_hours differs from reference 6");
    } else {
      f.range(st.efficiency == 1.0, loc, "non-battery storage efficiency must be 1");
    }
  }
  std::set<StorageKind> needed_storage{StorageKind::Battery};
  if (has_commodity(Commodity::Ammonia) || !s.consumers.empty()) needed_storage.insert(StorageKind::TankNH3);
  if (has_commodity(Commodity::LiquidHydrogen) || !s.consumers.empty()) needed_storage.insert(StorageKind::TankLH2);
  for (int y : s.years)
    for (auto k : needed_storage)
      if (!s.storage.count({k, y}))
        f.error(X, "storage.csv", "missing entry for " + std::string(to_string(k)) + " " + std::to_string(y));

  std::set<std::string> countries;
  for (const auto& fin : s.finance) {
    auto loc = "countries.csv: " + fin.country;
    if (!countries.insert(fin.country).second) f.error(FindingKind::Schema, loc, "duplicate country");
    f.range(fin.wacc >= 0 && fin.wacc < 1, loc, "wacc must be in [0,1), found " + num(fin.wacc));
    f.range(fin.capex_index > 0, loc, "capex_index must be > 0, found " + num(fin.capex_index));
    f.range(!fin.ship_distance_km || *fin.ship_distance_km >= 0, loc, "ship distance must be >= 0");
    f.range(!fin.pipeline_distance_km || *fin.pipeline_distance_km >= 0, loc, "pipeline distance must be >= 0");
  }

  std::set<SiteKey> sites;
  for (const auto& p : s.profiles) {
    auto loc = "profiles/" + to_string(p.site) + ".csv";
    if (!sites.insert(p.site).second) f.error(FindingKind::Schema, loc, "duplicate site");
    if (!is_renewable(p.site.technology)) f.error(U, loc, "technology is not a renewable source");
    f.range(p.site.resource_class >= 1 && p.site.resource_class <= 5, loc, "resource class must be in 1..5");
    f.range(p.site.shore_band >= 0, loc, "shore band must be >= 0");
    f.range(p.potential_mw >= 0, loc, "potential must be >= 0, found " + num(p.potential_mw));
    if (p.hours.empty()) f.error(FindingKind::Schema, loc, "profile has no hours");
    double wsum = 0.0;
    bool cf_ok = true, w_ok = true;
    for (const auto& h : p.hours) {
      cf_ok = cf_ok && h.capacity_factor >= 0 && h.capacity_factor <= 1;
      w_ok = w_ok && h.weight >= 0;
      wsum += h.weight;
    }
    f.range(cf_ok, loc, "capacity factors must lie in [0,1]");
    f.range(w_ok, loc, "weights must be >= 0");
    if (!p.hours.empty())
      f.range(std::abs(wsum - kHoursPerYear) <= 1e-6, loc, "weights sum to " + num(wsum) + ", expected 8760");
    const auto* fin = s.find_finance(p.site.country);
    if (!fin) {
      f.error(X, loc, "country '" + p.site.country + "' has no finance entry");
    } else {
      bool ship = fin->ship_distance_km.has_value();
      if ((has_commodity(Commodity::Ammonia) || has_commodity(Commodity::LiquidHydrogen)) && !ship)
        f.error(X, loc, "country '" + p.site.country + "' has no ship distance");
      if (!ship && !fin->pipeline_reachable())
        f.error(X, loc, "country '" + p.site.country + "' has no export route");
    }
  }

  for (auto com : {Commodity::Ammonia, Commodity::LiquidHydrogen}) {
    if (!has_commodity(com)) continue;
    auto it = std::find_if(s.ships.begin(), s.ships.end(), [&](const ShipParams& x) { return x.commodity == com; });
    if (it == s.ships.end()) f.error(X, "transport_ship.csv", "missing " + std::string(to_string(com)) + " ship");
  }
  for (const auto& sh : s.ships) {
    auto loc = "transport_ship.csv: " + std::string(to_string(sh.commodity));
    f.range(sh.commodity != Commodity::GaseousHydrogen, loc, "gaseous hydrogen is not shipped");
    f.range(sh.payload_mwh > 0, loc, "payload must be > 0");
    f.range(sh.velocity_kmh > 0, loc, "velocity must be > 0");
    f.range(sh.available_hours > 0 && sh.available_hours <= kHoursPerYear, loc, "available_hours must be in (0,8760]");
    f.range(sh.capex_eur >= 0 && sh.opex_frac >= 0 && sh.opex_frac <= 1 && sh.lifetime_years >= 1, loc,
            "capex/opex/lifetime out of range");
    f.range(sh.operating_eur_per_h >= 0 && sh.fuel_mwh_per_km >= 0 && sh.fuel_eur_per_mwh >= 0, loc,
            "operating and fuel costs must be >= 0");
    f.range(sh.load_time_h >= 0, loc, "load time must be >= 0");
    f.range(sh.flash_loss >= 0 && sh.flash_loss < 1 && sh.boiloff_per_h >= 0 && sh.boiloff_per_h < 1, loc,
            "loss fractions must be in [0,1)");
  }

  std::vector<PipelineScope> needed_pipes{PipelineScope::DomesticGH2};
  if (has_commodity(Commodity::GaseousHydrogen)) needed_pipes.push_back(PipelineScope::InternationalGH2);
  if (!s.consumers.empty()) needed_pipes.push_back(PipelineScope::DomesticNH3);
  for (auto scope : needed_pipes) {
    auto it = std::find_if(s.pipelines.begin(), s.pipelines.end(), [&](const PipelineParams& p) { return p.scope == scope; });
    if (it == s.pipelines.end()) f.error(X, "transport_pipeline.csv", "missing " + std::string(to_string(scope)));
  }
  for (const auto& p : s.pipelines) {
    auto loc = "transport_pipeline.csv: " + std::string(to_string(p.scope));
    f.range(p.annual_throughput_mwh > 0, loc, "throughput must be > 0");
    f.range(p.capacity_factor > 0 && p.capacity_factor <= 1, loc, "capacity factor must be in (0,1]");
    f.range(p.capex_eur_per_km >= 0 && p.opex_frac >= 0 && p.opex_frac <= 1 && p.lifetime_years >= 1, loc,
            "capex/opex/lifetime out of range");
    f.range(p.electricity_mwh_per_mwh_km >= 0 && p.electricity_eur_per_mwh >= 0 && p.loss_per_100km >= 0 &&
                p.loss_per_100km < 1,
            loc, "electricity and loss terms out of range");
  }
  if (has_commodity(Commodity::GaseousHydrogen)) {
    bool any = std::any_of(s.finance.begin(), s.finance.end(), [](const CountryFinance& x) { return x.pipeline_reachable(); });
    if (!any) f.warning(X, "countries.csv", "no country is pipeline-reachable; gaseous hydrogen has no supply");
  }

  if (!s.consumers.empty())
    for (int y : s.years)
      for (auto m : {TransportMode::Truck, TransportMode::Rail})
        for (auto com : {Commodity::Ammonia, Commodity::LiquidHydrogen}) {
          auto it = std::find_if(s.landside.begin(), s.landside.end(), [&](const LandsideParams& l) {
            return l.mode == m && l.commodity == com && l.year == y;
          });
          if (it == s.landside.end())
            f.error(X, "transport_landside.csv", "missing " + std::string(to_string(m)) + " " +
                                                     std::string(short_label(com)) + " " + std::to_string(y));
        }
  for (const auto& l : s.landside) {
    auto loc = "transport_landside.csv: " + std::string(to_string(l.mode)) + " " +
               std::string(short_label(l.commodity)) + " " + std::to_string(l.year);
    f.range(l.mode != TransportMode::Pipeline && is_valid_pairing(l.commodity, l.mode), loc, "invalid pairing");
    f.range(l.payload_mwh > 0, loc, "payload must be > 0");
    f.range(l.speed_kmh > 0, loc, "speed must be > 0");
    f.range(l.operating_hours > 0 && l.operating_hours <= kHoursPerYear, loc, "operating_hours must be in (0,8760]");
    f.range(l.trailer_capex_eur >= 0 && l.tractor_capex_eur >= 0, loc, "capex must be >= 0");
    f.range(l.trailer_lifetime_years >= 1 && l.tractor_lifetime_years >= 1, loc, "lifetimes must be >= 1");
    f.range(l.load_time_h >= 0 && l.driver_eur_per_h >= 0 && l.fuel_mwh_per_km >= 0 && l.fuel_eur_per_mwh >= 0 &&
                l.freight_eur_per_km >= 0,
            loc, "time and cost terms must be >= 0");
    f.range(l.throughput_loss >= 0 && l.throughput_loss < 1 && l.throughput_boiloff >= 0 && l.throughput_boiloff < 1 &&
                l.boiloff_per_day >= 0 && l.boiloff_per_day < 1,
            loc, "loss fractions must be in [0,1)");
    f.range(l.wagons_per_train >= 1, loc, "wagons_per_train must be >= 1");
  }

  for (int y : s.years) {
    auto it = std::find_if(s.demand.begin(), s.demand.end(), [&](const DemandSpec& d) { return d.year == y; });
    if (it == s.demand.end()) f.error(X, "demand.csv", "no demand for " + std::to_string(y));
  }
  for (const auto& d : s.demand)
    f.range(d.annual_demand_mwh > 0, "demand.csv: " + std::to_string(d.year), "demand must be > 0");

  std::set<std::string> names;
  for (const auto& con : s.consumers) {
    auto loc = "consumers.csv: " + con.name;
    if (!names.insert(con.name).second) f.error(FindingKind::Schema, loc, "duplicate consumer");
    for (const auto& [y, d] : con.demand_mwh) f.range(d >= 0, loc, "demand must be >= 0");
    bool any = false;
    for (auto dist : {con.dist_truck_km, con.dist_rail_km, con.dist_gh2pipe_km, con.dist_nh3pipe_km}) {
      if (!dist) continue;
      any = true;
      f.range(*dist >= 0, loc, "distances must be >= 0");
    }
    if (!any) f.error(X, loc, "no available mode");
  }
  return f.out;
}

inline bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(), [](const Finding& x) { return x.severity == Severity::Error; });
}

}  // namespace greenchain

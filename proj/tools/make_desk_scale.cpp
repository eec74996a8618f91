// Writes the bundled desk-scale scenario: two exporting countries, PV and
// onshore wind in two resource classes each, one synthetic 168-hour week per site.
//
// usage: make_desk_scale [OUT_DIR]   (default data/desk_scale)

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <random>

#include "greenchain/scenario_io.hpp"
#include "greenchain/transport_costs.hpp"

namespace gc = greenchain;

namespace {

constexpr int kHours = 168;
// Export tanks hold a quarter of annual throughput.
constexpr double kExportTankTurnovers = 4.0;

struct SiteSpec {
  const char* country;
  gc::Technology tech;
  int resource_class;
  int shore_band;
  double mean_cf;
  double potential_mw;
};

// PV: clear-sky half sine between 6 and 18 h scaled by a daily clearness draw.
// Wind: AR(1) anomaly around a diurnal-free mean.
std::vector<double> raw_profile(gc::Technology t, std::mt19937_64& rng) {
  std::vector<double> cf(kHours);
  std::uniform_real_distribution<double> clear(0.55, 1.0);
  std::normal_distribution<double> shock(0.0, 1.0);
  if (t == gc::Technology::PV) {
    double day = clear(rng);
    for (int h = 0; h < kHours; ++h) {
      if (h % 24 == 0) day = clear(rng);
      const double hod = h % 24 + 0.5;
      cf[h] = hod > 6 && hod < 18 ? day * std::sin(std::numbers::pi * (hod - 6) / 12) : 0.0;
    }
  } else {
    double x = 0.0;
    for (int h = 0; h < kHours; ++h) {
      x = 0.93 * x + 0.37 * shock(rng);
      cf[h] = std::max(0.0, 1.0 + 0.55 * x);
    }
  }
  return cf;
}

gc::ResourceProfile make_profile(const SiteSpec& s, std::mt19937_64& rng) {
  auto raw = raw_profile(s.tech, rng);
  // Rescale to the target mean, clipping at 1 and iterating until the mean holds.
  for (int it = 0; it < 50; ++it) {
    double mean = 0.0;
    for (double v : raw) mean += v / kHours;
    const double k = s.mean_cf / mean;
    for (double& v : raw) v = std::min(1.0, v * k);
  }
  gc::ResourceProfile p;
  p.site = {s.country, s.tech, s.resource_class, s.shore_band};
  p.potential_mw = s.potential_mw;
  for (double v : raw) p.hours.push_back({std::round(v * 1e4) / 1e4, gc::kHoursPerYear / kHours});
  return p;
}

double export_tank_rate(double capex_eur_per_mwh, double opex, double life) {
  return gc::annualize(capex_eur_per_mwh, opex, life, 0.08) / kExportTankTurnovers;
}

gc::Scenario build() {
  using T = gc::Technology;
  gc::Scenario s;
  s.name = "desk_scale";
  s.years = {2030, 2040};
  s.commodities = {gc::Commodity::Ammonia, gc::Commodity::LiquidHydrogen, gc::Commodity::GaseousHydrogen};

  // Renewable capex at the low end of each range; the country index lifts it.
  auto tech = [&](T t, int y, double capex, double opex, double life, double eff = 1.0, double q = 0.0) {
    s.tech_costs[{t, y}] = {capex, opex, life, eff, q};
  };
  tech(T::PV, 2030, 425, 0.026, 30);
  tech(T::PV, 2040, 368, 0.027, 30);
  tech(T::WindOnshore, 2030, 987, 0.025, 30);
  tech(T::WindOnshore, 2040, 917, 0.024, 30);
  tech(T::WindOffshoreShallow, 2030, 1849, 0.028, 30);
  tech(T::WindOffshoreShallow, 2040, 1620, 0.027, 30);
  tech(T::WindOffshoreDeep, 2030, 2631, 0.028, 30);
  tech(T::WindOffshoreDeep, 2040, 2300, 0.027, 30);
  tech(T::Electrolysis, 2030, 801, 0.035, 20, 0.67);
  tech(T::Electrolysis, 2040, 640, 0.032, 23, 0.69);
  for (int y : {2030, 2040}) {
    tech(T::HaberBosch, y, y == 2030 ? 1101 : 963, 0.04, 25, 0.85, 0.29);
    tech(T::Liquefaction, y, y == 2030 ? 1062 : 584, 0.04, 30, 0.9, 0.20);
    tech(T::Cracking, y, y == 2030 ? 764 : 575, 0.04, 25, 0.78, 0.05);
    tech(T::Regasification, y, y == 2030 ? 812 : 593, 0.04, 30, 0.9, 0.01);
  }

  // Battery capex is per kWh in the source table; stored per MWh.
  s.storage[{gc::StorageKind::Battery, 2030}] = {gc::StorageKind::Battery, 190000, 0.02, 0.98, 15, 6, 0};
  s.storage[{gc::StorageKind::Battery, 2040}] = {gc::StorageKind::Battery, 143000, 0.03, 0.98, 15, 6, 0};
  for (int y : {2030, 2040}) {
    s.storage[{gc::StorageKind::SaltCavernGH2, y}] = {gc::StorageKind::SaltCavernGH2, 1465, 0.02, 1, 30, 0, 0};
    s.storage[{gc::StorageKind::TankNH3, y}] = {gc::StorageKind::TankNH3, 414, 0.02, 1, 30, 0,
                                                export_tank_rate(414, 0.02, 30)};
    s.storage[{gc::StorageKind::TankLH2, y}] = {gc::StorageKind::TankLH2, 1051, 0.02, 1, 30, 0,
                                                export_tank_rate(1051, 0.02, 30)};
  }

  // "north": close exporter with a pipeline corridor; "south": distant, ship only.
  s.finance = {{"north", 0.075, 1.08, 3200.0, 6000.0}, {"south", 0.06, 1.0, 12500.0, std::nullopt}};
  // Driver and fuel scale with the MWh actually moved, so a part-loaded truck
  // is not billed for a full year of driving.
  s.constants.variable_motion_costs_per_mwh = true;

  const std::vector<SiteSpec> sites{
      {"north", T::PV, 1, 0, 0.25, 1040000},       {"north", T::PV, 2, 1, 0.21, 1280000},
      {"north", T::WindOnshore, 1, 0, 0.40, 560000}, {"north", T::WindOnshore, 2, 1, 0.32, 880000},
      {"south", T::PV, 1, 0, 0.30, 720000},        {"south", T::PV, 2, 1, 0.24, 1040000},
      {"south", T::WindOnshore, 1, 0, 0.50, 480000}, {"south", T::WindOnshore, 2, 1, 0.40, 800000},
  };
  std::mt19937_64 rng(20240613);
  for (const auto& site : sites) s.profiles.push_back(make_profile(site, rng));

  gc::ShipParams nh3{gc::Commodity::Ammonia, 83835432, 0.04, 25, 607, 8000, 30, 0.69, 170, 311664, 54, 0, 0};
  gc::ShipParams lh2{gc::Commodity::LiquidHydrogen, 410687496, 0.04, 25, 607, 8000, 33, 0, 170, 366663, 54, 0.0001, 0};
  s.ships = {nh3, lh2};

  // NH3 pipeline throughput: GH2 figure scaled by the NH3/GH2 volumetric
  // energy ratio (about 1.5 at pipeline conditions), capacity factor 1.
  s.pipelines = {
      {gc::PipelineScope::InternationalGH2, 6982749, 0.05, 40, 0.9, 172998270, 0.00002, 53, 0},
      {gc::PipelineScope::DomesticGH2, 1146105, 0.05, 40, 0.9, 9266574, 0.00002, 53, 0},
      {gc::PipelineScope::DomesticNH3, 502084, 0.03, 40, 1.0, 9266574 * 0.9 * 1.5, 0, 53, 0},
  };

  for (int y : {2030, 2040}) {
    const double fuel = y == 2030 ? 140 : 70;
    for (auto c : {gc::Commodity::Ammonia, gc::Commodity::LiquidHydrogen}) {
      const bool nh = c == gc::Commodity::Ammonia;
      gc::LandsideParams truck;
      truck.mode = gc::TransportMode::Truck;
      truck.commodity = c;
      truck.year = y;
      truck.trailer_capex_eur = nh ? 212242 : 965699;
      truck.trailer_lifetime_years = 12;
      truck.tractor_capex_eur = 201630;
      truck.tractor_lifetime_years = 5;
      truck.payload_mwh = nh ? 87 : 133;
      truck.speed_kmh = 50;
      truck.load_time_h = 1.5;
      truck.driver_eur_per_h = 38;
      truck.fuel_mwh_per_km = 0.0023;
      truck.fuel_eur_per_mwh = fuel;
      truck.throughput_loss = 0.01;
      truck.throughput_boiloff = nh ? 0.0 : 0.005;
      truck.boiloff_per_day = nh ? 0.0 : 0.003;
      truck.wagons_per_train = 1;
      truck.operating_hours = 4000;
      s.landside.push_back(truck);

      gc::LandsideParams rail = truck;
      rail.mode = gc::TransportMode::Rail;
      rail.tractor_capex_eur = 2980900;
      rail.tractor_lifetime_years = 30;
      rail.driver_eur_per_h = 0;
      rail.fuel_mwh_per_km = 0;
      rail.fuel_eur_per_mwh = 0;
      rail.freight_eur_per_km = 4.75;
      rail.wagons_per_train = 20;
      rail.operating_hours = 6000;
      s.landside.push_back(rail);
    }
  }

  s.demand = {{2030, 306e6}, {2040, 861e6}};

  struct C {
    const char* name;
    gc::Product p;
    double d2030, d2040;
    std::optional<double> truck, rail, gh2, nh3;
  };
  const auto A = gc::Product::Ammonia;
  const auto H = gc::Product::Hydrogen;
  const std::vector<C> consumers{
      {"BASF", A, 3844, 3844, 656, 678, 153, 685},
      {"INEOS Manufacturing Deutschland GmbH", A, 1163, 1163, 500, 508, 290, 490},
      {"SKW Stickstoffwerke Piesteritz GmbH", A, 6212, 6212, 444, 414, 693, 448},
      {"YARA Brunsbuettel GmbH", A, 3769, 3769, 13, 4, 763, 3},
      {"Ship Bunkering Station Ludwigshafen", A, 87, 87, 658, 678, 154, 794},
      {"Fueling Station Berlin", H, 8, 8, 368, std::nullopt, 823, 437},
      {"Fueling Station Muenchen", H, 8, 8, 864, std::nullopt, 290, 924},
      {"Dow Europe Holding B.V.", H, 1730, 9062, 63, 153, 732, 52},
      {"Basell Polyolefine GmbH Werk Wesseling", H, 3184, 16680, 516, 520, 253, 521},
      {"OMV Werk Burghausen", H, 1486, 7783, 961, 920, 622, 959},
      {"Salzgitter Flachstahl GmbH", H, 975, 5107, 302, 291, 295, 573},
      {"Power Plant Altbach/Deizisau (EnBW)", H, 18, 222, 757, 779, 256, 806},
      {"Power Plant Leipzig Sued (Stadtwerke Leipzig)", H, 7, 37, 487, 561, 630, 507},
      {"Power Plant Schwarze Pumpe (LEAG)", H, 6, 30, 543, 550, 818, 770},
  };
  for (const auto& c : consumers) {
    gc::ConsumerSite site;
    site.name = c.name;
    site.desired_product = c.p;
    site.demand_mwh = {{2030, c.d2030 * 1e3}, {2040, c.d2040 * 1e3}};
    site.dist_truck_km = c.truck;
    site.dist_rail_km = c.rail;
    site.dist_gh2pipe_km = c.gh2;
    site.dist_nh3pipe_km = c.nh3;
    s.consumers.push_back(site);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path out = argc > 1 ? argv[1] : "data/desk_scale";
  try {
    const auto s = build();
    const auto findings = gc::validate_scenario(s);
    for (const auto& f : findings) std::cerr << gc::format_finding(f) << '\n';
    if (gc::has_errors(findings)) return 1;
    gc::save_scenario(s, out);
    std::cout << "wrote " << out.string() << " (scenario " << gc::scenario_hash(s) << ")\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

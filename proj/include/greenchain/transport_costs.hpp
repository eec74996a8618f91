#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenchain/error.hpp"
#include "greenchain/types.hpp"

namespace greenchain {

struct ShipParams {
  Commodity commodity = Commodity::Ammonia;
  double capex_eur = 0.0;
  double opex_frac = 0.0;
  double lifetime_years = 1.0;
  double operating_eur_per_h = 0.0;
  double available_hours = 8000.0;
  double velocity_kmh = 1.0;
  double fuel_mwh_per_km = 0.0;
  double fuel_eur_per_mwh = 0.0;
  double payload_mwh = 1.0;
  double load_time_h = 0.0;
  double flash_loss = 0.0;     ///< fraction lost per load
  double boiloff_per_h = 0.0;  ///< fraction lost per voyage hour

  bool operator==(const ShipParams&) const = default;
};

enum class PipelineScope { InternationalGH2, DomesticGH2, DomesticNH3 };

inline std::string_view to_string(PipelineScope s) {
  switch (s) {
    case PipelineScope::InternationalGH2: return "international_gh2";
    case PipelineScope::DomesticGH2: return "domestic_gh2";
    case PipelineScope::DomesticNH3: return "domestic_nh3";
  }
  return "?";
}

inline PipelineScope parse_pipeline_scope(std::string_view s) {
  for (auto p : {PipelineScope::InternationalGH2, PipelineScope::DomesticGH2, PipelineScope::DomesticNH3})
    if (to_string(p) == s) return p;
  throw SchemaViolation("unknown pipeline scope '" + std::string(s) + "'");
}

struct PipelineParams {
  PipelineScope scope = PipelineScope::DomesticGH2;
  double capex_eur_per_km = 0.0;
  double opex_frac = 0.0;
  double lifetime_years = 1.0;
  double capacity_factor = 1.0;
  double annual_throughput_mwh = 1.0;
  double electricity_mwh_per_mwh_km = 0.0;
  double electricity_eur_per_mwh = 0.0;
  double loss_per_100km = 0.0;

  bool operator==(const PipelineParams&) const = default;
};

/// One row of road/rail assumptions for a (mode, commodity, year).
/// For rail the "tractor" fields describe the locomotive.
struct LandsideParams {
  TransportMode mode = TransportMode::Truck;
  Commodity commodity = Commodity::Ammonia;
  int year = 2030;
  double trailer_capex_eur = 0.0;
  double trailer_lifetime_years = 1.0;
  double tractor_capex_eur = 0.0;
  double tractor_lifetime_years = 1.0;
  double payload_mwh = 1.0;
  double speed_kmh = 1.0;
  double load_time_h = 0.0;
  double driver_eur_per_h = 0.0;
  double fuel_mwh_per_km = 0.0;
  double fuel_eur_per_mwh = 0.0;
  double freight_eur_per_km = 0.0;
  double throughput_loss = 0.0;
  double throughput_boiloff = 0.0;
  double boiloff_per_day = 0.0;
  int wagons_per_train = 1;
  double operating_hours = 8760.0;

  bool operator==(const LandsideParams&) const = default;
};

struct TransportUnitEconomics {
  double unit_cost_per_year = 0.0;
  double effective_capacity = 0.0;   ///< MWh delivered per unit and year
  double delivery_efficiency = 1.0;  ///< delivered / loaded
  double variable_cost_per_mwh = 0.0;  ///< per MWh transported; nonzero only with per-MWh motion billing
};

/// Capital recovery factor.
inline double crf(double wacc, double lifetime_years) {
  if (wacc == 0.0) return 1.0 / lifetime_years;
  return wacc / (1.0 - std::pow(1.0 + wacc, -lifetime_years));
}

inline double annualize(double capex, double opex_frac, double lifetime_years, double wacc) {
  if (lifetime_years < 1.0) throw std::invalid_argument("annualize: lifetime must be >= 1");
  if (wacc < 0.0) throw std::invalid_argument("annualize: wacc must be >= 0");
  return capex * crf(wacc, lifetime_years) + opex_frac * capex;
}

/// Cost per MWh delivered by ship over a one-way distance.
inline double ship_unit_cost(const ShipParams& p, double distance_km, double wacc) {
  if (distance_km < 0.0) throw std::invalid_argument("ship_unit_cost: negative distance");
  const double round_trip_h = 2.0 * distance_km / p.velocity_kmh + 2.0 * p.load_time_h;
  const double trips = p.available_hours / round_trip_h;
  const double voyage_h = distance_km / p.velocity_kmh;
  const double delivered_per_trip =
      p.payload_mwh * (1.0 - p.flash_loss) * std::pow(1.0 - p.boiloff_per_h, voyage_h);
  const double annual = annualize(p.capex_eur, p.opex_frac, p.lifetime_years, wacc) +
                        p.operating_eur_per_h * p.available_hours +
                        p.fuel_mwh_per_km * 2.0 * distance_km * p.fuel_eur_per_mwh * trips;
  return annual / (trips * delivered_per_trip);
}

inline double pipeline_cost_per_mwh(const PipelineParams& p, double distance_km, double wacc) {
  if (distance_km < 0.0) throw std::invalid_argument("pipeline_cost_per_mwh: negative distance");
  if (p.annual_throughput_mwh <= 0.0) throw std::invalid_argument("pipeline_cost_per_mwh: throughput must be > 0");
  return annualize(p.capex_eur_per_km * distance_km, p.opex_frac, p.lifetime_years, wacc) /
             (p.annual_throughput_mwh * p.capacity_factor) +
         p.electricity_mwh_per_mwh_km * distance_km * p.electricity_eur_per_mwh;
}

struct LandsideOptions {
  bool daily_boiloff = true;
  bool variable_motion_costs = false;
};

/// Economics of one integer transport unit: a tractor-trailer or a full train.
inline TransportUnitEconomics landside_unit(const LandsideParams& p, double distance_km, double wacc,
                                            LandsideOptions opt = {}) {
  if (p.mode == TransportMode::Pipeline || !is_valid_pairing(p.commodity, p.mode))
    throw InvalidPairing(std::string(short_label(p.commodity)) + " by " + std::string(to_string(p.mode)));
  if (distance_km < 0.0) throw std::invalid_argument("landside_unit: negative distance");

  const double round_trip_h = 2.0 * distance_km / p.speed_kmh + 2.0 * p.load_time_h;
  const double trips = p.operating_hours / round_trip_h;
  const double transit_days = distance_km / p.speed_kmh / 24.0;
  const double boil = opt.daily_boiloff ? std::max(0.0, 1.0 - p.boiloff_per_day * transit_days) : 1.0;
  const double eff = (1.0 - p.throughput_loss) * (1.0 - p.throughput_boiloff) * boil;
  const int trailers = p.mode == TransportMode::Rail ? p.wagons_per_train : 1;
  const double loaded = trips * p.payload_mwh * trailers;

  double stock = trailers * annualize(p.trailer_capex_eur, 0.0, p.trailer_lifetime_years, wacc) +
                 annualize(p.tractor_capex_eur, 0.0, p.tractor_lifetime_years, wacc);
  double motion = 0.0;
  if (p.mode == TransportMode::Truck)
    motion = p.driver_eur_per_h * p.operating_hours +
             p.fuel_mwh_per_km * 2.0 * distance_km * p.fuel_eur_per_mwh * trips;
  else
    motion = p.freight_eur_per_km * 2.0 * distance_km * trips;

  TransportUnitEconomics out;
  out.effective_capacity = loaded * eff;
  out.delivery_efficiency = eff;
  if (opt.variable_motion_costs) {
    out.unit_cost_per_year = stock;
    out.variable_cost_per_mwh = motion / loaded;
  } else {
    out.unit_cost_per_year = stock + motion;
  }
  return out;
}

/// One pipeline of the reference capacity used as an integer unit.
inline TransportUnitEconomics pipeline_unit(const PipelineParams& p, double distance_km, double wacc,
                                            bool variable_motion_costs = false) {
  if (distance_km < 0.0) throw std::invalid_argument("pipeline_unit: negative distance");
  const double flow = p.annual_throughput_mwh * p.capacity_factor;
  const double eff = std::max(0.0, 1.0 - p.loss_per_100km * distance_km / 100.0);
  const double electricity_per_mwh = p.electricity_mwh_per_mwh_km * distance_km * p.electricity_eur_per_mwh;
  TransportUnitEconomics out;
  out.unit_cost_per_year = annualize(p.capex_eur_per_km * distance_km, p.opex_frac, p.lifetime_years, wacc);
  if (variable_motion_costs)
    out.variable_cost_per_mwh = electricity_per_mwh;
  else
    out.unit_cost_per_year += electricity_per_mwh * flow;
  out.effective_capacity = flow * eff;
  out.delivery_efficiency = eff;
  return out;
}

/// A terminal conversion plant billed per MWh of input.
struct ConversionStep {
  double efficiency = 1.0;
  double cost_per_input_mwh = 0.0;
};

/// capex in €/kW of output capacity, power demand per unit output.
inline ConversionStep conversion_step(double capex_eur_per_kw, double opex_frac, double lifetime_years,
                                      double efficiency, double power_demand, double wacc,
                                      double full_load_hours, double electricity_eur_per_mwh) {
  ConversionStep s;
  s.efficiency = efficiency;
  const double per_output =
      annualize(capex_eur_per_kw * 1000.0, opex_frac, lifetime_years, wacc) / full_load_hours +
      power_demand * electricity_eur_per_mwh;
  s.cost_per_input_mwh = per_output * efficiency;
  return s;
}

struct ConversionTechs {
  ConversionStep cracking;
  ConversionStep regasification;
  ConversionStep haber_bosch;
};

struct ChainEfficiency {
  double efficiency = 1.0;
  double conversion_cost_per_mwh = 0.0;  ///< per MWh transported
};

/// Terminal chain for a delivered commodity. LH2 bound for an ammonia
/// consumer is regasified and then synthesised.
inline ChainEfficiency chain_efficiency(Commodity imported, TransportMode mode, Product desired,
                                        double delivery_efficiency, const ConversionTechs& techs) {
  if (!is_valid_pairing(imported, mode))
    throw InvalidPairing(std::string(short_label(imported)) + " by " + std::string(to_string(mode)));
  double eff = 1.0;
  double cost = 0.0;
  auto apply = [&](const ConversionStep& s) {
    cost += eff * s.cost_per_input_mwh;
    eff *= s.efficiency;
  };
  eff = delivery_efficiency;
  switch (imported) {
    case Commodity::Ammonia:
      if (desired == Product::Hydrogen) apply(techs.cracking);
      break;
    case Commodity::LiquidHydrogen:
      apply(techs.regasification);
      if (desired == Product::Ammonia) apply(techs.haber_bosch);
      break;
    case Commodity::GaseousHydrogen:
      if (desired == Product::Ammonia) apply(techs.haber_bosch);
      break;
  }
  return {eff, cost};
}

}  // namespace greenchain

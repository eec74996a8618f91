#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "greenchain/lp_solver.hpp"
#include "greenchain/parallel.hpp"
#include "greenchain/scenario.hpp"
#include "greenchain/transport_costs.hpp"

namespace greenchain {

enum class CostComponent {
  Electricity,
  Battery,
  Electrolysis,
  Conversion,
  Desalination,
  InlandTransport,
  InternationalTransport,
  StorageTank,
};

inline constexpr std::array<CostComponent, 8> kAllComponents{
    CostComponent::Electricity,     CostComponent::Battery,
    CostComponent::Electrolysis,    CostComponent::Conversion,
    CostComponent::Desalination,    CostComponent::InlandTransport,
    CostComponent::InternationalTransport, CostComponent::StorageTank};

inline std::string_view to_string(CostComponent c) {
  switch (c) {
    case CostComponent::Electricity: return "electricity";
    case CostComponent::Battery: return "battery";
    case CostComponent::Electrolysis: return "electrolysis";
    case CostComponent::Conversion: return "conversion";
    case CostComponent::Desalination: return "desalination";
    case CostComponent::InlandTransport: return "inland_transport";
    case CostComponent::InternationalTransport: return "international_transport";
    case CostComponent::StorageTank: return "storage_tank";
  }
  return "?";
}

/// €/MWh of commodity per cost component.
struct Components {
  std::array<double, 8> value{};

  double& operator[](CostComponent c) { return value[static_cast<std::size_t>(c)]; }
  double operator[](CostComponent c) const { return value[static_cast<std::size_t>(c)]; }
  double total() const {
    double s = 0.0;
    for (double v : value) s += v;
    return s;
  }
  bool operator==(const Components&) const = default;
};

inline double combined_conversion_efficiency(double eta_el, double eta_conv, double q_conv) {
  return eta_conv / (1.0 + q_conv * eta_conv * eta_el);
}

/// Cost and efficiency inputs of one site's production chain.
struct ChainCosts {
  double res_eur_per_mw = 0.0;  ///< annualized, per MW and year
  double battery_eur_per_mw = 0.0;
  double electrolyzer_eur_per_mw = 0.0;
  double conversion_eur_per_mw = 0.0;
  bool has_conversion = false;
  double eta_el = 1.0;
  double eta_conv = 1.0;
  double q_conv = 0.0;
  double eta_new = 1.0;
  double eta_batt = 1.0;
  double e2p_hours = 6.0;
  double desalination_eur_per_mwh_h2 = 0.0;
  double inland_eur_per_mwh_h2 = 0.0;
  double international_eur_per_mwh = 0.0;
  double tank_eur_per_mwh = 0.0;
  ElectrolyzerBound bound = ElectrolyzerBound::Combined;
  /// Small cost per MWh charged or discharged. Curtailment is free, so without
  /// it cycling the battery in the same hour ties with curtailing.
  double battery_throughput_eur_per_mwh = 1e-4;

  /// Variable cost per MWh of commodity.
  double variable_eur_per_mwh() const {
    return (desalination_eur_per_mwh_h2 + inland_eur_per_mwh_h2) / eta_new + international_eur_per_mwh +
           tank_eur_per_mwh;
  }
};

/// Whether a country's sites can deliver the commodity to the border.
inline bool site_supplies(const Scenario& s, const SiteKey& site, Commodity c) {
  const auto* fin = s.find_finance(site.country);
  if (!fin) return false;
  if (c == Commodity::GaseousHydrogen) return fin->pipeline_reachable();
  return fin->ship_distance_km.has_value();
}

inline ChainCosts chain_costs(const Scenario& s, const SiteKey& site, Commodity c, int year) {
  const auto& fin = s.finance_for(site.country);
  const double w = fin.wacc;
  ChainCosts k;
  const auto& res = s.tech(site.technology, year);
  k.res_eur_per_mw = annualize(res.capex_eur_per_kw * 1000.0 * fin.capex_index, res.opex_frac, res.lifetime_years, w);
  const auto& batt = s.storage_for(StorageKind::Battery, year);
  k.eta_batt = batt.efficiency;
  k.e2p_hours = batt.e2p_hours;
  k.battery_eur_per_mw = annualize(batt.capex_eur_per_mwh * batt.e2p_hours, batt.opex_frac, batt.lifetime_years, w);
  const auto& el = s.tech(Technology::Electrolysis, year);
  k.eta_el = el.efficiency;
  k.electrolyzer_eur_per_mw = annualize(el.capex_eur_per_kw * 1000.0, el.opex_frac, el.lifetime_years, w);
  if (c != Commodity::GaseousHydrogen) {
    const auto& conv = s.tech(c == Commodity::Ammonia ? Technology::HaberBosch : Technology::Liquefaction, year);
    k.has_conversion = true;
    k.eta_conv = conv.efficiency;
    k.q_conv = conv.power_demand;
    k.conversion_eur_per_mw = annualize(conv.capex_eur_per_kw * 1000.0, conv.opex_frac, conv.lifetime_years, w);
  }
  k.eta_new = combined_conversion_efficiency(k.eta_el, k.eta_conv, k.q_conv);
  k.desalination_eur_per_mwh_h2 = s.constants.desalination_eur_per_mwh;
  k.inland_eur_per_mwh_h2 =
      pipeline_cost_per_mwh(s.pipeline(PipelineScope::DomesticGH2), site.shore_band * kShoreBandKm, w);
  const double importer = s.constants.importer_wacc;
  if (c == Commodity::GaseousHydrogen) {
    if (!fin.pipeline_distance_km)
      throw CrossRefError("country '" + site.country + "' is not pipeline-reachable");
    k.international_eur_per_mwh =
        pipeline_cost_per_mwh(s.pipeline(PipelineScope::InternationalGH2), *fin.pipeline_distance_km, importer);
  } else {
    if (!fin.ship_distance_km) throw CrossRefError("country '" + site.country + "' has no ship distance");
    k.international_eur_per_mwh = ship_unit_cost(s.ship(c), *fin.ship_distance_km, importer);
    k.tank_eur_per_mwh =
        s.storage_for(c == Commodity::Ammonia ? StorageKind::TankNH3 : StorageKind::TankLH2, year).tank_eur_per_mwh;
  }
  k.bound = s.constants.electrolyzer_bound;
  return k;
}

/// Column and row positions of one site inside an LP.
struct SiteLpLayout {
  static constexpr int kPerHour = 5;
  enum Offset { QRes = 0, QIn = 1, QOut = 2, Soc = 3, QConv = 4 };

  int cap_res = -1, cap_batt = -1, cap_el = -1, cap_conv = -1;
  int first_hour_column = -1;
  int hours = 0;
  int output_row = -1;

  int hourly(int h, Offset o) const { return first_hour_column + h * kPerHour + o; }
};

struct SiteLpOptions {
  double output_mwh = kHoursPerYear;  ///< normalization of annual output
  bool allow_battery = true;
};

struct SiteLp {
  lp::LpProblem problem;
  SiteLpLayout layout;
};

namespace detail {

/// Adds one site's capacity and hourly variables with their plant constraints.
/// Returns the layout; the caller adds the output coupling.
inline SiteLpLayout add_site_block(lp::LpProblem& p, const ResourceProfile& prof, const ChainCosts& k,
                                   double cap_res_upper, bool allow_battery, const std::string& prefix) {
  using lp::RowSense;
  SiteLpLayout L;
  L.hours = static_cast<int>(prof.hours.size());
  L.cap_res = p.add_column(prefix + "CAP_RES", k.res_eur_per_mw, 0.0, cap_res_upper);
  L.cap_batt = p.add_column(prefix + "CAP_Batt", k.battery_eur_per_mw, 0.0, allow_battery ? lp::kInf : 0.0);
  L.cap_el = p.add_column(prefix + "CAP_El", k.electrolyzer_eur_per_mw);
  if (k.has_conversion) L.cap_conv = p.add_column(prefix + "CAP_Conv", k.conversion_eur_per_mw);
  const double var = k.variable_eur_per_mwh();
  const double el_eta = k.bound == ElectrolyzerBound::Combined ? k.eta_new : k.eta_conv;
  const double yield = k.eta_el * k.eta_new;
  for (int h = 0; h < L.hours; ++h) {
    const auto& hs = prof.hours[h];
    const std::string t = "_" + std::to_string(h + 1);
    const int qres = p.add_column(prefix + "Q_RES" + t, 0.0, 0.0, hs.capacity_factor > 0 ? lp::kInf : 0.0);
    const double wear = hs.weight * k.battery_throughput_eur_per_mwh;
    const int qin = p.add_column(prefix + "Q_in" + t, wear, 0.0, allow_battery ? lp::kInf : 0.0);
    const int qout = p.add_column(prefix + "Q_out" + t, wear, 0.0, allow_battery ? lp::kInf : 0.0);
    const int soc = p.add_column(prefix + "SOC" + t, 0.0, 0.0, h == 0 ? 0.0 : lp::kInf);
    const int qconv = p.add_column(prefix + "Q_conv" + t, hs.weight * var);
    if (h == 0) L.first_hour_column = qres;

    p.add_row(prefix + "balance" + t, RowSense::Equal, 0.0,
              {{qconv, 1.0}, {qres, -yield}, {qin, yield}, {qout, -yield}});
    if (hs.capacity_factor > 0)
      p.add_row(prefix + "res_cap" + t, RowSense::LessEqual, 0.0, {{qres, 1.0}, {L.cap_res, -hs.capacity_factor}});
    p.add_row(prefix + "el_cap" + t, RowSense::LessEqual, 0.0, {{qconv, 1.0 / el_eta}, {L.cap_el, -1.0}});
    if (k.has_conversion)
      p.add_row(prefix + "conv_cap" + t, RowSense::LessEqual, 0.0, {{qconv, 1.0 / k.eta_conv}, {L.cap_conv, -1.0}});
    p.add_row(prefix + "charge_cap" + t, RowSense::LessEqual, 0.0, {{qin, 1.0}, {L.cap_batt, -1.0}});
    p.add_row(prefix + "discharge_cap" + t, RowSense::LessEqual, 0.0, {{qout, 1.0}, {L.cap_batt, -1.0}});
    p.add_row(prefix + "soc_cap" + t, RowSense::LessEqual, 0.0, {{soc, 1.0}, {L.cap_batt, -k.e2p_hours}});
    std::vector<std::pair<int, double>> rec{{soc, 1.0}, {qin, -k.eta_batt}, {qout, 1.0 / k.eta_batt}};
    if (h > 0) rec.emplace_back(soc - SiteLpLayout::kPerHour, -1.0);
    p.add_row(prefix + "soc_balance" + t, RowSense::Equal, 0.0, rec);
  }
  return L;
}

inline std::vector<std::pair<int, double>> output_terms(const ResourceProfile& prof, const SiteLpLayout& L) {
  std::vector<std::pair<int, double>> terms;
  for (int h = 0; h < L.hours; ++h) terms.emplace_back(L.hourly(h, SiteLpLayout::QConv), prof.hours[h].weight);
  return terms;
}

}  // namespace detail

/// Unit-cost LP of one site: annual output is pinned to `output_mwh` and
/// renewable capacity is free, so the optimum is the cheapest design per MWh.
inline SiteLp build_site_lp(const ResourceProfile& prof, const ChainCosts& k, SiteLpOptions opt = {}) {
  SiteLp s;
  s.layout = detail::add_site_block(s.problem, prof, k, lp::kInf, opt.allow_battery, "");
  s.layout.output_row =
      s.problem.add_row("output", lp::RowSense::Equal, opt.output_mwh, detail::output_terms(prof, s.layout));
  return s;
}

struct HourlyTrajectory {
  std::vector<double> q_res, q_in, q_out, soc, q_conv;
};

/// Output block beyond the base design once renewable capacity is at its potential.
struct SupplySegment {
  double quantity_mwh = 0.0;
  double marginal_cost = 0.0;
  Components components;
};

struct PlantDesign {
  SiteKey site;
  Commodity commodity = Commodity::Ammonia;
  int year = 2030;
  // Capacities per MW of renewable capacity.
  double cap_res_mw = 1.0;
  double cap_batt_mw = 0.0;
  double cap_el_mw = 0.0;
  double cap_conv_mw = 0.0;
  double annual_output_mwh = 0.0;  ///< per MW renewable
  double unit_cost = 0.0;
  Components components;
  double potential_mw = 0.0;
  double max_annual_output_mwh = 0.0;
  std::vector<SupplySegment> extensions;
  HourlyTrajectory hourly;  ///< per MW renewable
  ChainCosts costs;
};

struct SizingOptions {
  bool allow_battery = true;
  bool extensions = true;
  lp::SolverOptions solver;
};

namespace detail {

inline Components segment_components(const ChainCosts& k, const SiteLpLayout& L, const ResourceProfile& prof,
                                     const std::vector<double>& x) {
  Components c;
  c[CostComponent::Electricity] = k.res_eur_per_mw * x[L.cap_res];
  c[CostComponent::Battery] = k.battery_eur_per_mw * x[L.cap_batt];
  c[CostComponent::Electrolysis] = k.electrolyzer_eur_per_mw * x[L.cap_el];
  if (L.cap_conv >= 0) c[CostComponent::Conversion] = k.conversion_eur_per_mw * x[L.cap_conv];
  double out = 0.0, cycled = 0.0;
  for (int h = 0; h < L.hours; ++h) {
    const double w = prof.hours[h].weight;
    out += w * x[L.hourly(h, SiteLpLayout::QConv)];
    cycled += w * (x[L.hourly(h, SiteLpLayout::QIn)] + x[L.hourly(h, SiteLpLayout::QOut)]);
  }
  c[CostComponent::Battery] += k.battery_throughput_eur_per_mwh * cycled;
  c[CostComponent::Desalination] = k.desalination_eur_per_mwh_h2 / k.eta_new * out;
  c[CostComponent::InlandTransport] = k.inland_eur_per_mwh_h2 / k.eta_new * out;
  c[CostComponent::InternationalTransport] = k.international_eur_per_mwh * out;
  c[CostComponent::StorageTank] = k.tank_eur_per_mwh * out;
  return c;
}

}  // namespace detail

inline PlantDesign size_plant(const ResourceProfile& prof, const ChainCosts& k, Commodity commodity, int year,
                              const SizingOptions& opt = {}) {
  if (prof.weighted_full_load_hours() <= 0.0 || prof.hours.empty())
    throw DegenerateSite("site " + to_string(prof.site) + " has no renewable output");
  SiteLpOptions lpo;
  lpo.allow_battery = opt.allow_battery;
  auto site = build_site_lp(prof, k, lpo);
  const auto& L = site.layout;
  lp::RevisedSimplex solver(site.problem, opt.solver);
  auto st = solver.solve();
  if (st != lp::LpStatus::Optimal)
    throw NumericalFailure("site " + to_string(prof.site) + " LP is " + lp::to_string(st));
  auto sol = solver.solution();
  const double cres = sol.primal[L.cap_res];
  if (!(cres > 0.0)) throw DegenerateSite("site " + to_string(prof.site) + " sized to zero capacity");

  PlantDesign d;
  d.site = prof.site;
  d.commodity = commodity;
  d.year = year;
  d.costs = k;
  d.cap_batt_mw = sol.primal[L.cap_batt] / cres;
  d.cap_el_mw = sol.primal[L.cap_el] / cres;
  d.cap_conv_mw = L.cap_conv >= 0 ? sol.primal[L.cap_conv] / cres : 0.0;
  d.annual_output_mwh = lpo.output_mwh / cres;
  d.unit_cost = sol.objective_value / lpo.output_mwh;
  d.components = detail::segment_components(k, L, prof, sol.primal);
  for (auto& v : d.components.value) v /= lpo.output_mwh;
  d.potential_mw = prof.potential_mw;
  d.max_annual_output_mwh = d.annual_output_mwh * prof.potential_mw;
  auto& hr = d.hourly;
  for (int h = 0; h < L.hours; ++h) {
    hr.q_res.push_back(sol.primal[L.hourly(h, SiteLpLayout::QRes)] / cres);
    hr.q_in.push_back(sol.primal[L.hourly(h, SiteLpLayout::QIn)] / cres);
    hr.q_out.push_back(sol.primal[L.hourly(h, SiteLpLayout::QOut)] / cres);
    hr.soc.push_back(sol.primal[L.hourly(h, SiteLpLayout::Soc)] / cres);
    hr.q_conv.push_back(sol.primal[L.hourly(h, SiteLpLayout::QConv)] / cres);
  }

  if (opt.extensions) {
    solver.set_column_bounds(L.cap_res, cres, cres);
    if (solver.solve() != lp::LpStatus::Optimal)
      throw NumericalFailure("site " + to_string(prof.site) + " LP lost optimality at fixed capacity");
    auto segs = solver.parametric_rhs(L.output_row);
    const double min_len = 1e-10 * lpo.output_mwh;
    for (const auto& s : segs) {
      if (s.length <= min_len) continue;
      SupplySegment e;
      e.quantity_mwh = s.length / cres * prof.potential_mw;
      e.marginal_cost = s.slope;
      e.components = detail::segment_components(k, L, prof, s.direction);
      auto& ext = d.extensions;
      if (!ext.empty() && std::abs(ext.back().marginal_cost - e.marginal_cost) <= 1e-12 * std::abs(e.marginal_cost)) {
        auto& b = ext.back();
        const double q = b.quantity_mwh + e.quantity_mwh;
        for (std::size_t c = 0; c < b.components.value.size(); ++c)
          b.components.value[c] = q > 0 ? (b.components.value[c] * b.quantity_mwh +
                                           e.components.value[c] * e.quantity_mwh) / q
                                        : b.components.value[c];
        b.quantity_mwh = q;
        continue;
      }
      e.marginal_cost = std::max(e.marginal_cost, ext.empty() ? d.unit_cost : ext.back().marginal_cost);
      ext.push_back(e);
    }
    if (prof.potential_mw <= 0.0) d.extensions.clear();
  }
  return d;
}

inline PlantDesign size_plant(const Scenario& s, const ResourceProfile& prof, Commodity c, int year,
                              const SizingOptions& opt = {}) {
  auto o = opt;
  o.extensions = opt.extensions && s.constants.supply_curve_extensions;
  return size_plant(prof, chain_costs(s, prof.site, c, year), c, year, o);
}

/// Largest violation of each plant equation on the retained hourly trajectory.
struct PlantResiduals {
  double balance = 0.0;        ///< energy balance
  double res_cap = 0.0;        ///< renewable availability
  double electrolyzer = 0.0;   ///< electrolyzer capacity
  double conversion = 0.0;     ///< conversion capacity
  double charge = 0.0;         ///< battery power
  double soc_cap = 0.0;        ///< battery energy
  double soc_balance = 0.0;    ///< state-of-charge recursion
  double soc_first = 0.0;      ///< initial state of charge
  double simultaneous = 0.0;   ///< min(charge, discharge) per hour
  double output = 0.0;         ///< |weighted output - annual_output|
};

inline PlantResiduals plant_residuals(const PlantDesign& d, const ResourceProfile& prof) {
  PlantResiduals r;
  const auto& k = d.costs;
  const auto& t = d.hourly;
  const double el_eta = k.bound == ElectrolyzerBound::Combined ? k.eta_new : k.eta_conv;
  double out = 0.0;
  for (std::size_t h = 0; h < t.q_conv.size(); ++h) {
    auto up = [](double& acc, double v) { acc = std::max(acc, v); };
    up(r.balance, std::abs(t.q_conv[h] - (t.q_res[h] - t.q_in[h] + t.q_out[h]) * k.eta_el * k.eta_new));
    up(r.res_cap, t.q_res[h] - d.cap_res_mw * prof.hours[h].capacity_factor);
    up(r.electrolyzer, t.q_conv[h] / el_eta - d.cap_el_mw);
    if (k.has_conversion) up(r.conversion, t.q_conv[h] / k.eta_conv - d.cap_conv_mw);
    up(r.charge, std::max(t.q_in[h], t.q_out[h]) - d.cap_batt_mw);
    up(r.soc_cap, t.soc[h] - k.e2p_hours * d.cap_batt_mw);
    const double prev = h == 0 ? 0.0 : t.soc[h - 1];
    up(r.soc_balance, std::abs(t.soc[h] - prev - t.q_in[h] * k.eta_batt + t.q_out[h] / k.eta_batt));
    up(r.simultaneous, std::min(t.q_in[h], t.q_out[h]));
    for (double v : {t.q_res[h], t.q_in[h], t.q_out[h], t.soc[h], t.q_conv[h]}) up(r.balance, -v);
    out += prof.hours[h].weight * t.q_conv[h];
  }
  r.soc_first = t.soc.empty() ? 0.0 : std::abs(t.soc.front());
  r.output = std::abs(out - d.annual_output_mwh);
  return r;
}

struct SupplyStep {
  SiteKey site;
  int segment = 0;  ///< 0 is the base design, k > 0 the k-th extension
  double quantity_mwh = 0.0;
  double marginal_cost = 0.0;
  Components components;
  double cumulative_mwh = 0.0;
};

struct SupplyCurve {
  Commodity commodity = Commodity::Ammonia;
  int year = 2030;
  std::vector<SupplyStep> steps;

  double total_mwh() const { return steps.empty() ? 0.0 : steps.back().cumulative_mwh; }
};

inline SupplyCurve build_supply_curve(const std::vector<PlantDesign>& designs) {
  SupplyCurve curve;
  if (!designs.empty()) {
    curve.commodity = designs.front().commodity;
    curve.year = designs.front().year;
  }
  for (const auto& d : designs) {
    if (d.commodity != curve.commodity || d.year != curve.year)
      throw std::invalid_argument("build_supply_curve: designs mix commodities or years");
    if (d.max_annual_output_mwh > 0)
      curve.steps.push_back({d.site, 0, d.max_annual_output_mwh, d.unit_cost, d.components, 0.0});
    for (std::size_t e = 0; e < d.extensions.size(); ++e)
      if (d.extensions[e].quantity_mwh > 0)
        curve.steps.push_back({d.site, static_cast<int>(e) + 1, d.extensions[e].quantity_mwh,
                               d.extensions[e].marginal_cost, d.extensions[e].components, 0.0});
  }
  std::sort(curve.steps.begin(), curve.steps.end(), [](const SupplyStep& a, const SupplyStep& b) {
    if (a.marginal_cost != b.marginal_cost) return a.marginal_cost < b.marginal_cost;
    if (a.site != b.site) return a.site < b.site;
    return a.segment < b.segment;
  });
  double cum = 0.0;
  for (auto& s : curve.steps) {
    cum += s.quantity_mwh;
    s.cumulative_mwh = cum;
  }
  return curve;
}

struct BorderPrice {
  Commodity commodity = Commodity::Ammonia;
  int year = 2030;
  double demand_mwh = 0.0;
  double price = 0.0;
  SiteKey marginal_site;
  int marginal_segment = 0;
  Components marginal_components;
  std::map<std::string, double> supplier_mix;  ///< MWh per country
  std::vector<double> step_mix;                 ///< MWh per curve step
};

inline BorderPrice price_at(const SupplyCurve& curve, double demand_mwh) {
  if (!(demand_mwh >= 0.0)) throw std::invalid_argument("price_at: demand must be >= 0");
  const double total = curve.total_mwh();
  if (curve.steps.empty() || demand_mwh > total)
    throw DemandExceedsSupply("demand " + std::to_string(demand_mwh / 1e6) + " TWh exceeds supply " +
                              std::to_string(total / 1e6) + " TWh for " + std::string(to_string(curve.commodity)));
  std::size_t k = 0;
  while (k + 1 < curve.steps.size() && curve.steps[k].cumulative_mwh < demand_mwh) ++k;
  BorderPrice p;
  p.commodity = curve.commodity;
  p.year = curve.year;
  p.demand_mwh = demand_mwh;
  const auto& m = curve.steps[k];
  p.price = m.marginal_cost;
  p.marginal_site = m.site;
  p.marginal_segment = m.segment;
  p.marginal_components = m.components;
  p.step_mix.assign(curve.steps.size(), 0.0);
  double before = 0.0;
  for (std::size_t i = 0; i <= k; ++i) {
    const double q = i < k ? curve.steps[i].quantity_mwh : demand_mwh - before;
    before += curve.steps[i].quantity_mwh;
    if (q <= 0) continue;
    p.step_mix[i] = q;
    p.supplier_mix[curve.steps[i].site.country] += q;
  }
  return p;
}

struct PriceDecomposition {
  Components marginal;
  Components average;
};

inline PriceDecomposition decompose_price(const SupplyCurve& curve, double demand_mwh) {
  auto p = price_at(curve, demand_mwh);
  PriceDecomposition d;
  d.marginal = p.marginal_components;
  if (demand_mwh <= 0.0) {
    d.average = d.marginal;
    return d;
  }
  for (std::size_t i = 0; i < p.step_mix.size(); ++i)
    for (std::size_t c = 0; c < d.average.value.size(); ++c)
      d.average.value[c] += p.step_mix[i] * curve.steps[i].components.value[c] / demand_mwh;
  return d;
}

struct SiteModelInput {
  ResourceProfile profile;
  ChainCosts costs;
};

struct MonolithicLp {
  lp::LpProblem problem;
  int demand_row = -1;
  std::vector<SiteLpLayout> blocks;
};

/// All sites in one LP coupled by the demand row.
inline MonolithicLp build_monolithic_lp(const std::vector<SiteModelInput>& sites, double demand_mwh) {
  MonolithicLp m;
  std::vector<std::pair<int, double>> demand_terms;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const auto& s = sites[i];
    auto L = detail::add_site_block(m.problem, s.profile, s.costs, s.profile.potential_mw, true,
                                    "s" + std::to_string(i) + "_");
    for (auto t : detail::output_terms(s.profile, L)) demand_terms.push_back(t);
    m.blocks.push_back(L);
  }
  m.demand_row = m.problem.add_row("demand", lp::RowSense::Equal, demand_mwh, demand_terms);
  for (auto& b : m.blocks) b.output_row = m.demand_row;
  return m;
}

inline double dual_price(const lp::LpSolution& solution, const MonolithicLp& m) {
  if (solution.status != lp::LpStatus::Optimal) throw NumericalFailure("monolithic LP is not optimal");
  return solution.duals.at(m.demand_row);
}

/// Sizes every eligible site for one commodity and year. Sites without
/// renewable output are skipped and reported through `skipped`.
inline std::vector<PlantDesign> size_sites(const Scenario& s, Commodity c, int year, int jobs,
                                           std::vector<std::string>* skipped = nullptr) {
  std::vector<const ResourceProfile*> eligible;
  for (const auto& p : s.profiles)
    if (site_supplies(s, p.site, c)) eligible.push_back(&p);
  auto results = parallel_map(jobs, eligible.size(), [&](std::size_t i) -> std::optional<PlantDesign> {
    try {
      return size_plant(s, *eligible[i], c, year);
    } catch (const DegenerateSite&) {
      return std::nullopt;
    }
  });
  std::vector<PlantDesign> out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i])
      out.push_back(std::move(*results[i]));
    else if (skipped)
      skipped->push_back(to_string(eligible[i]->site));
  }
  return out;
}

}  // namespace greenchain

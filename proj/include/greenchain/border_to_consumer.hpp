#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "greenchain/scenario.hpp"
#include "greenchain/transport_costs.hpp"

namespace greenchain {

struct DistributionOption {
  Commodity imported = Commodity::Ammonia;
  TransportMode mode = TransportMode::Truck;
  std::string consumer;
  double distance_km = 0.0;
  double unit_cost_per_year = 0.0;       ///< per integer unit
  double effective_capacity = 0.0;       ///< MWh transported per unit and year
  double procurement_price = 0.0;        ///< €/MWh at the border
  double storage_cost_per_mwh = 0.0;     ///< per MWh transported
  double conversion_cost_per_mwh = 0.0;  ///< per MWh transported
  double variable_cost_per_mwh = 0.0;    ///< per MWh transported
  double chain_eff = 1.0;                ///< delivered useful MWh per MWh transported
  bool valid = true;

  /// Cost per MWh transported excluding the unit investment.
  double rate() const {
    return procurement_price + storage_cost_per_mwh + conversion_cost_per_mwh + variable_cost_per_mwh;
  }
  std::string label() const {
    return std::string(short_label(imported)) + "_" + std::string(to_string(mode));
  }
};

using BorderPriceSet = std::map<Commodity, double>;

/// Consumer storage rate per MWh moved through an on-site tank.
inline double consumer_storage_rate(const Scenario& s, Commodity c, int year) {
  if (c == Commodity::GaseousHydrogen) return 0.0;
  const auto& t = s.storage_for(c == Commodity::Ammonia ? StorageKind::TankNH3 : StorageKind::TankLH2, year);
  return annualize(t.capex_eur_per_mwh, t.opex_frac, t.lifetime_years, s.constants.importer_wacc) /
         s.constants.consumer_storage_turnovers;
}

inline ConversionTechs conversion_techs(const Scenario& s, int year) {
  const auto& k = s.constants;
  auto step = [&](Technology t) {
    const auto& c = s.tech(t, year);
    return conversion_step(c.capex_eur_per_kw, c.opex_frac, c.lifetime_years, c.efficiency, c.power_demand,
                           k.importer_wacc, k.conversion_full_load_hours, k.electricity_eur_per_mwh);
  };
  return {step(Technology::Cracking), step(Technology::Regasification), step(Technology::HaberBosch)};
}

inline std::vector<DistributionOption> build_options(const ConsumerSite& consumer, const BorderPriceSet& prices,
                                                     const Scenario& s, int year) {
  std::vector<DistributionOption> out;
  const auto techs = conversion_techs(s, year);
  const double wacc = s.constants.importer_wacc;
  LandsideOptions lo;
  lo.daily_boiloff = s.constants.landside_daily_boiloff;
  lo.variable_motion_costs = s.constants.variable_motion_costs_per_mwh;
  for (Commodity c : kAllCommodities) {
    for (TransportMode m : kAllModes) {
      if (!is_valid_pairing(c, m)) continue;
      const auto dist = consumer.distance(c, m);
      if (!dist) continue;
      auto price = prices.find(c);
      if (price == prices.end())
        throw CrossRefError("no border price for " + std::string(to_string(c)) + " " + std::to_string(year));
      DistributionOption o;
      o.imported = c;
      o.mode = m;
      o.consumer = consumer.name;
      o.distance_km = *dist;
      TransportUnitEconomics u;
      if (m == TransportMode::Pipeline) {
        const auto scope = c == Commodity::Ammonia ? PipelineScope::DomesticNH3 : PipelineScope::DomesticGH2;
        u = pipeline_unit(s.pipeline(scope), *dist, wacc, lo.variable_motion_costs);
      } else {
        u = landside_unit(s.landside_for(m, c, year), *dist, wacc, lo);
        o.storage_cost_per_mwh = consumer_storage_rate(s, c, year);
      }
      o.unit_cost_per_year = u.unit_cost_per_year;
      // Capacity counts loaded MWh; chain_eff carries the transit losses.
      o.effective_capacity = u.delivery_efficiency > 0 ? u.effective_capacity / u.delivery_efficiency : 0.0;
      o.variable_cost_per_mwh = u.variable_cost_per_mwh;
      const auto chain = chain_efficiency(c, m, consumer.desired_product, u.delivery_efficiency, techs);
      o.chain_eff = chain.efficiency;
      o.conversion_cost_per_mwh = chain.conversion_cost_per_mwh;
      o.procurement_price = price->second;
      o.valid = o.chain_eff > 0.0 && o.effective_capacity > 0.0;
      out.push_back(o);
    }
  }
  if (out.empty()) throw NoFeasibleOption("consumer '" + consumer.name + "' has no available mode");
  return out;
}

struct OptionAllocation {
  long units = 0;
  double transported_mwh = 0.0;
  double procured_mwh = 0.0;
  double delivered_mwh = 0.0;
};

struct PlanBreakdown {
  double procurement = 0.0;
  double transport = 0.0;
  double storage = 0.0;
  double conversion = 0.0;
  double total() const { return procurement + transport + storage + conversion; }
};

struct DistributionPlan {
  std::string consumer;
  int year = 0;
  double demand_mwh = 0.0;
  std::vector<OptionAllocation> allocation;  ///< parallel to the option list
  double total_cost = 0.0;
  PlanBreakdown breakdown;
  double delivered_mwh = 0.0;
  long nodes = 0;  ///< branch-and-bound nodes or enumerated vectors
};

namespace detail {

/// Largest useful unit count of one option.
inline long unit_bound(const DistributionOption& o, double demand) {
  if (!o.valid || demand <= 0.0) return 0;
  return static_cast<long>(std::ceil(demand / (o.chain_eff * o.effective_capacity)));
}

/// Cost per delivered MWh of flow on an option once its units are paid.
inline double delivered_rate(const DistributionOption& o) { return o.rate() / o.chain_eff; }

/// Options sorted by delivered rate, ties by position.
inline std::vector<int> fill_order(const std::vector<DistributionOption>& opts) {
  std::vector<int> idx(opts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (!opts[a].valid || !opts[b].valid) return opts[a].valid && !opts[b].valid;
    return delivered_rate(opts[a]) < delivered_rate(opts[b]);
  });
  return idx;
}

/// Optimal flows for fixed unit counts. Returns +inf when the units cannot
/// carry the demand.
inline double fill(const std::vector<DistributionOption>& opts, const std::vector<int>& order,
                   const std::vector<long>& units, double demand, std::vector<double>* flows) {
  double cost = 0.0;
  for (std::size_t o = 0; o < opts.size(); ++o) cost += units[o] * opts[o].unit_cost_per_year;
  if (flows) flows->assign(opts.size(), 0.0);
  double need = demand;
  for (int o : order) {
    if (need <= 0.0) break;
    if (!opts[o].valid || units[o] == 0) continue;
    const double cap = units[o] * opts[o].effective_capacity;
    const double q = std::min(cap, need / opts[o].chain_eff);
    cost += q * opts[o].rate();
    need -= q * opts[o].chain_eff;
    if (flows) (*flows)[o] = q;
  }
  if (need > 1e-12 * demand) return std::numeric_limits<double>::infinity();
  return cost;
}

inline DistributionPlan make_plan(const std::vector<DistributionOption>& opts, const std::vector<long>& units,
                                  const std::vector<double>& flows, double demand) {
  DistributionPlan p;
  p.consumer = opts.empty() ? "" : opts.front().consumer;
  p.demand_mwh = demand;
  p.allocation.resize(opts.size());
  for (std::size_t o = 0; o < opts.size(); ++o) {
    auto& a = p.allocation[o];
    const auto& op = opts[o];
    a.units = units[o];
    a.transported_mwh = flows[o];
    a.procured_mwh = flows[o];
    a.delivered_mwh = flows[o] * op.chain_eff;
    p.breakdown.procurement += a.procured_mwh * op.procurement_price;
    p.breakdown.transport += a.units * op.unit_cost_per_year + a.transported_mwh * op.variable_cost_per_mwh;
    p.breakdown.storage += a.transported_mwh * op.storage_cost_per_mwh;
    p.breakdown.conversion += a.transported_mwh * op.conversion_cost_per_mwh;
    p.delivered_mwh += a.delivered_mwh;
  }
  p.total_cost = p.breakdown.total();
  return p;
}

/// Keeps the cheapest unit vector; equal costs go to the lexicographically smaller one.
struct Incumbent {
  double cost = std::numeric_limits<double>::infinity();
  std::vector<long> units;

  static bool same(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }
  void offer(double c, const std::vector<long>& u) {
    if (!std::isfinite(c)) return;
    if (units.empty() || (c < cost && !same(c, cost)) || (same(c, cost) && u < units)) {
      cost = c;
      units = u;
    }
  }
};

inline void check_options(const std::vector<DistributionOption>& opts, double demand) {
  if (!(demand >= 0.0) || !std::isfinite(demand)) throw std::invalid_argument("demand must be finite and >= 0");
  for (const auto& o : opts) {
    if (!o.valid) continue;
    if (!(o.chain_eff > 0.0 && o.chain_eff <= 1.0)) throw std::invalid_argument("chain efficiency outside (0, 1]");
    if (!(o.effective_capacity > 0.0)) throw std::invalid_argument("effective capacity must be > 0");
    if (o.unit_cost_per_year < 0 || o.rate() < 0 || o.procurement_price < 0 || o.storage_cost_per_mwh < 0 ||
        o.conversion_cost_per_mwh < 0 || o.variable_cost_per_mwh < 0)
      throw std::invalid_argument("option costs must be >= 0");
  }
}

}  // namespace detail

/// Global optimum of the integer unit choice by depth-first branch-and-bound.
inline DistributionPlan optimize_plan(const std::vector<DistributionOption>& opts, double demand) {
  detail::check_options(opts, demand);
  const std::size_t n = opts.size();
  std::vector<long> zero(n, 0);
  if (demand == 0.0) return detail::make_plan(opts, zero, std::vector<double>(n, 0.0), 0.0);
  if (std::none_of(opts.begin(), opts.end(), [](const auto& o) { return o.valid; }))
    throw NoFeasibleOption("no valid distribution option");

  const auto order = detail::fill_order(opts);
  std::vector<long> ub(n);
  for (std::size_t o = 0; o < n; ++o) ub[o] = detail::unit_bound(opts[o], demand);

  // Segment of the relaxation: delivered capacity at a cost per delivered MWh.
  struct Segment {
    double rate;
    double capacity;
    int option;
    bool paid;
  };
  struct Node {
    std::vector<long> lo, hi;
  };
  detail::Incumbent best;
  long nodes = 0;
  std::vector<Node> stack{{zero, ub}};
  std::vector<Segment> segs;
  std::vector<double> frac_units(n);
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    ++nodes;
    // Relaxation: lower-bound units are paid up front and carry flow at the
    // plain rate; units above it cost their investment spread over capacity.
    double bound = 0.0;
    segs.clear();
    for (std::size_t o = 0; o < n; ++o) {
      const auto& op = opts[o];
      if (!op.valid || node.hi[o] == 0) continue;
      bound += node.lo[o] * op.unit_cost_per_year;
      const double cap = op.effective_capacity * op.chain_eff;
      if (node.lo[o] > 0) segs.push_back({detail::delivered_rate(op), node.lo[o] * cap, static_cast<int>(o), true});
      if (node.hi[o] > node.lo[o])
        segs.push_back({(op.rate() + op.unit_cost_per_year / op.effective_capacity) / op.chain_eff,
                        (node.hi[o] - node.lo[o]) * cap, static_cast<int>(o), false});
    }
    std::stable_sort(segs.begin(), segs.end(), [](const Segment& a, const Segment& b) { return a.rate < b.rate; });
    double need = demand;
    std::fill(frac_units.begin(), frac_units.end(), 0.0);
    for (std::size_t o = 0; o < n; ++o) frac_units[o] = static_cast<double>(node.lo[o]);
    for (const auto& s : segs) {
      if (need <= 0.0) break;
      const double take = std::min(need, s.capacity);
      bound += take * s.rate;
      need -= take;
      if (!s.paid) {
        const auto& op = opts[s.option];
        frac_units[s.option] += take / (op.effective_capacity * op.chain_eff);
      }
    }
    if (need > 1e-12 * demand) continue;
    if (std::isfinite(best.cost) && bound > best.cost && !detail::Incumbent::same(bound, best.cost)) continue;

    // Rounded-up relaxation is always feasible and seeds the incumbent.
    std::vector<long> rounded(n);
    int branch = -1;
    for (std::size_t o = 0; o < n; ++o) {
      const double f = frac_units[o];
      const double r = std::round(f);
      const bool integral = std::abs(f - r) <= 1e-11 * std::max(1.0, f);
      rounded[o] = std::min(node.hi[o], static_cast<long>(integral ? r : std::ceil(f)));
      rounded[o] = std::max(rounded[o], node.lo[o]);
      if (!integral && branch < 0) branch = static_cast<int>(o);
    }
    best.offer(detail::fill(opts, order, rounded, demand, nullptr), rounded);
    if (branch < 0) continue;

    const long down = static_cast<long>(std::floor(frac_units[branch]));
    Node up_node = node, down_node = std::move(node);
    up_node.lo[branch] = down + 1;
    down_node.hi[branch] = down;
    // Down branch is explored first.
    stack.push_back(std::move(up_node));
    stack.push_back(std::move(down_node));
  }
  if (best.units.empty()) throw NumericalFailure("branch-and-bound found no feasible plan");
  std::vector<double> flows;
  detail::fill(opts, order, best.units, demand, &flows);
  auto plan = detail::make_plan(opts, best.units, flows, demand);
  plan.nodes = nodes;
  return plan;
}

/// Exhaustive enumeration of every unit vector within the per-option bounds.
inline DistributionPlan brute_force_plan(const std::vector<DistributionOption>& opts, double demand) {
  detail::check_options(opts, demand);
  const std::size_t n = opts.size();
  std::vector<long> ub(n);
  double product = 1.0;
  for (std::size_t o = 0; o < n; ++o) {
    ub[o] = detail::unit_bound(opts[o], demand);
    product *= static_cast<double>(ub[o] + 1);
  }
  if (product > 1e6) throw InstanceTooLarge("brute force over " + std::to_string(product) + " unit vectors");
  std::vector<long> zero(n, 0);
  if (demand == 0.0) return detail::make_plan(opts, zero, std::vector<double>(n, 0.0), 0.0);
  if (std::none_of(opts.begin(), opts.end(), [](const auto& o) { return o.valid; }))
    throw NoFeasibleOption("no valid distribution option");
  const auto order = detail::fill_order(opts);
  detail::Incumbent best;
  std::vector<long> u(n, 0);
  long count = 0;
  while (true) {
    ++count;
    best.offer(detail::fill(opts, order, u, demand, nullptr), u);
    std::size_t k = 0;
    while (k < n && u[k] == ub[k]) u[k++] = 0;
    if (k == n) break;
    ++u[k];
  }
  if (best.units.empty()) throw NumericalFailure("no feasible unit vector");
  std::vector<double> flows;
  detail::fill(opts, order, best.units, demand, &flows);
  auto plan = detail::make_plan(opts, best.units, flows, demand);
  plan.nodes = count;
  return plan;
}

struct PlanCostPerMwh {
  double total = 0.0;
  double procurement = 0.0;
  double transport = 0.0;
  double storage = 0.0;
  double conversion = 0.0;
};

inline PlanCostPerMwh cost_breakdown(const DistributionPlan& plan, const std::vector<DistributionOption>& opts) {
  if (plan.allocation.size() != opts.size())
    throw std::invalid_argument("cost_breakdown: plan and options differ in size");
  PlanCostPerMwh c;
  if (plan.delivered_mwh <= 0.0) return c;
  const double d = plan.delivered_mwh;
  c.procurement = plan.breakdown.procurement / d;
  c.transport = plan.breakdown.transport / d;
  c.storage = plan.breakdown.storage / d;
  c.conversion = plan.breakdown.conversion / d;
  c.total = plan.total_cost / d;
  return c;
}

/// Option carrying the largest delivered share, or -1 for an empty plan.
inline int dominant_option(const DistributionPlan& plan) {
  int best = -1;
  for (std::size_t o = 0; o < plan.allocation.size(); ++o)
    if (plan.allocation[o].delivered_mwh > 0 &&
        (best < 0 || plan.allocation[o].delivered_mwh > plan.allocation[best].delivered_mwh))
      best = static_cast<int>(o);
  return best;
}

}  // namespace greenchain

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "greenchain/border_to_consumer.hpp"
#include "greenchain/csv.hpp"
#include "greenchain/well_to_border.hpp"

namespace greenchain {

using json = nlohmann::ordered_json;

struct RunManifest {
  std::string command;
  std::string scenario_hash;
  std::string tool_version;
  std::string timestamp;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::string> notes;

  json to_json() const {
    json j;
    j["command"] = command;
    j["scenario_hash"] = scenario_hash;
    j["tool_version"] = tool_version;
    j["timestamp"] = timestamp;
    json f = json::object();
    for (const auto& [k, v] : flags) f[k] = v;
    j["flags"] = f;
    j["notes"] = notes;
    return j;
  }

  /// Comment lines stamped on every CSV. The timestamp lives only in the
  /// manifest so reports stay byte-identical across reruns.
  void stamp(csv::Writer& w) const {
    w.add_comment("scenario_hash: " + scenario_hash);
    w.add_comment("generator: greenchain " + tool_version + " " + command);
  }
};

inline json components_json(const Components& c) {
  json j = json::object();
  for (auto k : kAllComponents) j[std::string(to_string(k))] = c[k];
  return j;
}

inline std::vector<std::string> component_headers() {
  std::vector<std::string> h;
  for (auto k : kAllComponents) h.emplace_back(std::string(to_string(k)) + "_eur_per_mwh");
  return h;
}

/// Steps up to `extent_mwh` of cumulative supply; 0 keeps the full curve.
inline csv::Writer supply_curve_csv(const SupplyCurve& curve, double extent_mwh, const RunManifest& m) {
  std::vector<std::string> header{"rank", "country", "technology", "class", "band", "segment",
                                  "quantity_mwh", "cumulative_mwh", "marginal_cost_eur_per_mwh"};
  for (auto& h : component_headers()) header.push_back(h);
  csv::Writer w(header);
  m.stamp(w);
  w.add_comment("commodity: " + std::string(to_string(curve.commodity)) + ", year: " + std::to_string(curve.year));
  double before = 0.0;
  int rank = 0;
  for (const auto& s : curve.steps) {
    if (extent_mwh > 0 && before >= extent_mwh) break;
    before = s.cumulative_mwh;
    std::vector<std::string> row{std::to_string(++rank),
                                 s.site.country,
                                 std::string(to_string(s.site.technology)),
                                 std::to_string(s.site.resource_class),
                                 std::to_string(s.site.shore_band),
                                 std::to_string(s.segment),
                                 csv::format_number(s.quantity_mwh),
                                 csv::format_number(s.cumulative_mwh),
                                 csv::format_number(s.marginal_cost)};
    for (auto k : kAllComponents) row.push_back(csv::format_number(s.components[k]));
    w.add_row(std::move(row));
  }
  return w;
}

inline json border_price_json(const BorderPrice& p, const PriceDecomposition& d) {
  json j;
  j["commodity"] = std::string(to_string(p.commodity));
  j["year"] = p.year;
  j["demand_mwh"] = p.demand_mwh;
  j["price_eur_per_mwh"] = p.price;
  j["marginal_site"] = to_string(p.marginal_site);
  j["marginal_segment"] = p.marginal_segment;
  j["marginal_components"] = components_json(d.marginal);
  j["average_components"] = components_json(d.average);
  json mix = json::object();
  for (const auto& [country, q] : p.supplier_mix) mix[country] = q;
  j["supplier_mix_mwh"] = mix;
  return j;
}

struct ConsumerResult {
  ConsumerSite consumer;
  int year = 0;
  std::vector<DistributionOption> options;
  DistributionPlan plan;
  PlanCostPerMwh per_mwh;
};

inline std::string plan_units(const DistributionPlan& plan, const std::vector<DistributionOption>& opts) {
  std::string s;
  for (std::size_t o = 0; o < opts.size(); ++o) {
    if (plan.allocation[o].units == 0 && plan.allocation[o].transported_mwh == 0) continue;
    if (!s.empty()) s += ';';
    s += opts[o].label() + ":" + std::to_string(plan.allocation[o].units);
  }
  return s;
}

inline std::string dominant_label(const DistributionPlan& plan, const std::vector<DistributionOption>& opts) {
  const int d = dominant_option(plan);
  return d < 0 ? "none" : opts[d].label();
}

inline csv::Writer consumer_costs_csv(const std::vector<ConsumerResult>& rows, const RunManifest& m) {
  csv::Writer w({"site", "product", "year", "demand_gwh", "mode", "units", "total_eur_per_mwh",
                 "procurement_eur_per_mwh", "transport_eur_per_mwh", "storage_eur_per_mwh",
                 "conversion_eur_per_mwh", "total_cost_eur"});
  m.stamp(w);
  for (const auto& r : rows)
    w.add_row({r.consumer.name, std::string(to_string(r.consumer.desired_product)), std::to_string(r.year),
               csv::format_number(r.plan.demand_mwh / 1e3), dominant_label(r.plan, r.options),
               plan_units(r.plan, r.options), csv::format_number(r.per_mwh.total),
               csv::format_number(r.per_mwh.procurement), csv::format_number(r.per_mwh.transport),
               csv::format_number(r.per_mwh.storage), csv::format_number(r.per_mwh.conversion),
               csv::format_number(r.plan.total_cost)});
  return w;
}

struct SweepCell {
  double demand_gwh = 0.0;
  double distance_km = 0.0;
  std::vector<DistributionOption> options;
  DistributionPlan plan;
  PlanCostPerMwh per_mwh;

  std::string mode() const { return dominant_label(plan, options); }
};

inline csv::Writer modes_csv(const std::vector<SweepCell>& cells, Product product, int year, const RunManifest& m) {
  csv::Writer w({"product", "year", "demand_gwh", "distance_km", "mode", "units", "total_eur_per_mwh",
                 "procurement_eur_per_mwh", "transport_eur_per_mwh", "storage_eur_per_mwh",
                 "conversion_eur_per_mwh"});
  m.stamp(w);
  for (const auto& c : cells)
    w.add_row({std::string(to_string(product)), std::to_string(year), csv::format_number(c.demand_gwh),
               csv::format_number(c.distance_km), c.mode(), plan_units(c.plan, c.options),
               csv::format_number(c.per_mwh.total), csv::format_number(c.per_mwh.procurement),
               csv::format_number(c.per_mwh.transport), csv::format_number(c.per_mwh.storage),
               csv::format_number(c.per_mwh.conversion)});
  return w;
}

/// Demand rows by distance columns of €/MWh delivered.
inline csv::Writer heatmap_csv(const std::vector<SweepCell>& cells, const std::vector<double>& demands,
                               const std::vector<double>& distances, const RunManifest& m) {
  std::vector<std::string> header{"demand_gwh"};
  for (double d : distances) header.push_back("km_" + csv::format_number(d));
  csv::Writer w(header);
  m.stamp(w);
  for (std::size_t i = 0; i < demands.size(); ++i) {
    std::vector<std::string> row{csv::format_number(demands[i])};
    for (std::size_t j = 0; j < distances.size(); ++j)
      row.push_back(csv::format_number(cells.at(i * distances.size() + j).per_mwh.total));
    w.add_row(std::move(row));
  }
  return w;
}

}  // namespace greenchain

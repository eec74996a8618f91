#pragma once

#include <array>
#include <cctype>
#include <compare>
#include <string>
#include <string_view>

#include "greenchain/error.hpp"

namespace greenchain {

enum class Commodity { Ammonia, LiquidHydrogen, GaseousHydrogen };

inline constexpr std::array<Commodity, 3> kAllCommodities{
    Commodity::Ammonia, Commodity::LiquidHydrogen, Commodity::GaseousHydrogen};

enum class Technology {
  PV,
  WindOnshore,
  WindOffshoreShallow,
  WindOffshoreDeep,
  Electrolysis,
  HaberBosch,
  Liquefaction,
  Cracking,
  Regasification,
};

inline constexpr std::array<Technology, 9> kAllTechnologies{
    Technology::PV,           Technology::WindOnshore,  Technology::WindOffshoreShallow,
    Technology::WindOffshoreDeep, Technology::Electrolysis, Technology::HaberBosch,
    Technology::Liquefaction, Technology::Cracking,     Technology::Regasification};

enum class StorageKind { Battery, SaltCavernGH2, TankNH3, TankLH2 };

inline constexpr std::array<StorageKind, 4> kAllStorageKinds{
    StorageKind::Battery, StorageKind::SaltCavernGH2, StorageKind::TankNH3, StorageKind::TankLH2};

enum class TransportMode { Truck, Rail, Pipeline };

inline constexpr std::array<TransportMode, 3> kAllModes{TransportMode::Truck, TransportMode::Rail,
                                                        TransportMode::Pipeline};

/// What a consumer site wants delivered.
enum class Product { Ammonia, Hydrogen };

inline bool is_renewable(Technology t) {
  return t == Technology::PV || t == Technology::WindOnshore ||
         t == Technology::WindOffshoreShallow || t == Technology::WindOffshoreDeep;
}

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

inline std::string_view to_string(Commodity c) {
  switch (c) {
    case Commodity::Ammonia: return "ammonia";
    case Commodity::LiquidHydrogen: return "liquid_hydrogen";
    case Commodity::GaseousHydrogen: return "gaseous_hydrogen";
  }
  return "?";
}

/// Short chemical label used in mode names and reports.
inline std::string_view short_label(Commodity c) {
  switch (c) {
    case Commodity::Ammonia: return "NH3";
    case Commodity::LiquidHydrogen: return "LH2";
    case Commodity::GaseousHydrogen: return "GH2";
  }
  return "?";
}

inline Commodity parse_commodity(std::string_view s) {
  const auto v = detail::lower(s);
  if (v == "ammonia" || v == "nh3") return Commodity::Ammonia;
  if (v == "liquid_hydrogen" || v == "lh2") return Commodity::LiquidHydrogen;
  if (v == "gaseous_hydrogen" || v == "gh2") return Commodity::GaseousHydrogen;
  throw SchemaViolation("unknown commodity '" + std::string(s) + "'");
}

inline std::string_view to_string(Technology t) {
  switch (t) {
    case Technology::PV: return "pv";
    case Technology::WindOnshore: return "wind_onshore";
    case Technology::WindOffshoreShallow: return "wind_offshore_shallow";
    case Technology::WindOffshoreDeep: return "wind_offshore_deep";
    case Technology::Electrolysis: return "electrolysis";
    case Technology::HaberBosch: return "haber_bosch";
    case Technology::Liquefaction: return "liquefaction";
    case Technology::Cracking: return "cracking";
    case Technology::Regasification: return "regasification";
  }
  return "?";
}

inline Technology parse_technology(std::string_view s) {
  const auto v = detail::lower(s);
  for (auto t : kAllTechnologies)
    if (to_string(t) == v) return t;
  throw SchemaViolation("unknown technology '" + std::string(s) + "'");
}

inline std::string_view to_string(StorageKind k) {
  switch (k) {
    case StorageKind::Battery: return "battery";
    case StorageKind::SaltCavernGH2: return "salt_cavern_gh2";
    case StorageKind::TankNH3: return "tank_nh3";
    case StorageKind::TankLH2: return "tank_lh2";
  }
  return "?";
}

inline StorageKind parse_storage_kind(std::string_view s) {
  const auto v = detail::lower(s);
  for (auto k : kAllStorageKinds)
    if (to_string(k) == v) return k;
  throw SchemaViolation("unknown storage kind '" + std::string(s) + "'");
}

inline std::string_view to_string(TransportMode m) {
  switch (m) {
    case TransportMode::Truck: return "truck";
    case TransportMode::Rail: return "rail";
    case TransportMode::Pipeline: return "pipeline";
  }
  return "?";
}

inline std::string_view display_name(TransportMode m) {
  switch (m) {
    case TransportMode::Truck: return "Truck";
    case TransportMode::Rail: return "Rail";
    case TransportMode::Pipeline: return "Pipeline";
  }
  return "?";
}

inline TransportMode parse_mode(std::string_view s) {
  const auto v = detail::lower(s);
  if (v == "truck") return TransportMode::Truck;
  if (v == "rail") return TransportMode::Rail;
  if (v == "pipeline") return TransportMode::Pipeline;
  throw SchemaViolation("unknown transport mode '" + std::string(s) + "'");
}

inline std::string_view to_string(Product p) {
  return p == Product::Ammonia ? "ammonia" : "hydrogen";
}

inline Product parse_product(std::string_view s) {
  const auto v = detail::lower(s);
  if (v == "ammonia" || v == "nh3") return Product::Ammonia;
  if (v == "hydrogen" || v == "h2") return Product::Hydrogen;
  throw SchemaViolation("unknown product '" + std::string(s) + "'");
}

/// The commodity a product is when it arrives without conversion.
inline bool delivers_directly(Commodity c, Product p) {
  if (p == Product::Ammonia) return c == Commodity::Ammonia;
  return c == Commodity::GaseousHydrogen;
}

/// Valid (commodity, mode) pairings: NH3 by truck/rail/pipeline, LH2 by
/// truck/rail, GH2 by pipeline.
inline bool is_valid_pairing(Commodity c, TransportMode m) {
  switch (c) {
    case Commodity::Ammonia: return true;
    case Commodity::LiquidHydrogen: return m != TransportMode::Pipeline;
    case Commodity::GaseousHydrogen: return m == TransportMode::Pipeline;
  }
  return false;
}

struct SiteKey {
  std::string country;
  Technology technology = Technology::PV;
  int resource_class = 1;
  int shore_band = 0;

  auto operator<=>(const SiteKey&) const = default;
  bool operator==(const SiteKey&) const = default;
};

inline std::string to_string(const SiteKey& k) {
  return k.country + "_" + std::string(to_string(k.technology)) + "_" +
         std::to_string(k.resource_class) + "_" + std::to_string(k.shore_band);
}

inline constexpr double kHoursPerYear = 8760.0;
inline constexpr double kShoreBandKm = 250.0;

}  // namespace greenchain

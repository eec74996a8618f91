#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "greenchain/error.hpp"
#include "greenchain/scenario_io.hpp"

namespace gc = greenchain;
namespace fs = std::filesystem;

namespace {

const fs::path kDesk = fs::path(GREENCHAIN_DATA_DIR) / "desk_scale";

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("gc_scn_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

fs::path copy_desk(const TempDir& t) {
  auto dst = t.path() / "scn";
  fs::copy(kDesk, dst, fs::copy_options::recursive);
  return dst;
}

void replace_in(const fs::path& file, const std::string& from, const std::string& to) {
  auto text = gc::csv::read_file(file);
  auto pos = text.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  text.replace(pos, from.size(), to);
  std::ofstream(file, std::ios::binary) << text;
}

void append_to(const fs::path& file, const std::string& line) {
  std::ofstream(file, std::ios::app | std::ios::binary) << line;
}

}  // namespace

TEST(Scenario, BundledDataLoadsClean) {
  auto s = gc::load_scenario(kDesk);
  EXPECT_EQ(s.name, "desk_scale");
  EXPECT_EQ(s.years, (std::vector<int>{2030, 2040}));
  EXPECT_EQ(s.commodities.size(), 3u);
  EXPECT_EQ(s.profiles.size(), 8u);
  for (const auto& f : gc::validate_scenario(s)) EXPECT_NE(f.severity, gc::Severity::Error) << gc::format_finding(f);
  for (const auto& p : s.profiles) {
    double w = 0.0;
    for (const auto& h : p.hours) w += h.weight;
    EXPECT_NEAR(w, gc::kHoursPerYear, 1e-6);
  }
}

TEST(Scenario, SaveLoadRoundTripIsExact) {
  TempDir t;
  auto s = gc::load_scenario(kDesk);
  gc::save_scenario(s, t.path() / "copy");
  auto back = gc::load_scenario(t.path() / "copy");
  EXPECT_TRUE(back == s);
  EXPECT_EQ(gc::scenario_hash(back), gc::scenario_hash(s));
  EXPECT_EQ(gc::serialize_scenario(back), gc::serialize_scenario(s));
}

TEST(Scenario, HashIgnoresFormattingButTracksValues) {
  TempDir t;
  auto dir = copy_desk(t);
  const auto base = gc::scenario_hash(gc::load_scenario(kDesk));
  append_to(dir / "countries.csv", "\n# trailing comment\n");
  replace_in(dir / "countries.csv", "0.075", "0.0750");
  EXPECT_EQ(gc::scenario_hash(gc::load_scenario(dir)), base);
  replace_in(dir / "countries.csv", "0.0750", "0.076");
  EXPECT_NE(gc::scenario_hash(gc::load_scenario(dir)), base);
}

TEST(Scenario, MissingDirectoryAndFile) {
  EXPECT_THROW(gc::load_scenario("/nonexistent/scenario"), gc::MissingFile);
  TempDir t;
  auto dir = copy_desk(t);
  fs::remove(dir / "storage.csv");
  EXPECT_THROW(gc::load_scenario(dir), gc::MissingFile);
}

TEST(Scenario, UnknownConfigKeyIsSchemaViolation) {
  TempDir t;
  auto dir = copy_desk(t);
  append_to(dir / "scenario.conf", "\ncolour = green\n");
  EXPECT_THROW(gc::load_scenario(dir), gc::SchemaViolation);
}

TEST(Scenario, MissingColumnIsSchemaViolation) {
  TempDir t;
  auto dir = copy_desk(t);
  replace_in(dir / "countries.csv", "capex_index", "capex_idx");
  EXPECT_THROW(gc::load_scenario(dir), gc::SchemaViolation);
}

TEST(Scenario, NonNumericCellIsSchemaViolation) {
  TempDir t;
  auto dir = copy_desk(t);
  replace_in(dir / "demand.csv", "306", "lots");
  try {
    gc::load_scenario(dir);
    FAIL();
  } catch (const gc::SchemaViolation& e) {
    EXPECT_NE(std::string(e.what()).find("demand.csv"), std::string::npos) << e.what();
  }
}

TEST(Scenario, OutOfRangeValueIsUnitError) {
  TempDir t;
  auto dir = copy_desk(t);
  replace_in(dir / "countries.csv", "0.075", "1.5");
  EXPECT_THROW(gc::load_scenario(dir), gc::UnitError);
}

TEST(Scenario, ProfileWeightsMustSumToYear) {
  auto s = gc::load_scenario(kDesk);
  s.profiles[0].hours[0].weight += 1.0;
  auto findings = gc::validate_scenario(s);
  ASSERT_TRUE(gc::has_errors(findings));
  EXPECT_EQ(findings.front().kind, gc::FindingKind::Unit);
  EXPECT_NE(findings.front().message.find("8760"), std::string::npos);
}

TEST(Scenario, CapacityFactorOutsideUnitInterval) {
  auto s = gc::load_scenario(kDesk);
  s.profiles[1].hours[5].capacity_factor = 1.2;
  EXPECT_TRUE(gc::has_errors(gc::validate_scenario(s)));
}

TEST(Scenario, UnknownCountryIsCrossRefError) {
  auto s = gc::load_scenario(kDesk);
  s.profiles[0].site.country = "atlantis";
  auto findings = gc::validate_scenario(s);
  ASSERT_TRUE(gc::has_errors(findings));
  EXPECT_THROW(gc::throw_on_errors(findings), gc::CrossRefError);
}

TEST(Scenario, MissingYearDemandIsCrossRefError) {
  auto s = gc::load_scenario(kDesk);
  s.demand.pop_back();
  EXPECT_THROW(gc::throw_on_errors(gc::validate_scenario(s)), gc::CrossRefError);
}

TEST(Scenario, ConsumerWithoutModesIsRejected) {
  auto s = gc::load_scenario(kDesk);
  auto& c = s.consumers.front();
  c.dist_truck_km = c.dist_rail_km = c.dist_gh2pipe_km = c.dist_nh3pipe_km = std::nullopt;
  EXPECT_THROW(gc::throw_on_errors(gc::validate_scenario(s)), gc::CrossRefError);
}

TEST(Scenario, UnsupportedYearIsRejected) {
  auto s = gc::load_scenario(kDesk);
  s.years.push_back(2035);
  EXPECT_TRUE(gc::has_errors(gc::validate_scenario(s)));
}

TEST(Scenario, FindingsAreDeterministic) {
  auto s = gc::load_scenario(kDesk);
  s.profiles[0].potential_mw = -1.0;
  s.finance[0].wacc = 2.0;
  EXPECT_EQ(gc::validate_scenario(s), gc::validate_scenario(s));
  EXPECT_GE(gc::validate_scenario(s).size(), 2u);
}

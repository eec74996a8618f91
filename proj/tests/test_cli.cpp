#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "greenchain/csv.hpp"
#include "greenchain/scenario_io.hpp"

namespace gc = greenchain;
namespace fs = std::filesystem;

namespace {

const fs::path kDesk = fs::path(GREENCHAIN_DATA_DIR) / "desk_scale";
const fs::path kGolden = GREENCHAIN_GOLDEN_DIR;

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string("\"") + GREENCHAIN_CLI + "\" " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path fresh_dir(const std::string& tag) {
  std::random_device rd;
  auto p = fs::temp_directory_path() / ("gc_cli_" + tag + "_" + std::to_string(rd()));
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) { return gc::csv::read_file(p); }

std::string without_timestamps(std::string text) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    if (line.find("\"timestamp\"") == std::string::npos) out += line + "\n";
    pos = nl + 1;
  }
  return out;
}

// Desk data folded to one representative day per site so runs take a second.
fs::path small_scenario(const fs::path& root) {
  auto s = gc::load_scenario(kDesk);
  s.name = "desk_day";
  for (auto& p : s.profiles) {
    std::vector<gc::HourSample> day(24);
    std::vector<int> count(24, 0);
    for (std::size_t h = 0; h < p.hours.size(); ++h) {
      day[h % 24].capacity_factor += p.hours[h].capacity_factor;
      ++count[h % 24];
    }
    for (int h = 0; h < 24; ++h) {
      day[h].capacity_factor /= count[h];
      day[h].weight = gc::kHoursPerYear / 24;
    }
    p.hours = day;
  }
  auto dir = root / "desk_day";
  gc::save_scenario(s, dir);
  return dir;
}

int data_rows(const fs::path& csv_path) {
  auto t = gc::csv::Table::parse(slurp(csv_path), csv_path.filename().string(), {});
  return static_cast<int>(t.rows().size());
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fresh_dir("small");
    small_ = small_scenario(root_);
    wtb_ = root_ / "wtb";
    wtb_run_ = run("wtb " + q(small_) + " --out " + q(wtb_));
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path root_, small_, wtb_;
  static CliResult wtb_run_;
};

fs::path Cli::root_, Cli::small_, Cli::wtb_;
CliResult Cli::wtb_run_;

}  // namespace

TEST_F(Cli, VersionAndUsage) {
  auto v = run("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("1.0.0"), std::string::npos);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("sweep " + q(small_) + " --year 2030 --product methanol").code, 1);
}

TEST_F(Cli, ValidateBundledData) {
  auto r = run("validate " + q(kDesk));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("valid:"), std::string::npos);
}

TEST_F(Cli, ValidateCorruptCsvNamesFileAndRow) {
  auto dir = root_ / "corrupt";
  fs::copy(kDesk, dir, fs::copy_options::recursive);
  std::ofstream(dir / "countries.csv", std::ios::app) << "west,abc,1,100,\n";
  auto r = run("validate " + q(dir));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("countries.csv:4"), std::string::npos) << r.out;
}

TEST_F(Cli, ValidateOutOfRangeListsFinding) {
  auto dir = root_ / "range";
  fs::copy(kDesk, dir, fs::copy_options::recursive);
  auto text = slurp(dir / "demand.csv");
  text.replace(text.find("306"), 3, "-306");
  gc::csv::write_file(dir / "demand.csv", text);
  auto r = run("validate " + q(dir));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("demand.csv"), std::string::npos) << r.out;
}

TEST_F(Cli, ValidateMissingProfilesIsIoError) {
  auto dir = root_ / "noprofiles";
  fs::copy(kDesk, dir, fs::copy_options::recursive);
  fs::remove_all(dir / "profiles");
  EXPECT_EQ(run("validate " + q(dir)).code, 2);
  EXPECT_EQ(run("validate " + q(root_ / "nowhere")).code, 2);
}

TEST_F(Cli, WtbWritesPricesAndCurves) {
  ASSERT_EQ(wtb_run_.code, 0) << wtb_run_.out;
  const auto doc = nlohmann::json::parse(slurp(wtb_ / "prices.json"));
  EXPECT_EQ(doc["prices"].size(), 6u);
  const auto hash = gc::scenario_hash(gc::load_scenario(small_));
  EXPECT_EQ(doc["manifest"]["scenario_hash"], hash);
  for (const char* c : {"ammonia", "liquid_hydrogen", "gaseous_hydrogen"})
    for (int y : {2030, 2040}) {
      auto f = wtb_ / ("supply_curve_" + std::string(c) + "_" + std::to_string(y) + ".csv");
      ASSERT_TRUE(fs::exists(f)) << f;
      EXPECT_NE(slurp(f).find("# scenario_hash: " + hash), std::string::npos);
      EXPECT_GT(data_rows(f), 0);
    }
  for (const auto& p : doc["prices"]) {
    double mix = 0;
    for (const auto& [k, v] : p["supplier_mix_mwh"].items()) mix += v.get<double>();
    EXPECT_NEAR(mix, p["demand_mwh"].get<double>(), 1e-6 * mix);
  }
}

TEST_F(Cli, WtbRerunIsByteIdentical) {
  ASSERT_EQ(wtb_run_.code, 0);
  auto again = root_ / "wtb_again";
  ASSERT_EQ(run("-j 1 wtb " + q(small_) + " --out " + q(again)).code, 0);
  for (const auto& e : fs::directory_iterator(wtb_)) {
    const auto name = e.path().filename();
    if (name.extension() == ".csv") EXPECT_EQ(slurp(e.path()), slurp(again / name)) << name;
  }
  const auto a = nlohmann::json::parse(slurp(wtb_ / "prices.json"));
  const auto b = nlohmann::json::parse(slurp(again / "prices.json"));
  EXPECT_EQ(a["prices"], b["prices"]);
  EXPECT_EQ(without_timestamps(slurp(wtb_ / "prices.json")).size() > 0, true);
}

TEST_F(Cli, WtbDemandBeyondSupplyFails) {
  auto r = run("wtb " + q(small_) + " --year 2030 --demand-twh 1e9 --out " + q(root_ / "huge"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("exceeds supply"), std::string::npos) << r.out;
}

TEST_F(Cli, BtcCostsEveryConsumer) {
  ASSERT_EQ(wtb_run_.code, 0);
  auto out = root_ / "btc";
  auto r = run("btc " + q(small_) + " --year 2030 --prices " + q(wtb_ / "prices.json") + " --out " + q(out));
  ASSERT_EQ(r.code, 0) << r.out;
  auto t = gc::csv::Table::parse(slurp(out / "consumer_costs.csv"), "consumer_costs.csv", {});
  EXPECT_EQ(t.rows().size(), 14u);
  for (const auto& row : t.rows()) {
    const double parts = row.number("procurement_eur_per_mwh") + row.number("transport_eur_per_mwh") +
                         row.number("storage_eur_per_mwh") + row.number("conversion_eur_per_mwh");
    EXPECT_NEAR(parts, row.number("total_eur_per_mwh"), 1e-9 * row.number("total_eur_per_mwh"));
  }
}

TEST_F(Cli, BtcZeroDemandConsumer) {
  ASSERT_EQ(wtb_run_.code, 0);
  auto s = gc::load_scenario(small_);
  s.consumers.front().demand_mwh[2030] = 0;
  auto dir = root_ / "zero_demand";
  gc::save_scenario(s, dir);
  auto out = root_ / "btc_zero";
  auto r = run("btc " + q(dir) + " --year 2030 --inline-wtb --out " + q(out));
  ASSERT_EQ(r.code, 0) << r.out;
  auto t = gc::csv::Table::parse(slurp(out / "consumer_costs.csv"), "consumer_costs.csv", {});
  const auto& row = t.rows().front();
  EXPECT_EQ(row.number("total_cost_eur"), 0.0);
  EXPECT_EQ(row.text("units"), "");
  EXPECT_EQ(row.text("mode"), "none");
}

TEST_F(Cli, BtcRejectsPricesFromAnotherScenario) {
  ASSERT_EQ(wtb_run_.code, 0);
  auto r = run("btc " + q(kDesk) + " --year 2030 --prices " + q(wtb_ / "prices.json") + " --out " +
               q(root_ / "mismatch"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("scenario"), std::string::npos) << r.out;
  EXPECT_EQ(run("btc " + q(small_) + " --year 2030 --out " + q(root_ / "noprices")).code, 1);
  EXPECT_EQ(run("btc " + q(small_) + " --year 2030 --prices " + q(root_ / "missing.json") + " --out " +
                q(root_ / "noprices")).code, 2);
}

TEST_F(Cli, SweepWritesFullGrid) {
  ASSERT_EQ(wtb_run_.code, 0);
  auto out = root_ / "sweep";
  auto r = run("sweep " + q(small_) + " --year 2040 --product ammonia --prices " + q(wtb_ / "prices.json") +
               " --out " + q(out));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(data_rows(out / "modes.csv"), 100);
  EXPECT_EQ(data_rows(out / "heatmap.csv"), 10);
  EXPECT_NE(slurp(out / "modes.csv").find("demand ladder"), std::string::npos);
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["command"], "sweep");
  EXPECT_FALSE(m["timestamp"].get<std::string>().empty());
}

// Full bundled run: border prices, then every sweep against its golden file.
// Set GREENCHAIN_UPDATE_GOLDEN=1 to rewrite the golden files.
TEST(CliGolden, BundledSweepsMatchGolden) {
  const auto root = fresh_dir("golden");
  const auto wtb = root / "wtb";
  auto r = run("wtb " + q(kDesk) + " --out " + q(wtb));
  ASSERT_EQ(r.code, 0) << r.out;
  const bool update = std::getenv("GREENCHAIN_UPDATE_GOLDEN") != nullptr;
  for (const char* product : {"ammonia", "hydrogen"})
    for (int year : {2030, 2040}) {
      const auto tag = std::string(product) + "_" + std::to_string(year);
      const auto out = root / tag;
      auto s = run("sweep " + q(kDesk) + " --year " + std::to_string(year) + " --product " + product +
                   " --prices " + q(wtb / "prices.json") + " --out " + q(out));
      ASSERT_EQ(s.code, 0) << s.out;
      const auto golden = kGolden / ("modes_" + tag + ".csv");
      if (update) {
        fs::copy_file(out / "modes.csv", golden, fs::copy_options::overwrite_existing);
        continue;
      }
      ASSERT_TRUE(fs::exists(golden)) << golden;
      EXPECT_EQ(slurp(out / "modes.csv"), slurp(golden)) << tag;
    }

  // Small hydrogen fueling stations are served by truck.
  auto b = run("btc " + q(kDesk) + " --year 2030 --prices " + q(wtb / "prices.json") + " --out " + q(root / "btc"));
  ASSERT_EQ(b.code, 0) << b.out;
  auto t = gc::csv::Table::parse(slurp(root / "btc" / "consumer_costs.csv"), "consumer_costs.csv", {});
  int stations = 0;
  for (const auto& row : t.rows())
    if (row.text("site").rfind("Fueling Station", 0) == 0) {
      ++stations;
      EXPECT_NE(row.text("mode").find("truck"), std::string::npos) << row.text("site") << " " << row.text("mode");
    }
  EXPECT_EQ(stations, 2);
  fs::remove_all(root);
}

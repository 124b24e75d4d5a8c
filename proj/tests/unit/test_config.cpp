#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "app.hpp"
#include "config.hpp"
#include "jpmsim/common.hpp"
#include "output.hpp"

using namespace jpmsim;
using namespace jpmsim::cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("jpmsim_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Quantity, units_scale_to_si) {
  EXPECT_DOUBLE_EQ(parse_quantity("780ns", Dim::time), 780e-9);
  EXPECT_DOUBLE_EQ(parse_quantity("6.6 us", Dim::time), 6.6e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("5.028GHz", Dim::frequency), 5.028e9);
  EXPECT_DOUBLE_EQ(parse_quantity("-12.3MHz", Dim::frequency), -12.3e6);
  EXPECT_DOUBLE_EQ(parse_quantity("1uA", Dim::current), 1e-6);
  EXPECT_DOUBLE_EQ(parse_quantity("1.1nH", Dim::inductance), 1.1e-9);
  EXPECT_DOUBLE_EQ(parse_quantity("2pF", Dim::capacitance), 2e-12);
  EXPECT_DOUBLE_EQ(parse_quantity("50ohm", Dim::resistance), 50.0);
  EXPECT_DOUBLE_EQ(parse_quantity("0.5phi0", Dim::flux), 0.5 * kFluxQuantum);
  EXPECT_DOUBLE_EQ(parse_quantity("180deg", Dim::angle), kPi);
  EXPECT_DOUBLE_EQ(parse_quantity("25/us", Dim::rate), 25e6);
  EXPECT_DOUBLE_EQ(parse_quantity("0.02", Dim::number), 0.02);
}

TEST(Quantity, units_are_mandatory_and_checked) {
  EXPECT_THROW(parse_quantity("780", Dim::time), ConfigError);
  EXPECT_THROW(parse_quantity("780GHz", Dim::time), ConfigError);
  EXPECT_THROW(parse_quantity("0.02ns", Dim::number), ConfigError);
  EXPECT_THROW(parse_quantity("ns", Dim::time), ConfigError);
  EXPECT_THROW(parse_quantity("", Dim::number), ConfigError);
}

TEST(Lists, literal_and_linspace) {
  EXPECT_EQ(parse_list("[1, 2, 5, 10]", Dim::number), (std::vector<double>{1, 2, 5, 10}));
  const auto l = parse_list("linspace(0ns, 100ns, 5)", Dim::time);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_DOUBLE_EQ(l[1], 25e-9);
  EXPECT_DOUBLE_EQ(l.back(), 100e-9);
  EXPECT_EQ(parse_list("linspace(3, 4, 1)", Dim::number), (std::vector<double>{3}));
  EXPECT_THROW(parse_list("[]", Dim::number), ConfigError);
  EXPECT_THROW(parse_list("linspace(0, 1, 0)", Dim::number), ConfigError);
  EXPECT_THROW(parse_list("[1ns, 2]", Dim::time), ConfigError);
  EXPECT_THROW(parse_list("1, 2", Dim::number), ConfigError);
}

TEST(Document, parses_comments_and_rejects_unknown_keys) {
  Config c;
  c.merge_document("# device\ndevice.loop_inductance = 2nH  # bigger loop\n\nseed = 7\n", "doc");
  EXPECT_DOUBLE_EQ(c.quantity("device.loop_inductance"), 2e-9);
  EXPECT_EQ(c.integer("seed"), 7);
  EXPECT_THROW(c.merge_document("device.loop = 2nH\n", "doc"), ConfigError);
  EXPECT_THROW(c.merge_document("no equals sign\n", "doc"), ConfigError);
  EXPECT_THROW(c.merge_document("output.format = xml\n", "doc"), ConfigError);
  try {
    c.merge_document("seed = 1\nprotocol.t1 = 6.6\n", "cfg.txt");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("cfg.txt:2"), std::string::npos);
  }
}

TEST(Document, keywords_and_overrides) {
  Config c;
  EXPECT_TRUE(c.is_keyword("protocol.depletion_rate"));
  c.apply_override("protocol.depletion_rate=75/us");
  EXPECT_FALSE(c.is_keyword("protocol.depletion_rate"));
  EXPECT_DOUBLE_EQ(c.quantity("protocol.depletion_rate"), 75e6);
  c.apply_override("protocol.relaxation = window-average");
  EXPECT_TRUE(c.is_keyword("protocol.relaxation"));
  EXPECT_THROW(c.apply_override("protocol.relaxation"), ConfigError);
  EXPECT_FALSE(c.has("device.mutual_inductance"));
}

TEST(Output, csv_header_and_number_format) {
  Table t;
  t.columns = {{"time", "ns"}, {"label", "-"}, {"value", "1"}};
  t.add({1.0 / 3.0, std::string("a"), std::monostate{}});
  t.add({-0.0, std::string("b"), 1e-20});
  EXPECT_EQ(to_csv(t), "time[ns],label[-],value[1]\n0.333333333333,a,\n0,b,1e-20\n");
}

TEST(Cli, exit_codes) {
  const fs::path dir = scratch("exit");
  EXPECT_EQ(run_cli({"ramsey", "--out", dir.string(), "--set", "ramsey.delay=[]"}).code, kConfigError);
  EXPECT_EQ(run_cli({"budget", "--out", dir.string(), "--set", "protocol.t1=6.6"}).code, kConfigError);
  EXPECT_EQ(run_cli({"budget", "--out", dir.string(), "--set", "nope=1"}).code, kConfigError);
  EXPECT_EQ(run_cli({"budget", "--out", dir.string(), "--set", "protocol.dark_prob=1.5"}).code, kConfigError);
  EXPECT_EQ(run_cli({"budget", "--config", (dir / "missing.cfg").string()}).code, kIoError);
  EXPECT_EQ(run_cli({"tomo-fit", "--out", dir.string(), "--set", "tomo.noise=none", "--set", "tomo.beta=0.5",
                     "--set", "tomo.r=0"})
                .code,
            kNumericalError);
  EXPECT_EQ(run_cli({}).code, kConfigError);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
  const CliRun empty = run_cli({"stark", "--out", dir.string(), "--set", "stark.powers=linspace(0,1,0)"});
  EXPECT_NE(empty.err.find("empty list"), std::string::npos);
}

TEST(Cli, budget_report) {
  const fs::path dir = scratch("budget");
  const CliRun r = run_cli({"budget", "--out", dir.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("F_raw 0.92"), std::string::npos);
  std::ifstream f(dir / "budget.csv");
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header.rfind("source[-],f_raw[1],", 0), 0u);
}

TEST(Cli, transfer_curves_family) {
  const fs::path dir = scratch("curves");
  const CliRun r = run_cli({"transfer-curves", "--out", dir.string(), "--set", "transfer.times=linspace(0,10,11)"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::ifstream f(dir / "transfer_kappa_mismatch.csv");
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "t_kappa1[1],efficiency[1],label[-]");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 44);
}

TEST(Cli, tomogram_round_trip_through_files) {
  const fs::path dir = scratch("tomo");
  ASSERT_EQ(run_cli({"tomo-synth", "--out", dir.string(), "--set", "tomo.noise=none"}).code, kOk);
  const CliRun fit = run_cli({"tomo-fit", "--out", dir.string(), "--set", "tomo.input=" + (dir / "tomogram.csv").string()});
  ASSERT_EQ(fit.code, kOk) << fit.err;
  const auto doc = nlohmann::json::parse(read_file(dir / "tomo_fit.json"));
  EXPECT_NEAR(doc["rho"]["beta"].get<double>(), 0.09, 1e-6);
  EXPECT_NEAR(doc["t_pi_ns"].get<double>(), 50.0, 1e-4);
  EXPECT_NEAR(doc["overlap"]["ground"].get<double>(), 0.91, 1e-6);
}

TEST(Cli, output_directory_precedence) {
  const fs::path env_dir = scratch("env");
  const fs::path cfg_dir = scratch("cfgdir");
  setenv("JPMSIM_OUTPUT_DIR", env_dir.string().c_str(), 1);
  ASSERT_EQ(run_cli({"bifurcation"}).code, kOk);
  EXPECT_TRUE(fs::exists(env_dir / "bifurcation.csv"));
  ASSERT_EQ(run_cli({"bifurcation", "--set", "output.directory=" + cfg_dir.string()}).code, kOk);
  EXPECT_TRUE(fs::exists(cfg_dir / "bifurcation.csv"));
  unsetenv("JPMSIM_OUTPUT_DIR");
}

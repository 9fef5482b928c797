#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "cqed/config.hpp"
#include "cqed/reports.hpp"
#include "cqed/scenario.hpp"

using namespace cqed;
namespace fs = std::filesystem;

namespace {

const char* kAjc = R"(
[system]
lambda_a = 1
Omega2 = 20
delta_a = -20

[scenario]
name = tiny-ajc
model = ajc
cutoff_a = 4
initial_atom = g

[integrator]
dt = 1e-3
t_end = pi/2
samples = 10
)";

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "cqed_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_text(const std::string& name, const std::string& text) {
  const fs::path p = temp_dir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(CQED_CLI_PATH) + " " + args + " > " + (temp_dir() / "cli.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST(Config, ParsesSectionsAndPiExpressions) {
  const auto cfg = parse_config(kAjc);
  EXPECT_EQ(cfg.name, "tiny-ajc");
  EXPECT_EQ(cfg.model.kind, ModelKind::Ajc);
  EXPECT_DOUBLE_EQ(cfg.t_end, std::numbers::pi / 2.0);
  EXPECT_DOUBLE_EQ(cfg.params.Omega2, 20.0);
  EXPECT_EQ(cfg.cutoff_a, 4);
  EXPECT_EQ(cfg.time_grid().size(), 11u);
}

TEST(Config, UnknownKeyRejected) {
  EXPECT_THROW(parse_config("[system]\nlambda_c = 1\n[scenario]\nmodel = ajc\n"), ConfigurationError);
}

TEST(Config, UnknownSectionRejected) {
  EXPECT_THROW(parse_config("[systems]\nlambda_a = 1\n"), ConfigurationError);
}

TEST(Config, BadNumberRejected) {
  EXPECT_THROW(parse_config("[system]\nlambda_a = one\n[scenario]\nmodel = ajc\n"), ConfigurationError);
}

TEST(Config, InitialStateMustReferenceExistingFactor) {
  EXPECT_THROW(parse_config("[scenario]\nmodel = full\ncutoff_a = 3\ninitial_b = vacuum\n"), ConfigurationError);
}

TEST(Config, PulsedModelNeedsSchedule) {
  EXPECT_THROW(parse_config("[scenario]\nmodel = pulsed-jc-ajc\ncutoff_a = 3\n"), ConfigurationError);
}

TEST(Config, ModelSelectors) {
  const auto m = ModelSpec::parse("effective:pdc,minus,strong");
  EXPECT_EQ(m.kind, ModelKind::Effective);
  EXPECT_EQ(m.effective, EffectiveKind::PDC);
  EXPECT_EQ(m.branch, Branch::Minus);
  EXPECT_EQ(*m.regime, RegimeTag::Strong);
  EXPECT_THROW(ModelSpec::parse("effective:pdc"), ConfigurationError);
  EXPECT_THROW(ModelSpec::parse("bogus"), ConfigurationError);
}

TEST(Config, BuiltinScenariosAllLoad) {
  const auto names = builtin_scenarios();
  for (const char* required : {"fig3-effective", "fig3-full", "fig3-dissipative", "pdc-weak", "pdc-intermediate",
                               "pdc-strong", "puc-intermediate", "ajc", "pulsed-jc-ajc", "sss"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), required), names.end()) << required;
  }
  for (const auto& n : names) EXPECT_NO_THROW(load_config(builtin_scenario_path(n))) << n;
}

TEST(Config, DissipativeScenarioResolvesToLindblad) {
  EXPECT_EQ(resolve_config("fig3-dissipative").resolved_solver(), Solver::Lindblad);
  EXPECT_EQ(resolve_config("fig3-full").resolved_solver(), Solver::Schrodinger);
}

TEST(Run, CsvHeaderAndNaNColumns) {
  const auto result = run_scenario(parse_config(kAjc));
  const std::string csv = format_csv(result);
  std::istringstream in(csv);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "time,r,var_x_min,theta_min,squeezing_degree,n_a,n_b,pop_e,purity,trace_error,tail_weight");
  EXPECT_EQ(first.substr(0, 6), "0,nan,");
  const auto table = CsvTable::parse(csv);
  EXPECT_EQ(table.rows.size(), 11u);
  EXPECT_TRUE(std::isnan(table.column("n_b")[3]));
  EXPECT_NEAR(table.column("pop_e").back(), 1.0, 1e-8);
}

TEST(Run, EffectiveSqueezingCarriesR) {
  auto cfg = resolve_config("fig3-effective");
  cfg.samples = 4;
  const auto result = run_scenario(cfg);
  EXPECT_NEAR(result.rows.back().r, 1.0, 1e-12);
  EXPECT_NEAR(result.rows.back().var_x_min, 0.033834, 1e-4);
}

TEST(Run, BitIdenticalRepeats) {
  auto cfg = resolve_config("sss");
  cfg.t_end = 2.0;
  cfg.samples = 10;
  EXPECT_EQ(format_csv(run_scenario(cfg)), format_csv(run_scenario(cfg)));
}

TEST(Run, ForcedMarginsAnnotateCsv) {
  auto cfg = resolve_config("pdc-intermediate");
  cfg.model = ModelSpec::parse("effective:pdc,plus,strong");
  cfg.t_end = 1.0;
  cfg.samples = 2;
  cfg.cutoff_a = 4;
  cfg.cutoff_b = 4;
  EXPECT_THROW(run_scenario(cfg), RegimeValidityError);
  cfg.force = true;
  const std::string csv = format_csv(run_scenario(cfg));
  EXPECT_EQ(csv.rfind("# forced: violated margin", 0), 0u);
}

TEST(Run, AtomicCsvWrite) {
  const fs::path out = temp_dir() / "ajc.csv";
  write_csv(run_scenario(parse_config(kAjc)), out);
  EXPECT_TRUE(fs::exists(out));
  EXPECT_FALSE(fs::exists(fs::path(out) += ".tmp"));
}

TEST(Compare, IdenticalFilesHaveZeroDeviation) {
  const std::string csv = format_csv(run_scenario(parse_config(kAjc)));
  const auto rep = compare_tables(CsvTable::parse(csv), CsvTable::parse(csv), "pop_e", 1e-12);
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.max_abs, 0.0);
  EXPECT_EQ(rep.abscissa, "time");
}

TEST(Compare, InterpolatesOntoReferenceGrid) {
  const auto a = CsvTable::parse("time,r,var_x_min\n0,0,1\n1,0.5,2\n2,1,3\n");
  const auto b = CsvTable::parse("time,r,var_x_min\n0,0,1\n2,1,3.03\n");
  const auto rep = compare_tables(a, b, "var_x_min", 0.02);
  EXPECT_TRUE(rep.interpolated);
  EXPECT_EQ(rep.abscissa, "r");
  EXPECT_NEAR(rep.end_rel, 0.01, 1e-12);
  EXPECT_NEAR(rep.max_rel, 0.01, 1e-12);
  EXPECT_TRUE(rep.passed);
  EXPECT_FALSE(compare_tables(a, b, "var_x_min", 0.005).passed);
}

TEST(Compare, MissingColumnAndDisjointGrids) {
  const auto a = CsvTable::parse("time,r,x\n0,nan,1\n1,nan,2\n");
  const auto b = CsvTable::parse("time,r,x\n5,nan,1\n6,nan,2\n");
  EXPECT_THROW(compare_tables(a, a, "y", 0.1), ConfigurationError);
  EXPECT_THROW(compare_tables(a, b, "x", 0.1), ConfigurationError);
}

TEST(Sweep, StarvedCutoffIsUnconverged) {
  auto cfg = resolve_config("fig3-effective");
  cfg.samples = 2;
  const int cutoffs[] = {4, 8};
  const auto rep = convergence_sweep(cfg, cutoffs);
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.entries.back().change, 1e-3);
}

TEST(Sweep, SinglePhotonExchangeConvergedAtThree) {
  auto cfg = resolve_config("puc-intermediate");
  cfg.samples = 4;
  const int cutoffs[] = {3, 4};
  const auto rep = convergence_sweep(cfg, cutoffs);
  EXPECT_TRUE(rep.converged);
  EXPECT_LT(rep.entries.back().change, 1e-12);
}

TEST(Sweep, NeedsTwoCutoffs) {
  const int one[] = {3};
  EXPECT_THROW(convergence_sweep(resolve_config("ajc"), one), ConfigurationError);
}

TEST(Derive, DispersiveWitness) {
  const auto cfg = parse_config(
      "[system]\nlambda_a = 0.05\ndelta_a = 1\n[scenario]\nname = dispersive\nmodel = full\ncutoff_a = 4\n");
  const auto rep = derive_effective_report(cfg, 200.0, 2000);
  ASSERT_EQ(rep.lines.size(), 3u);
  for (const auto& l : rep.lines) EXPECT_LT(l.percent_deviation, 2.0) << l.label;
}

TEST(Derive, RejectsTwoDriveConfigurations) {
  EXPECT_THROW(derive_effective_report(resolve_config("fig3-full"), 200.0, 100), ConfigurationError);
}

TEST(Cli, ExitCodes) {
  const fs::path good = write_text("good.ini", kAjc);
  const fs::path out = temp_dir() / "good.csv";
  EXPECT_EQ(cli("run --config " + good.string() + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out));

  EXPECT_EQ(cli("run --config " + write_text("bad.ini", "[system]\nnope = 1\n").string()), 1);
  EXPECT_EQ(cli("run --config does-not-exist-anywhere"), 1);

  const fs::path regime = write_text("regime.ini", R"(
[system]
lambda_a = 1
lambda_b = 1
Omega1 = 10
delta_a = 30
delta_b = -30
[scenario]
name = regime
model = effective:pdc,plus,strong
cutoff_a = 3
cutoff_b = 3
[integrator]
t_end = 1
samples = 1
)");
  EXPECT_EQ(cli("run --config " + regime.string() + " --out " + (temp_dir() / "r.csv").string()), 2);
  EXPECT_EQ(cli("run --force --config " + regime.string() + " --out " + (temp_dir() / "r.csv").string()), 0);
  EXPECT_EQ(slurp(temp_dir() / "r.csv").rfind("# forced", 0), 0u);

  const fs::path coarse = write_text("coarse.ini", R"(
[system]
lambda_a = 1
Omega2 = 20
delta_a = -20
[scenario]
name = coarse
model = ajc
cutoff_a = 3
[integrator]
dt = 0.3
allow_coarse_dt = true
t_end = 30
samples = 1
)");
  EXPECT_EQ(cli("run --config " + coarse.string() + " --out " + (temp_dir() / "c.csv").string()), 3);

  EXPECT_EQ(cli("compare --a " + out.string() + " --b " + out.string() + " --column pop_e --tol 1e-9"), 0);
  const fs::path shifted = write_text("shifted.csv", "time,r,pop_e\n0,nan,0.5\n1.5707963267948966,nan,0.5\n");
  EXPECT_EQ(cli("compare --a " + out.string() + " --b " + shifted.string() + " --column pop_e --tol 1e-3"), 4);

  EXPECT_EQ(cli("list-scenarios"), 0);
  EXPECT_NE(slurp(temp_dir() / "cli.log").find("fig3-dissipative"), std::string::npos);
}

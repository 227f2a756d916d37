#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "circkde/simulation.hpp"

using namespace circkde;

namespace {

ExperimentConfig tiny() {
  ExperimentConfig cfg;
  cfg.models = {"M2", "M7"};
  cfg.sample_sizes = {30};
  cfg.replicates = 4;
  cfg.selectors = {Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv, Selector::Oracle};
  cfg.oracle_grid = log_space(0.1, 100.0, 13);
  cfg.gridsize = 256;
  cfg.base_seed = 77;
  return cfg;
}

}  // namespace

TEST(Experiment, ProducesOneRowPerCell) {
  const auto report = run_experiment(tiny());
  EXPECT_EQ(report.rows.size(), 2u * 1u * 4u);
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.replicates, 4u);
    EXPECT_EQ(row.failures, 0u);
    EXPECT_GT(row.mean_ise, 0.0);
    EXPECT_GE(row.sd_ise, 0.0);
  }
  const auto* pi = report.find("M7", 30, Selector::PlugIn);
  ASSERT_NE(pi, nullptr);
  EXPECT_TRUE(pi->mean_selected_components.has_value());
  EXPECT_EQ(report.find("M9", 30, Selector::PlugIn), nullptr);
  // The oracle minimizes the average ISE over the same samples, so no
  // data-driven selector can do better on average.
  const auto* oracle = report.find("M7", 30, Selector::Oracle);
  for (auto s : {Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv}) {
    EXPECT_GE(report.find("M7", 30, s)->mean_ise, oracle->mean_ise * (1.0 - 0.05));
  }
}

TEST(Experiment, SingleReplicateHasZeroSpread) {
  auto cfg = tiny();
  cfg.replicates = 1;
  cfg.models = {"M7"};
  for (const auto& row : run_experiment(cfg).rows) {
    EXPECT_EQ(row.sd_ise, 0.0);
  }
}

TEST(Experiment, DeterministicApartFromWallTime) {
  auto cfg = tiny();
  const auto a = report_to_json(run_experiment(cfg), false);
  const auto b = report_to_json(run_experiment(cfg), false);
  EXPECT_EQ(a, b);
  cfg.threads = 3;
  EXPECT_EQ(report_to_json(run_experiment(cfg), false), a) << "thread count must not change results";
  cfg.base_seed = 78;
  EXPECT_NE(report_to_json(run_experiment(cfg), false), a);
}

TEST(Experiment, ReplicateStreamsAreDistinct) {
  EXPECT_NE(replicate_stream(7, 100, 0), replicate_stream(7, 100, 1));
  EXPECT_NE(replicate_stream(7, 100, 0), replicate_stream(7, 250, 0));
  EXPECT_NE(replicate_stream(7, 100, 0), replicate_stream(8, 100, 0));
}

TEST(Config, JsonRoundTrip) {
  auto cfg = tiny();
  cfg.threads = 2;
  cfg.em.max_iter = 50;
  NuSearchDomain dom;
  dom.nu_max = 321.0;
  cfg.nu_domain = dom;
  const auto text = config_to_json(cfg);
  const auto back = config_from_json(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(back.models, cfg.models);
  EXPECT_EQ(back.em.max_iter, 50);
  ASSERT_TRUE(back.nu_domain.has_value());
  EXPECT_EQ(back.nu_domain->nu_max, 321.0);
}

TEST(Config, ErrorsNameTheField) {
  auto expect_field = [](const std::string& text, const std::string& field) {
    try {
      (void)config_from_json(text);
      ADD_FAILURE() << "accepted " << text;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  expect_field(R"({"replicates": 0})", "replicates");
  expect_field(R"({"replicates": "many"})", "replicates");
  expect_field(R"({"models": ["M99"]})", "models");
  expect_field(R"({"sample_sizes": [1]})", "sample_sizes");
  expect_field(R"({"selectors": ["XX"]})", "selectors");
  expect_field(R"({"gridsize": 1000})", "gridsize");
  expect_field(R"({"bogus": 1})", "bogus");
  EXPECT_EQ(config_from_json("{}").replicates, ExperimentConfig{}.replicates);
}

TEST(Config, PresetsValidate) {
  EXPECT_NO_THROW(ExperimentConfig::smoke().validate());
  const auto full = ExperimentConfig::full();
  EXPECT_NO_THROW(full.validate());
  EXPECT_EQ(full.models.size(), 20u);
  EXPECT_EQ(full.replicates, 1000u);
  EXPECT_EQ(full.selectors.size(), 4u);
}

TEST(Reference, ParsesCsvWithComments) {
  std::istringstream in(
      "# comment\n"
      "model,n,selector,mise_x100,sd_x100\n"
      "M7,100,PI,1.5,0.8\n"
      "M7,100,ORACLE,1.2,\n");
  const auto table = parse_reference_table(in);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0].selector, "PI");
  EXPECT_EQ(*table[0].sd_x100, 0.8);
  EXPECT_FALSE(table[1].sd_x100.has_value());
  std::istringstream bad("model,n,selector,mise_x100,sd_x100\nM7,abc,PI,1,1\n");
  EXPECT_THROW((void)parse_reference_table(bad), std::invalid_argument);
}

TEST(Reference, ComparisonStatuses) {
  SimulationReport report;
  CellResult cell;
  cell.model = "M7";
  cell.n = 100;
  cell.selector = Selector::PlugIn;
  cell.mean_ise = 0.015;
  cell.sd_ise = 0.008;
  cell.replicates = 200;
  report.rows.push_back(cell);

  const ReferenceTable same{{"M7", 100, "PI", 1.5, 0.8}};
  auto cmp = compare_to_reference(report, same, 3.0);
  ASSERT_EQ(cmp.size(), 1u);
  EXPECT_EQ(cmp[0].status, CellStatus::Pass);
  EXPECT_NEAR(cmp[0].z, 0.0, 1e-12);
  EXPECT_NEAR(cmp[0].half_width, 3.0 * 0.8 / std::sqrt(200.0) + 0.15, 1e-12);

  const ReferenceTable corrupted{{"M7", 100, "PI", 3.0, 0.8}};
  EXPECT_EQ(compare_to_reference(report, corrupted, 3.0)[0].status, CellStatus::Fail);

  const ReferenceTable other{{"M7", 100, "LCV", 1.5, 0.8}};
  EXPECT_EQ(compare_to_reference(report, other, 3.0)[0].status, CellStatus::Missing);
}

TEST(Report, TableFormatting) {
  auto cfg = tiny();
  cfg.models = {"M7"};
  cfg.selectors = {Selector::RuleOfThumb};
  const auto report = run_experiment(cfg);
  const auto text = format_table(report);
  EXPECT_NE(text.find("n=30"), std::string::npos);
  EXPECT_NE(text.find("MISE(RT)"), std::string::npos);
  EXPECT_NE(text.find("M7"), std::string::npos);
}

#include "smdim/error.hpp"
#include "smdim/harness.hpp"
#include "smdim/io.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace smdim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("smdim-test-" + name);
  fs::remove_all(dir);
  return dir;
}

TrialRecord make_record(double amp, ExplorationMode mode, Method method, int trial, bool correct) {
  TrialRecord r;
  r.cell = {0, mode, method, trial};
  r.amplitude = amp;
  r.truth = ground_truth(mode, 3);
  r.estimate = correct ? r.truth : r.truth - 1;
  r.correct = correct;
  return r;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("system JSON round-trip with configurations") {
  SystemSpec spec;
  spec.seed = 314;
  const System s = build_system(spec);
  const auto configs = sample_configurations(s, ExplorationMode::Both, 0.25, 5, 2);
  const std::string text = system_to_json(s, configs);
  const auto j = nlohmann::json::parse(text);
  for (const char* key : {"spec", "cone_positions", "reference_config", "configs"}) CHECK(j.contains(key));

  const SystemDocument doc = system_from_json(text);
  CHECK(doc.system.spec().seed == 314);
  for (int eye = 0; eye < 2; ++eye)
    for (std::size_t i = 0; i < s.cones(eye).size(); ++i) CHECK(doc.system.cones(eye)[i] == s.cones(eye)[i]);
  CHECK(doc.system.reference() == s.reference());
  REQUIRE(doc.configs.size() == configs.size());
  for (std::size_t i = 0; i < configs.size(); ++i) CHECK(doc.configs[i] == configs[i]);
  CHECK(sense(doc.system, configs[0]) == sense(s, configs[0]));
}

TEST_CASE("system JSON errors name the field") {
  CHECK_THROWS_AS(system_from_json("{"), ValidationError);
  try {
    system_from_json(R"({"spec": {}, "cone_positions": [[], []]})");
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "reference_config");
  }
  CHECK(spec_from_json(spec_to_json(SystemSpec{})).cones_per_eye == 20);
}

TEST_CASE("matrix CSV keeps full precision") {
  Eigen::MatrixXd m(3, 4);
  m << 0.1, -1e-300, 3.0 / 7.0, 1e300,
       5e-324, 2.0, -0.0, 123456789.123456789,
       1.0 / 3.0, -2.5e-7, 6.02214076e23, 0.3;
  std::stringstream ss;
  write_matrix_csv(ss, m);
  const Eigen::MatrixXd back = read_matrix_csv(ss);
  CHECK(back == m);

  SystemSpec spec;
  const System s = build_system(spec);
  const VariationMatrix vm = explore(s, sample_configurations(s, ExplorationMode::EnvironmentOnly, 1e-3, 50, 1),
                                     ExplorationMode::EnvironmentOnly, 1e-3);
  std::stringstream vs;
  write_variation_csv(vs, vm);
  const VariationMatrix read = read_variation_csv(vs);
  CHECK(read.data == vm.data);
  CHECK(read.mode == ExplorationMode::EnvironmentOnly);
  CHECK(read.amplitude == 1e-3);

  std::stringstream bad("1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(bad), ValidationError);
}

TEST_CASE("cost profile and bootstrap trace CSV layout") {
  CostProfile p;
  p.costs = {10.5, 0.25};
  std::stringstream ss;
  write_cost_profile_csv(ss, p);
  CHECK(ss.str() == "p,J\n1,10.5\n2,0.25\n");

  BootstrapTrace t;
  BootstrapRecord r;
  r.spectrum.values = {4, 2};
  r.spread = 2;
  r.cmax = 1e-6;
  t.records = {r, r};
  std::stringstream ts;
  write_bootstrap_trace_csv(ts, t);
  CHECK(ts.str() == "iteration,sigma_1,sigma_2,spread,cmax\n1,4,2,2,1e-06\n2,4,2,2,1e-06\n");
}

TEST_CASE("file errors carry the path") {
  try {
    read_text_file("/nonexistent/dir/file.json");
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/file.json") != std::string::npos);
  }
}

}

TEST_SUITE("harness") {

TEST_CASE("ground truth per mode") {
  CHECK(ground_truth(ExplorationMode::AgentOnly, 3) == 9);
  CHECK(ground_truth(ExplorationMode::EnvironmentOnly, 3) == 6);
  CHECK(ground_truth(ExplorationMode::Both, 3) == 12);
  CHECK(ground_truth(ExplorationMode::EnvironmentOnly, 1) == 2);
}

TEST_CASE("plan validation and plan files") {
  ExperimentPlan plan;
  CHECK_NOTHROW(plan.validate());
  CHECK(plan.amplitudes.size() == 8);
  CHECK(plan.trials == 20);
  plan.trials = 0;
  CHECK_THROWS_AS(plan.validate(), ValidationError);
  plan = ExperimentPlan{};
  plan.amplitudes.clear();
  CHECK_THROWS_AS(plan.validate(), ValidationError);

  const ExperimentPlan parsed =
      plan_from_json(R"({"amplitudes": [0.001], "modes": ["env"], "methods": ["cca-boot-inf"], "trials": 3})");
  CHECK(parsed.amplitudes == std::vector<double>{0.001});
  CHECK(parsed.modes == std::vector<ExplorationMode>{ExplorationMode::EnvironmentOnly});
  CHECK(parsed.methods == std::vector<Method>{Method::CCABootInfinitesimal});
  CHECK(parsed.trials == 3);
  CHECK(parsed.samples == 1000);
  const ExperimentPlan again = plan_from_json(plan_to_json(parsed));
  CHECK(again.amplitudes == parsed.amplitudes);
  CHECK(again.methods == parsed.methods);
  CHECK_THROWS_AS(plan_from_json(R"({"trials": -1})"), ValidationError);
  CHECK_THROWS_AS(plan_from_json(R"({"modes": ["sideways"]})"), ValidationError);
}

TEST_CASE("seeds: methods share the system, not the trial stream") {
  ExperimentPlan plan;
  CHECK(system_seed(plan, 1, 2) == system_seed(plan, 1, 2));
  CHECK(system_seed(plan, 1, 2) != system_seed(plan, 1, 3));
  const TrialCell a{1, ExplorationMode::AgentOnly, Method::Linear, 2};
  TrialCell b = a;
  b.method = Method::CCA;
  CHECK(trial_seed(plan, a) != trial_seed(plan, b));
  plan.master_seed = 9;
  CHECK(trial_seed(plan, a) != trial_seed(ExperimentPlan{}, a));
}

TEST_CASE("summary rates, omitted groups and the d row") {
  std::vector<TrialRecord> recs;
  for (int t = 0; t < 20; ++t) recs.push_back(make_record(1e-6, ExplorationMode::AgentOnly, Method::Linear, t, t < 18));
  for (int t = 0; t < 20; ++t) recs.push_back(make_record(1e-6, ExplorationMode::EnvironmentOnly, Method::Linear, t, true));
  for (int t = 0; t < 20; ++t) recs.push_back(make_record(1e-6, ExplorationMode::Both, Method::Linear, t, t != 0));
  const PerformanceTable table = summarize(recs);
  REQUIRE(table.rows.size() == 4);
  for (const SummaryRow& r : table.rows) {
    CHECK(r.method == Method::Linear);
    CHECK(r.trials == 20);
    if (r.quantity == "m") CHECK(r.percent == doctest::Approx(90.0));
    if (r.quantity == "e") CHECK(r.percent == doctest::Approx(100.0));
    if (r.quantity == "b") CHECK(r.percent == doctest::Approx(95.0));
    if (r.quantity == "d") {
      CHECK(r.correct == 17);  // trials 1..17 have m, e and b right
      CHECK(r.dimension == 3);
    }
  }
  CHECK_THROWS_AS(summarize({}), ValidationError);

  // Recount check: every summary row agrees with the raw records.
  for (const SummaryRow& r : table.rows) {
    if (r.quantity == "d") continue;
    int n = 0, ok = 0;
    for (const TrialRecord& rec : recs)
      if (quantity_name(rec.cell.mode) == r.quantity && rec.amplitude == r.amplitude) {
        ++n;
        ok += rec.correct ? 1 : 0;
      }
    CHECK(n == r.trials);
    CHECK(ok == r.correct);
  }

  const PerformanceTable back = table_from_csv(table_to_csv(table));
  REQUIRE(back.rows.size() == table.rows.size());
  CHECK(back.rows[0].percent == table.rows[0].percent);
  CHECK(nlohmann::json::parse(table_to_json(table)).at("rows").size() == 4);
}

TEST_CASE("plot data shape and chart range") {
  std::vector<TrialRecord> recs;
  const double amps[] = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1};
  for (double a : amps)
    for (Method m : {Method::Linear, Method::CCA, Method::CCABootInfinitesimal, Method::CCABootFinite})
      recs.push_back(make_record(a, ExplorationMode::AgentOnly, m, 0, a < 1e-3));
  const PerformanceTable table = summarize(recs);
  const std::string csv = plot_csv(table, "m");
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 4);
    ++rows;
  }
  CHECK(rows == 9);  // header + 8 amplitudes
  const std::string svg = plot_svg(table, "m");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find(">100</text>") != std::string::npos);
  CHECK(svg.find(">0</text>") != std::string::npos);
  CHECK(svg.find("1e-6") != std::string::npos);
  CHECK(svg.find("1e1") != std::string::npos);

  const fs::path dir = scratch_dir("plots");
  const auto files = emit_plot_data(table, dir);
  CHECK(files.size() == 2);
  CHECK(fs::exists(dir / "plot_m.csv"));
  CHECK(fs::exists(dir / "plot_m.svg"));
  CHECK_THROWS_AS(emit_plot_data(PerformanceTable{}, dir / "empty"), ValidationError);
  CHECK_FALSE(fs::exists(dir / "empty"));
  fs::remove_all(dir);
}

TEST_CASE("trial records round-trip through JSON lines") {
  TrialRecord r = make_record(0.1, ExplorationMode::Both, Method::CCABootFinite, 4, false);
  r.error = "insufficient exploration";
  r.diagnostics = {3.5, 1e-12};
  r.wall_seconds = 1.25;
  const std::string text = records_to_jsonl({r, r});
  CHECK(text.find("wall_seconds") == std::string::npos);
  const auto back = records_from_jsonl(text);
  REQUIRE(back.size() == 2);
  CHECK(back[0].cell.method == Method::CCABootFinite);
  CHECK(back[0].cell.trial == 4);
  CHECK(back[0].error == r.error);
  CHECK(back[0].diagnostics == r.diagnostics);
  CHECK(record_from_json(record_to_json(r, true)).wall_seconds == 1.25);
}

TEST_CASE("linear sweep: results, isolation and thread-count independence") {
  ExperimentPlan plan;
  plan.methods = {Method::Linear};
  plan.amplitudes = {1e-6, 10.0};
  plan.trials = 4;
  plan.samples = 300;
  plan.master_seed = 5;
  const auto serial = run_experiment(plan, {1, {}});
  const auto parallel = run_experiment(plan, {3, {}});
  CHECK(records_to_jsonl(serial) == records_to_jsonl(parallel));
  REQUIRE(serial.size() == 2 * 3 * 4);
  for (const TrialRecord& r : serial)
    if (r.amplitude == 1e-6) CHECK(r.correct);
  const TrialRecord alone = run_trial(plan, serial[7].cell);
  CHECK(record_to_json(alone) == record_to_json(serial[7]));
}

TEST_CASE("failed trials are recorded, not thrown") {
  ExperimentPlan plan;
  plan.methods = {Method::CCABootInfinitesimal};
  plan.modes = {ExplorationMode::Both};
  plan.amplitudes = {1e-6};
  plan.trials = 1;
  plan.samples = 10;  // fewer samples than the 15 free parameters
  const auto recs = run_experiment(plan);
  REQUIRE(recs.size() == 1);
  CHECK_FALSE(recs[0].correct);
  CHECK(recs[0].estimate == 0);
  CHECK(recs[0].error.find("insufficient exploration") == 0);
}

}

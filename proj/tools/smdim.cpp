// smdim: simulate sensorimotor explorations and estimate their dimensions.

#include "smdim/bootstrap.hpp"
#include "smdim/cca.hpp"
#include "smdim/error.hpp"
#include "smdim/estimators.hpp"
#include "smdim/harness.hpp"
#include "smdim/io.hpp"
#include "smdim/system.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace smdim;

namespace {

constexpr int kUsage = 1;
constexpr int kRuntime = 2;

struct Options {
  double amplitude = 1e-6;
  std::string mode = "agent";
  std::string method = "linear";
  int trials = 20;
  int n_moves = 1000;
  int sources = 3;
  int pmax = 15;
  int boot_iters = 10;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool paper_scale = false;
  std::string input;
  std::string plan;
  std::string system;
  int threads = 1;
  bool quiet = false;
};

// Raised for bad flag combinations found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad content in a data file is a runtime failure, not a usage error.
template <class Parse>
auto parse_data_file(const std::string& path, Parse parse) {
  try {
    return parse(read_text_file(path));
  } catch (const ValidationError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_stream(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ostringstream ss;
  body(ss);
  write_text_file(path, ss.str());
}

System load_or_build_system(const Options& o) {
  if (!o.system.empty()) return parse_data_file(o.system, [](const std::string& t) { return system_from_json(t); }).system;
  SystemSpec spec;
  spec.n_sources = o.sources;
  spec.seed = o.seed;
  return build_system(spec);
}

BootstrapParams boot_params(const Options& o, Method method) {
  BootstrapParams bp;
  bp.iterations = o.boot_iters;
  bp.strategy = method == Method::CCABootFinite ? BootstrapStrategy::Finite : BootstrapStrategy::Infinitesimal;
  bp.target_amplitude = o.amplitude;
  return bp;
}

int cmd_simulate(const Options& o) {
  const System system = load_or_build_system(o);
  const ExplorationMode mode = parse_mode(o.mode);
  const auto configs = sample_configurations(system, mode, o.amplitude, o.n_moves, o.seed);
  const VariationMatrix vm = explore(system, configs, mode, o.amplitude);
  const fs::path dir(o.out);
  write_text_file(dir / "system.json", system_to_json(system, configs));
  write_stream(dir / "variation.csv", [&](std::ostream& s) { write_variation_csv(s, vm); });
  std::cout << "wrote " << (dir / "system.json").string() << " and " << (dir / "variation.csv").string() << " ("
            << vm.data.rows() << " x " << vm.data.cols() << ")\n";
  return 0;
}

int cmd_estimate(const Options& o) {
  const Method method = parse_method(o.method);
  VariationMatrix vm;
  if (!o.input.empty()) {
    if (method == Method::CCABootInfinitesimal || method == Method::CCABootFinite)
      throw UsageError("bootstrap methods choose their own commands; drop --input or use --method cca");
    vm = parse_data_file(o.input, [](const std::string& t) {
      std::istringstream in(t);
      return read_variation_csv(in);
    });
  } else {
    const System system = load_or_build_system(o);
    const ExplorationMode mode = parse_mode(o.mode);
    std::vector<Configuration> configs;
    if (method == Method::Linear || method == Method::CCA) {
      configs = sample_configurations(system, mode, o.amplitude, o.n_moves, o.seed);
    } else {
      const auto boot = run_bootstrap(system, mode, boot_params(o, method), o.n_moves, o.seed);
      configs = configurations_from_offsets(system, mode, boot.commands);
    }
    vm = explore(system, configs, mode, o.amplitude);
  }

  if (method == Method::Linear) {
    const SingularSpectrum spectrum = singular_spectrum(vm.data);
    std::cout << "estimate " << estimate_dim_linear(spectrum).value << '\n';
    const fs::path path = fs::path(o.out) / "spectrum.csv";
    write_stream(path, [&](std::ostream& s) {
      s << "j,sigma\n";
      for (std::size_t j = 0; j < spectrum.size(); ++j) s << j + 1 << ',' << format_double(spectrum[j]) << '\n';
    });
    std::cout << "wrote " << path.string() << '\n';
    return 0;
  }
  CcaParams cp;
  cp.seed = o.seed;
  const int p_max = std::min<int>(o.pmax, static_cast<int>(vm.data.rows()));
  const CcaEstimate est = estimate_dim_cca(vm.data, p_max, cp);
  std::cout << "estimate " << est.estimate.value << '\n';
  const fs::path path = fs::path(o.out) / "cost_profile.csv";
  write_stream(path, [&](std::ostream& s) { write_cost_profile_csv(s, est.profile); });
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

int cmd_bootstrap(const Options& o) {
  Method method = parse_method(o.method);
  if (method != Method::CCABootFinite) method = Method::CCABootInfinitesimal;
  const System system = load_or_build_system(o);
  const ExplorationMode mode = parse_mode(o.mode);
  const BootstrapResult boot = run_bootstrap(system, mode, boot_params(o, method), o.n_moves, o.seed);
  const auto configs = configurations_from_offsets(system, mode, boot.commands);
  const VariationMatrix vm = explore(system, configs, mode, o.amplitude);
  const fs::path dir(o.out);
  write_stream(dir / "bootstrap_trace.csv", [&](std::ostream& s) { write_bootstrap_trace_csv(s, boot.trace); });
  write_text_file(dir / "system.json", system_to_json(system, configs));
  write_stream(dir / "variation.csv", [&](std::ostream& s) { write_variation_csv(s, vm); });
  const auto& first = boot.trace.records.front();
  const auto& last = boot.trace.records.back();
  std::cout << "spread " << first.spread << " -> " << last.spread << " over " << boot.trace.records.size()
            << " iterations; linear estimate " << estimate_dim_linear(singular_spectrum(vm.data)).value << '\n';
  std::cout << "wrote " << (dir / "bootstrap_trace.csv").string() << '\n';
  return 0;
}

std::string run_dir_name(std::uint64_t seed) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << "run-" << std::put_time(&tm, "%Y%m%dT%H%M%SZ") << "-seed" << seed;
  return ss.str();
}

void write_summary(const PerformanceTable& table, const fs::path& dir) {
  write_text_file(dir / "summary.csv", table_to_csv(table));
  write_text_file(dir / "summary.json", table_to_json(table));
}

void print_table(const PerformanceTable& table) {
  std::cout << std::left << std::setw(11) << "amplitude" << std::setw(4) << "q" << std::setw(17) << "method"
            << "correct\n";
  for (const SummaryRow& r : table.rows)
    std::cout << std::setw(11) << format_double(r.amplitude) << std::setw(4) << r.quantity << std::setw(17)
              << to_string(r.method) << r.correct << '/' << r.trials << " (" << r.percent << "%)\n";
}

int cmd_experiment(const Options& o, const CLI::App& sub) {
  ExperimentPlan plan;
  if (!o.plan.empty()) plan = plan_from_json(read_text_file(o.plan));
  if (sub.count("--amplitude")) plan.amplitudes = {o.amplitude};
  if (sub.count("--mode")) plan.modes = {parse_mode(o.mode)};
  if (sub.count("--method")) plan.methods = {parse_method(o.method)};
  if (o.paper_scale) plan.trials = ExperimentPlan::kPaperTrials;
  if (sub.count("--trials")) plan.trials = o.trials;
  if (sub.count("--n-moves")) plan.samples = o.n_moves;
  if (sub.count("--sources")) plan.n_sources = o.sources;
  if (sub.count("--pmax")) plan.p_max = o.pmax;
  if (sub.count("--boot-iters")) plan.boot_iterations = o.boot_iters;
  if (sub.count("--seed")) plan.master_seed = o.seed;
  plan.validate();

  const fs::path dir = fs::path(o.out) / run_dir_name(plan.master_seed);
  write_text_file(dir / "plan.json", plan_to_json(plan));
  RunOptions ro;
  ro.threads = o.threads;
  if (!o.quiet)
    ro.on_record = [](const TrialRecord& r, std::size_t done, std::size_t total) {
      std::cerr << '[' << done << '/' << total << "] amp=" << format_double(r.amplitude) << ' '
                << to_string(r.cell.mode) << ' ' << to_string(r.cell.method) << " trial=" << r.cell.trial
                << " estimate=" << r.estimate << (r.correct ? " ok" : "") << '\n';
    };
  const auto records = run_experiment(plan, ro);
  write_text_file(dir / "trials.jsonl", records_to_jsonl(records));
  std::string timings = "amplitude,mode,method,trial,wall_seconds\n";
  for (const TrialRecord& r : records)
    timings += format_double(r.amplitude) + ',' + std::string(to_string(r.cell.mode)) + ',' +
               std::string(to_string(r.cell.method)) + ',' + std::to_string(r.cell.trial) + ',' +
               format_double(r.wall_seconds) + '\n';
  write_text_file(dir / "timings.csv", timings);
  const PerformanceTable table = summarize(records);
  write_summary(table, dir);
  emit_plot_data(table, dir);
  print_table(table);
  std::cout << "results in " << dir.string() << '\n';
  return 0;
}

int cmd_summarize(const Options& o) {
  if (o.input.empty()) throw UsageError("--input trials.jsonl is required");
  const auto records = parse_data_file(o.input, [](const std::string& t) { return records_from_jsonl(t); });
  const PerformanceTable table = summarize(records);
  write_summary(table, o.out);
  print_table(table);
  return 0;
}

int cmd_plot_data(const Options& o) {
  if (o.input.empty()) throw UsageError("--input summary.csv is required");
  const PerformanceTable table = parse_data_file(o.input, [](const std::string& t) { return table_from_csv(t); });
  if (table.rows.empty()) {
    std::cerr << "error: summary has no rows\n";
    return kRuntime;
  }
  for (const fs::path& p : emit_plot_data(table, o.out)) std::cout << "wrote " << p.string() << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensorimotor dimension estimation: simulation, estimators and experiment sweeps"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--amplitude", o.amplitude, "Maximal movement amplitude (deg)")->check(CLI::PositiveNumber);
    sub->add_option("--mode", o.mode, "Exploration mode")->check(CLI::IsMember({"agent", "env", "both"}));
    sub->add_option("--n-moves", o.n_moves, "Movements per exploration (N)")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--sources", o.sources, "Number of light sources")->check(CLI::Range(1, 1000));
    sub->add_option("--seed", o.seed, "Seed");
    sub->add_option("--out", o.out, "Output directory");
  };
  auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "Estimation method")
        ->check(CLI::IsMember({"linear", "cca", "cca-boot-inf", "cca-boot-finite"}));
    sub->add_option("--pmax", o.pmax, "Largest CCA projection dimension")->check(CLI::Range(2, 1000));
    sub->add_option("--boot-iters", o.boot_iters, "Bootstrap iterations (B)")->check(CLI::Range(1, 10000));
  };

  auto* simulate = app.add_subcommand("simulate", "Write a system and its variation matrix");
  add_common(simulate);
  simulate->add_option("--system", o.system, "Reuse a system JSON file")->check(CLI::ExistingFile);

  auto* estimate = app.add_subcommand("estimate", "Estimate the dimension of a variation matrix");
  add_common(estimate);
  add_method(estimate);
  estimate->add_option("--input", o.input, "Variation matrix CSV (simulated when absent)")->check(CLI::ExistingFile);
  estimate->add_option("--system", o.system, "System JSON file")->check(CLI::ExistingFile);

  auto* bootstrap = app.add_subcommand("bootstrap", "Run one bootstrap and write its trace");
  add_common(bootstrap);
  add_method(bootstrap);
  bootstrap->add_option("--system", o.system, "System JSON file")->check(CLI::ExistingFile);

  auto* experiment = app.add_subcommand("experiment", "Run an amplitude x mode x method sweep");
  add_common(experiment);
  add_method(experiment);
  experiment->add_option("--trials", o.trials, "Trials per cell")->check(CLI::Range(1, 1000000));
  experiment->add_flag("--paper-scale", o.paper_scale, "Use 100 trials per cell");
  experiment->add_option("--plan", o.plan, "Plan file (JSON); flags override its values")->check(CLI::ExistingFile);
  experiment->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::Range(0, 1024));
  experiment->add_flag("--quiet", o.quiet, "No per-trial progress");

  auto* summarize_cmd = app.add_subcommand("summarize", "Summarize trial records");
  summarize_cmd->add_option("--input", o.input, "trials.jsonl")->check(CLI::ExistingFile);
  summarize_cmd->add_option("--out", o.out, "Output directory");

  auto* plot = app.add_subcommand("plot-data", "Write plot CSV and SVG files from a summary");
  plot->add_option("--input", o.input, "summary.csv")->check(CLI::ExistingFile);
  plot->add_option("--out", o.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o);
    if (*estimate) return cmd_estimate(o);
    if (*bootstrap) return cmd_bootstrap(o);
    if (*experiment) return cmd_experiment(o, *experiment);
    if (*summarize_cmd) return cmd_summarize(o);
    if (*plot) return cmd_plot_data(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

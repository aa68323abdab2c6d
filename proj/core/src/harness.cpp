#include "smdim/harness.hpp"

#include "smdim/bootstrap.hpp"
#include "smdim/cca.hpp"
#include "smdim/error.hpp"
#include "smdim/io.hpp"
#include "smdim/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace smdim {

using nlohmann::json;

void ExperimentPlan::validate() const {
  if (amplitudes.empty()) throw ValidationError("amplitudes", "must not be empty");
  for (double a : amplitudes)
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("amplitudes", "must be positive");
  if (modes.empty()) throw ValidationError("modes", "must not be empty");
  if (methods.empty()) throw ValidationError("methods", "must not be empty");
  if (trials < 1) throw ValidationError("trials", "must be >= 1");
  if (samples < 2) throw ValidationError("samples", "must be >= 2");
  if (p_max < 2) throw ValidationError("p_max", "must be >= 2");
  if (n_sources < 1) throw ValidationError("n_sources", "must be >= 1");
  if (boot_iterations < 1) throw ValidationError("boot_iterations", "must be >= 1");
}

ExperimentPlan plan_from_json(const std::string& text, ExperimentPlan plan) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ValidationError("plan", ex.what());
  }
  if (!j.is_object()) throw ValidationError("plan", "expected an object");
  try {
    if (j.contains("amplitudes")) plan.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (j.contains("modes")) {
      plan.modes.clear();
      for (const auto& m : j.at("modes")) plan.modes.push_back(parse_mode(m.get<std::string>()));
    }
    if (j.contains("methods")) {
      plan.methods.clear();
      for (const auto& m : j.at("methods")) plan.methods.push_back(parse_method(m.get<std::string>()));
    }
    plan.trials = j.value("trials", plan.trials);
    plan.samples = j.value("samples", plan.samples);
    plan.p_max = j.value("p_max", plan.p_max);
    plan.n_sources = j.value("n_sources", plan.n_sources);
    plan.boot_iterations = j.value("boot_iterations", plan.boot_iterations);
    plan.master_seed = j.value("master_seed", plan.master_seed);
  } catch (const json::exception& ex) {
    throw ValidationError("plan", ex.what());
  }
  plan.validate();
  return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
  json modes = json::array(), methods = json::array();
  for (auto m : plan.modes) modes.push_back(std::string(to_string(m)));
  for (auto m : plan.methods) methods.push_back(std::string(to_string(m)));
  json j = {{"amplitudes", plan.amplitudes}, {"modes", modes},           {"methods", methods},
            {"trials", plan.trials},         {"samples", plan.samples},  {"p_max", plan.p_max},
            {"n_sources", plan.n_sources},   {"boot_iterations", plan.boot_iterations},
            {"master_seed", plan.master_seed}};
  return j.dump(2);
}

int ground_truth(ExplorationMode mode, int n_sources) {
  constexpr int agent = Configuration::kAgentDof;
  constexpr int head_rotations = 3;
  switch (mode) {
    case ExplorationMode::AgentOnly: return agent;
    case ExplorationMode::EnvironmentOnly: return 2 * n_sources;
    case ExplorationMode::Both: return agent + 2 * n_sources - head_rotations;
  }
  throw ValidationError("mode", "unknown");
}

std::string_view quantity_name(ExplorationMode mode) {
  switch (mode) {
    case ExplorationMode::AgentOnly: return "m";
    case ExplorationMode::EnvironmentOnly: return "e";
    case ExplorationMode::Both: return "b";
  }
  return "?";
}

std::vector<TrialCell> plan_cells(const ExperimentPlan& plan) {
  std::vector<TrialCell> cells;
  for (int a = 0; a < static_cast<int>(plan.amplitudes.size()); ++a)
    for (ExplorationMode mode : plan.modes)
      for (Method method : plan.methods)
        for (int t = 0; t < plan.trials; ++t) cells.push_back({a, mode, method, t});
  return cells;
}

std::uint64_t system_seed(const ExperimentPlan& plan, int amplitude_index, int trial) {
  return derive_seed(plan.master_seed, "system",
                     {static_cast<std::uint64_t>(amplitude_index), static_cast<std::uint64_t>(trial)});
}

std::uint64_t trial_seed(const ExperimentPlan& plan, const TrialCell& cell) {
  return derive_seed(plan.master_seed, "trial",
                     {static_cast<std::uint64_t>(cell.amplitude_index), static_cast<std::uint64_t>(cell.mode),
                      static_cast<std::uint64_t>(cell.method), static_cast<std::uint64_t>(cell.trial)});
}

namespace {

DimensionEstimate estimate_cell(const ExperimentPlan& plan, const TrialCell& cell) {
  const double amplitude = plan.amplitudes.at(static_cast<std::size_t>(cell.amplitude_index));
  SystemSpec spec;
  spec.n_sources = plan.n_sources;
  spec.seed = system_seed(plan, cell.amplitude_index, cell.trial);
  const System system = build_system(spec);
  const std::uint64_t seed = trial_seed(plan, cell);

  std::vector<Configuration> configs;
  if (cell.method == Method::Linear || cell.method == Method::CCA) {
    configs = sample_configurations(system, cell.mode, amplitude, plan.samples, derive_seed(seed, "explore"));
  } else {
    BootstrapParams bp;
    bp.iterations = plan.boot_iterations;
    bp.strategy = cell.method == Method::CCABootInfinitesimal ? BootstrapStrategy::Infinitesimal
                                                              : BootstrapStrategy::Finite;
    bp.target_amplitude = amplitude;
    const BootstrapResult boot = run_bootstrap(system, cell.mode, bp, plan.samples, derive_seed(seed, "bootstrap"));
    configs = configurations_from_offsets(system, cell.mode, boot.commands);
  }
  const VariationMatrix vm = explore(system, configs, cell.mode, amplitude);

  if (cell.method == Method::Linear) return estimate_dim_linear(singular_spectrum(vm.data));
  CcaParams cp;
  cp.seed = derive_seed(seed, "cca");
  const int p_max = std::min<int>(plan.p_max, static_cast<int>(vm.data.rows()));
  DimensionEstimate est = estimate_dim_cca(vm.data, p_max, cp).estimate;
  est.method = cell.method;
  return est;
}

} // namespace

TrialRecord run_trial(const ExperimentPlan& plan, const TrialCell& cell) {
  TrialRecord rec;
  rec.cell = cell;
  rec.amplitude = plan.amplitudes.at(static_cast<std::size_t>(cell.amplitude_index));
  rec.truth = ground_truth(cell.mode, plan.n_sources);
  const auto start = std::chrono::steady_clock::now();
  try {
    DimensionEstimate est = estimate_cell(plan, cell);
    rec.estimate = est.value;
    rec.diagnostics = std::move(est.diagnostics);
  } catch (const std::exception& ex) {
    rec.estimate = 0;
    rec.error = ex.what();
  }
  rec.correct = rec.error.empty() && rec.estimate == rec.truth;
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<TrialRecord> run_experiment(const ExperimentPlan& plan, const RunOptions& options) {
  plan.validate();
  return run_cells(plan, plan_cells(plan), options);
}

std::vector<TrialRecord> run_cells(const ExperimentPlan& plan, const std::vector<TrialCell>& cells,
                                   const RunOptions& options) {
  plan.validate();
  for (const TrialCell& c : cells) {
    if (c.amplitude_index < 0 || c.amplitude_index >= static_cast<int>(plan.amplitudes.size()))
      throw ValidationError("amplitude_index", "outside the plan's amplitude grid");
    if (c.trial < 0) throw ValidationError("trial", "must be >= 0");
  }
  std::vector<TrialRecord> records(cells.size());
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex report;
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      records[k] = run_trial(plan, cells[k]);
      if (options.on_record) {
        std::lock_guard lock(report);
        options.on_record(records[k], ++done, cells.size());
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return records;
}

std::string record_to_json(const TrialRecord& r, bool with_timing) {
  json j = {{"trial", r.cell.trial},
            {"amplitude_index", r.cell.amplitude_index},
            {"amplitude", r.amplitude},
            {"mode", std::string(to_string(r.cell.mode))},
            {"method", std::string(to_string(r.cell.method))},
            {"estimate", r.estimate},
            {"truth", r.truth},
            {"correct", r.correct},
            {"error", r.error},
            {"diagnostics", r.diagnostics}};
  if (with_timing) j["wall_seconds"] = r.wall_seconds;
  return j.dump();
}

TrialRecord record_from_json(const std::string& line) {
  TrialRecord r;
  try {
    const json j = json::parse(line);
    r.cell.trial = j.at("trial").get<int>();
    r.cell.amplitude_index = j.value("amplitude_index", 0);
    r.amplitude = j.at("amplitude").get<double>();
    r.cell.mode = parse_mode(j.at("mode").get<std::string>());
    r.cell.method = parse_method(j.at("method").get<std::string>());
    r.estimate = j.at("estimate").get<int>();
    r.truth = j.at("truth").get<int>();
    r.correct = j.at("correct").get<bool>();
    r.error = j.value("error", std::string());
    r.diagnostics = j.value("diagnostics", std::vector<double>{});
    r.wall_seconds = j.value("wall_seconds", 0.0);
  } catch (const json::exception& ex) {
    throw ValidationError("record", ex.what());
  }
  return r;
}

std::string records_to_jsonl(const std::vector<TrialRecord>& records, bool with_timing) {
  std::string out;
  for (const TrialRecord& r : records) {
    out += record_to_json(r, with_timing);
    out += '\n';
  }
  return out;
}

std::vector<TrialRecord> records_from_jsonl(const std::string& text) {
  std::vector<TrialRecord> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(record_from_json(line));
  return out;
}

PerformanceTable summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw ValidationError("records", "must not be empty");
  // Keyed by (amplitude, quantity order, method) so rows come out sorted.
  using Key = std::tuple<double, int, int>;
  struct Count {
    int trials = 0, correct = 0, dimension = 0;
  };
  std::map<Key, Count> groups;
  // (amplitude, method, trial) -> per-mode record, for the d rows.
  std::map<std::tuple<double, int, int>, std::array<const TrialRecord*, 3>> joint;

  for (const TrialRecord& r : records) {
    Count& c = groups[{r.amplitude, static_cast<int>(r.cell.mode), static_cast<int>(r.cell.method)}];
    ++c.trials;
    c.correct += r.correct ? 1 : 0;
    c.dimension = r.truth;
    auto& slot = joint[{r.amplitude, static_cast<int>(r.cell.method), r.cell.trial}];
    slot[static_cast<std::size_t>(r.cell.mode)] = &r;
  }
  for (const auto& [key, slot] : joint) {
    if (!slot[0] || !slot[1] || !slot[2]) continue;
    const auto [amp, method, trial] = key;
    Count& c = groups[{amp, 3, method}];
    ++c.trials;
    const bool all = slot[0]->correct && slot[1]->correct && slot[2]->correct;
    c.correct += all ? 1 : 0;
    c.dimension = displacement_dim(slot[0]->truth, slot[1]->truth, slot[2]->truth);
  }

  PerformanceTable table;
  for (const auto& [key, c] : groups) {
    const auto [amp, q, method] = key;
    SummaryRow row;
    row.amplitude = amp;
    row.quantity = q == 3 ? "d" : std::string(quantity_name(static_cast<ExplorationMode>(q)));
    row.method = static_cast<Method>(method);
    row.trials = c.trials;
    row.correct = c.correct;
    row.percent = 100.0 * c.correct / c.trials;
    row.dimension = c.dimension;
    table.rows.push_back(row);
  }
  return table;
}

std::string table_to_csv(const PerformanceTable& table) {
  std::string out = "amplitude,quantity,method,trials,correct,percent,dimension\n";
  for (const SummaryRow& r : table.rows) {
    out += format_double(r.amplitude) + ',' + r.quantity + ',' + std::string(to_string(r.method)) + ',' +
           std::to_string(r.trials) + ',' + std::to_string(r.correct) + ',' + format_double(r.percent) + ',' +
           std::to_string(r.dimension) + '\n';
  }
  return out;
}

std::string table_to_json(const PerformanceTable& table) {
  json rows = json::array();
  for (const SummaryRow& r : table.rows)
    rows.push_back({{"amplitude", r.amplitude},
                    {"quantity", r.quantity},
                    {"method", std::string(to_string(r.method))},
                    {"trials", r.trials},
                    {"correct", r.correct},
                    {"percent", r.percent},
                    {"dimension", r.dimension}});
  return json{{"rows", rows}}.dump(2);
}

PerformanceTable table_from_csv(const std::string& text) {
  PerformanceTable table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw ValidationError("summary", "expected 7 columns: " + line);
    SummaryRow r;
    try {
      r.amplitude = std::stod(f[0]);
      r.quantity = f[1];
      r.method = parse_method(f[2]);
      r.trials = std::stoi(f[3]);
      r.correct = std::stoi(f[4]);
      r.percent = std::stod(f[5]);
      r.dimension = std::stoi(f[6]);
    } catch (const std::logic_error&) {
      throw ValidationError("summary", "bad row: " + line);
    }
    table.rows.push_back(r);
  }
  return table;
}

namespace {

std::vector<Method> methods_of(const PerformanceTable& table, const std::string& quantity) {
  std::vector<Method> out;
  for (const SummaryRow& r : table.rows)
    if (r.quantity == quantity && std::find(out.begin(), out.end(), r.method) == out.end())
      out.push_back(r.method);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> amplitudes_of(const PerformanceTable& table, const std::string& quantity) {
  std::vector<double> out;
  for (const SummaryRow& r : table.rows)
    if (r.quantity == quantity) out.push_back(r.amplitude);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const SummaryRow* find_row(const PerformanceTable& table, const std::string& q, Method m, double amp) {
  for (const SummaryRow& r : table.rows)
    if (r.quantity == q && r.method == m && r.amplitude == amp) return &r;
  return nullptr;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

} // namespace

std::string plot_csv(const PerformanceTable& table, const std::string& quantity) {
  const auto methods = methods_of(table, quantity);
  std::string out = "amplitude";
  for (Method m : methods) out += "," + std::string(to_string(m));
  out += '\n';
  for (double amp : amplitudes_of(table, quantity)) {
    out += format_double(amp);
    for (Method m : methods) {
      out += ',';
      if (const SummaryRow* r = find_row(table, quantity, m, amp)) out += format_double(r->percent);
    }
    out += '\n';
  }
  return out;
}

std::string plot_svg(const PerformanceTable& table, const std::string& quantity) {
  const auto methods = methods_of(table, quantity);
  const auto amps = amplitudes_of(table, quantity);
  if (amps.empty()) throw ValidationError("table", "no rows for " + quantity);

  constexpr double width = 640, height = 400, left = 60, right = 170, top = 30, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  double lo = std::floor(std::log10(amps.front())), hi = std::ceil(std::log10(amps.back()));
  if (hi <= lo) hi = lo + 1;
  auto x_of = [&](double amp) { return left + (std::log10(amp) - lo) / (hi - lo) * plot_w; };
  auto y_of = [&](double pct) { return top + (100.0 - pct) / 100.0 * plot_h; };
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"};

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << left + plot_w / 2 << "\" y=\"18\" text-anchor=\"middle\">Estimation of " << quantity
    << "</text>\n";
  for (int pct = 0; pct <= 100; pct += 20) {
    const double y = y_of(pct);
    s << "<line x1=\"" << left << "\" y1=\"" << fixed(y) << "\" x2=\"" << left + plot_w << "\" y2=\"" << fixed(y)
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << left - 6 << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">" << pct << "</text>\n";
  }
  for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
    const double x = left + (e - lo) / (hi - lo) * plot_w;
    s << "<line x1=\"" << fixed(x) << "\" y1=\"" << top << "\" x2=\"" << fixed(x) << "\" y2=\"" << top + plot_h
      << "\" stroke=\"#eee\"/>\n";
    s << "<text x=\"" << fixed(x) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">1e" << e
      << "</text>\n";
  }
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
    << "\" text-anchor=\"middle\">amplitude (deg, log scale)</text>\n";
  s << "<text x=\"16\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << top + plot_h / 2 << ")\">correct estimations (%)</text>\n";

  for (std::size_t k = 0; k < methods.size(); ++k) {
    const char* color = colors[k % 4];
    std::string points;
    for (double amp : amps)
      if (const SummaryRow* r = find_row(table, quantity, methods[k], amp))
        points += fixed(x_of(amp)) + "," + fixed(y_of(r->percent)) + " ";
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    const double ly = top + 10 + 20.0 * static_cast<double>(k);
    s << "<line x1=\"" << left + plot_w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + plot_w + 36 << "\" y2=\""
      << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + plot_w + 42 << "\" y=\"" << ly + 4 << "\">" << to_string(methods[k]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::filesystem::path> emit_plot_data(const PerformanceTable& table, const std::filesystem::path& dir) {
  if (table.rows.empty()) throw ValidationError("table", "empty");
  std::vector<std::filesystem::path> written;
  for (const char* q : {"m", "e", "b"}) {
    if (amplitudes_of(table, q).empty()) continue;
    const auto csv = dir / ("plot_" + std::string(q) + ".csv");
    const auto svg = dir / ("plot_" + std::string(q) + ".svg");
    write_text_file(csv, plot_csv(table, q));
    write_text_file(svg, plot_svg(table, q));
    written.push_back(csv);
    written.push_back(svg);
  }
  if (written.empty()) throw ValidationError("table", "no m, e or b rows");
  return written;
}

} // namespace smdim

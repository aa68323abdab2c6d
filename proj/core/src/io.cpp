#include "smdim/io.hpp"

#include "smdim/error.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace smdim {

using nlohmann::json;

namespace {

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd json_vec(const json& a, const char* field) {
  if (!a.is_array()) throw ValidationError(field, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ValidationError(field, "expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  }
  return v;
}

json spec_json(const SystemSpec& s) {
  json eyes = json::array();
  for (const Vec3& e : s.eye_offsets) eyes.push_back({e.x(), e.y(), e.z()});
  return {{"n_sources", s.n_sources},
          {"cones_per_eye", s.cones_per_eye},
          {"cone_sensitivity", s.cone_sensitivity},
          {"sphere_radius", s.sphere_radius},
          {"eye_offsets", eyes},
          {"retina_focal", s.retina_focal},
          {"cone_box_halfwidth", s.cone_box_halfwidth},
          {"source_cone_halfangle", s.source_cone_halfangle},
          {"seed", s.seed}};
}

SystemSpec json_spec(const json& j) {
  if (!j.is_object()) throw ValidationError("spec", "expected an object");
  SystemSpec s;
  try {
    s.n_sources = j.value("n_sources", s.n_sources);
    s.cones_per_eye = j.value("cones_per_eye", s.cones_per_eye);
    s.cone_sensitivity = j.value("cone_sensitivity", s.cone_sensitivity);
    s.sphere_radius = j.value("sphere_radius", s.sphere_radius);
    s.retina_focal = j.value("retina_focal", s.retina_focal);
    s.cone_box_halfwidth = j.value("cone_box_halfwidth", s.cone_box_halfwidth);
    s.source_cone_halfangle = j.value("source_cone_halfangle", s.source_cone_halfangle);
    s.seed = j.value("seed", s.seed);
    if (j.contains("eye_offsets")) {
      const json& e = j.at("eye_offsets");
      if (!e.is_array() || e.size() != 2) throw ValidationError("eye_offsets", "expected two 3-vectors");
      for (std::size_t k = 0; k < 2; ++k) {
        const Eigen::VectorXd v = json_vec(e[k], "eye_offsets");
        if (v.size() != 3) throw ValidationError("eye_offsets", "expected two 3-vectors");
        s.eye_offsets[k] = v;
      }
    }
  } catch (const json::exception& ex) {
    throw ValidationError("spec", ex.what());
  }
  s.validate();
  return s;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ValidationError("json", ex.what());
  }
}

std::vector<double> split_row(const std::string& line) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    double v = 0.0;
    auto [next, ec] = std::from_chars(p, end, v);
    if (ec != std::errc()) throw ValidationError("csv", "bad number in row: " + line);
    row.push_back(v);
    p = next;
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p < end) {
      if (*p != ',') throw ValidationError("csv", "expected ',' in row: " + line);
      ++p;
    }
  }
  return row;
}

} // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, end);
}

std::string spec_to_json(const SystemSpec& spec) { return spec_json(spec).dump(2); }

SystemSpec spec_from_json(const std::string& text) { return json_spec(parse_json(text)); }

std::string system_to_json(const System& system, std::span<const Configuration> configs) {
  json cones = json::array();
  for (int eye = 0; eye < 2; ++eye) {
    json list = json::array();
    for (const Vec2& c : system.cones(eye)) list.push_back({c.x(), c.y()});
    cones.push_back(list);
  }
  json doc = {{"spec", spec_json(system.spec())},
              {"cone_positions", cones},
              {"reference_config", vec_json(system.reference().values())}};
  if (!configs.empty()) {
    json list = json::array();
    for (const Configuration& c : configs) list.push_back(vec_json(c.values()));
    doc["configs"] = list;
  }
  return doc.dump(2);
}

SystemDocument system_from_json(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw ValidationError("json", "expected an object");
  for (const char* key : {"spec", "cone_positions", "reference_config"})
    if (!doc.contains(key)) throw ValidationError(key, "missing");
  const SystemSpec spec = json_spec(doc.at("spec"));

  const json& cj = doc.at("cone_positions");
  if (!cj.is_array() || cj.size() != 2) throw ValidationError("cone_positions", "expected one list per eye");
  std::array<std::vector<Vec2>, 2> cones;
  for (std::size_t eye = 0; eye < 2; ++eye) {
    if (!cj[eye].is_array()) throw ValidationError("cone_positions", "expected one list per eye");
    for (const json& c : cj[eye]) {
      const Eigen::VectorXd v = json_vec(c, "cone_positions");
      if (v.size() != 2) throw ValidationError("cone_positions", "expected 2-vectors");
      cones[eye].push_back(v);
    }
  }
  Configuration reference(json_vec(doc.at("reference_config"), "reference_config"));
  System system(spec, std::move(cones), std::move(reference));

  std::vector<Configuration> configs;
  if (doc.contains("configs")) {
    const json& list = doc.at("configs");
    if (!list.is_array()) throw ValidationError("configs", "expected an array");
    for (const json& c : list) {
      Configuration cfg(json_vec(c, "configs"));
      if (cfg.size() != system.config_length()) throw ValidationError("configs", "wrong configuration length");
      configs.push_back(std::move(cfg));
    }
  }
  return {std::move(system), std::move(configs)};
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    rows.push_back(split_row(line));
    if (rows.back().size() != rows.front().size()) throw ValidationError("csv", "ragged rows");
  }
  if (rows.empty()) throw ValidationError("csv", "no data rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

void write_variation_csv(std::ostream& out, const VariationMatrix& vm) {
  out << "# mode=" << to_string(vm.mode) << '\n';
  out << "# amplitude=" << format_double(vm.amplitude) << '\n';
  write_matrix_csv(out, vm.data);
}

VariationMatrix read_variation_csv(std::istream& in) {
  VariationMatrix vm;
  std::ostringstream body;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# mode=", 0) == 0) {
      vm.mode = parse_mode(line.substr(7));
    } else if (line.rfind("# amplitude=", 0) == 0) {
      const std::string v = line.substr(12);
      if (std::from_chars(v.data(), v.data() + v.size(), vm.amplitude).ec != std::errc())
        throw ValidationError("amplitude", "bad number");
    } else {
      body << line << '\n';
    }
  }
  std::istringstream rest(body.str());
  vm.data = read_matrix_csv(rest);
  vm.preprocessing.row_mean = Eigen::VectorXd::Zero(vm.data.rows());
  vm.preprocessing.row_scale = Eigen::VectorXd::Ones(vm.data.rows());
  return vm;
}

void write_cost_profile_csv(std::ostream& out, const CostProfile& profile) {
  out << "p,J\n";
  for (int p = 1; p <= profile.p_max(); ++p) out << p << ',' << format_double(profile.at(p)) << '\n';
}

void write_bootstrap_trace_csv(std::ostream& out, const BootstrapTrace& trace) {
  std::size_t width = 0;
  for (const BootstrapRecord& r : trace.records) width = std::max(width, r.spectrum.size());
  out << "iteration";
  for (std::size_t j = 1; j <= width; ++j) out << ",sigma_" << j;
  out << ",spread,cmax\n";
  for (std::size_t it = 0; it < trace.records.size(); ++it) {
    const BootstrapRecord& r = trace.records[it];
    out << it + 1;
    for (std::size_t j = 0; j < width; ++j) {
      out << ',';
      if (j < r.spectrum.size()) out << format_double(r.spectrum[j]);
    }
    out << ',' << format_double(r.spread) << ',' << format_double(r.cmax) << '\n';
  }
}

} // namespace smdim

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cgns/errors.hpp"

namespace cgns::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw InvalidInput(key + " " + what);
}

void reject_unknown(const json& obj, const std::string& section,
                    const std::set<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      bad(section.empty() ? it.key() : section + "." + it.key(), "is not a recognized key");
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) bad(key, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) bad(key, "must be finite");
  return d;
}

std::uint64_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) bad(key, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> get_array(const json& v, const std::string& key) {
  if (!v.is_array()) bad(key, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

const json& section(const json& doc, const char* name) {
  const json& s = doc.at(name);
  if (!s.is_object()) bad(name, "must be an object");
  return s;
}

void apply_triad(TriadParams& p, const json& s) {
  struct Field {
    const char* name;
    double TriadParams::*ptr;
  };
  static const Field fields[] = {
      {"gamma1", &TriadParams::gamma1}, {"gamma2", &TriadParams::gamma2},
      {"gamma3", &TriadParams::gamma3}, {"I12", &TriadParams::I12},
      {"I13", &TriadParams::I13},       {"L12", &TriadParams::L12},
      {"L13", &TriadParams::L13},       {"L23", &TriadParams::L23},
      {"F1", &TriadParams::F1},         {"F2", &TriadParams::F2},
      {"F3", &TriadParams::F3},         {"sigma1", &TriadParams::sigma1},
      {"sigma2", &TriadParams::sigma2}, {"sigma3", &TriadParams::sigma3},
      {"epsilon", &TriadParams::epsilon}};
  std::set<std::string> known;
  for (const auto& f : fields) {
    known.insert(f.name);
    if (s.contains(f.name)) p.*(f.ptr) = get_number(s[f.name], std::string("triad.") + f.name);
  }
  reject_unknown(s, "triad", known);
}

void apply_linear(LinearParams& p, const json& s) {
  reject_unknown(s, "linear", {"k", "l", "d", "r", "lambda_x", "lambda_y", "f_x", "f_y",
                               "sigma1_x", "sigma2_x", "sigma1_y", "sigma2_y"});
  // New dimensions invalidate the default arrays.
  if (s.contains("k") || s.contains("l") || s.contains("d") || s.contains("r")) {
    const Dimensions dims = p.dims;
    p = LinearParams{};
    p.dims = dims;
  }
  if (s.contains("k")) p.dims.k = static_cast<int>(get_count(s["k"], "linear.k"));
  if (s.contains("l")) p.dims.l = static_cast<int>(get_count(s["l"], "linear.l"));
  if (s.contains("d")) p.dims.d = static_cast<int>(get_count(s["d"], "linear.d"));
  if (s.contains("r")) p.dims.r = static_cast<int>(get_count(s["r"], "linear.r"));
  const std::pair<const char*, std::vector<double> LinearParams::*> arrays[] = {
      {"lambda_x", &LinearParams::lambda_x}, {"lambda_y", &LinearParams::lambda_y},
      {"f_x", &LinearParams::f_x},           {"f_y", &LinearParams::f_y},
      {"sigma1_x", &LinearParams::sigma1_x}, {"sigma2_x", &LinearParams::sigma2_x},
      {"sigma1_y", &LinearParams::sigma1_y}, {"sigma2_y", &LinearParams::sigma2_y}};
  for (const auto& [name, ptr] : arrays)
    if (s.contains(name)) p.*ptr = get_array(s[name], std::string("linear.") + name);
}

std::string direction_name(SampleDirection d) { return to_string(d); }

}  // namespace

std::vector<SampleDirection> parse_directions(const std::string& text) {
  if (text == "forward") return {SampleDirection::Forward};
  if (text == "backward") return {SampleDirection::Backward};
  if (text == "both") return {SampleDirection::Forward, SampleDirection::Backward};
  throw InvalidInput("direction must be forward, backward or both, got '" + text + "'");
}

RunConfig apply_config_json(RunConfig cfg, const json& doc) {
  if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
  reject_unknown(doc, "", {"model", "triad", "linear", "grid", "seed", "ensemble", "directions",
                           "initial", "diagnostics", "out", "threads", "export_samples"});
  if (doc.contains("model")) {
    if (!doc["model"].is_string()) bad("model", "must be a string");
    cfg.model = doc["model"].get<std::string>();
  }
  if (doc.contains("triad")) apply_triad(cfg.triad, section(doc, "triad"));
  if (doc.contains("linear")) apply_linear(cfg.linear, section(doc, "linear"));
  if (doc.contains("grid")) {
    const json& g = section(doc, "grid");
    reject_unknown(g, "grid", {"t0", "t_end", "dt"});
    if (g.contains("t0")) cfg.grid.t0 = get_number(g["t0"], "grid.t0");
    if (g.contains("t_end")) cfg.grid.t_end = get_number(g["t_end"], "grid.t_end");
    if (g.contains("dt")) cfg.grid.dt = get_number(g["dt"], "grid.dt");
  }
  if (doc.contains("seed")) cfg.seed = get_count(doc["seed"], "seed");
  if (doc.contains("ensemble")) cfg.ensemble = get_count(doc["ensemble"], "ensemble");
  if (doc.contains("threads"))
    cfg.threads = static_cast<unsigned>(get_count(doc["threads"], "threads"));
  if (doc.contains("export_samples"))
    cfg.export_samples = get_count(doc["export_samples"], "export_samples");
  if (doc.contains("directions")) {
    if (!doc["directions"].is_string()) bad("directions", "must be \"forward\", \"backward\" or \"both\"");
    cfg.directions = parse_directions(doc["directions"].get<std::string>());
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) bad("out", "must be a path string");
    cfg.out = doc["out"].get<std::string>();
  }
  if (doc.contains("initial")) {
    const json& s = section(doc, "initial");
    reject_unknown(s, "initial", {"x0", "y0", "filter_mean", "filter_cov", "sampler"});
    if (s.contains("x0")) cfg.initial.x0 = get_array(s["x0"], "initial.x0");
    if (s.contains("y0")) cfg.initial.y0 = get_array(s["y0"], "initial.y0");
    if (s.contains("filter_mean"))
      cfg.initial.filter_mean = get_array(s["filter_mean"], "initial.filter_mean");
    if (s.contains("filter_cov"))
      cfg.initial.filter_cov = get_array(s["filter_cov"], "initial.filter_cov");
    if (s.contains("sampler")) {
      if (!s["sampler"].is_string()) bad("initial.sampler", "must be \"gaussian\" or \"point\"");
      cfg.initial.sampler = s["sampler"].get<std::string>();
    }
  }
  if (doc.contains("diagnostics")) {
    const json& s = section(doc, "diagnostics");
    reject_unknown(s, "diagnostics", {"max_lag", "segment_len", "extreme_theta", "burn_in",
                                      "spectrum_stride", "probe_times"});
    auto& d = cfg.diagnostics;
    if (s.contains("max_lag")) d.max_lag = get_number(s["max_lag"], "diagnostics.max_lag");
    if (s.contains("segment_len"))
      d.segment_len = static_cast<long>(get_count(s["segment_len"], "diagnostics.segment_len"));
    if (s.contains("extreme_theta"))
      d.extreme_theta = get_number(s["extreme_theta"], "diagnostics.extreme_theta");
    if (s.contains("burn_in")) d.burn_in = get_number(s["burn_in"], "diagnostics.burn_in");
    if (s.contains("spectrum_stride"))
      d.spectrum_stride =
          static_cast<long>(get_count(s["spectrum_stride"], "diagnostics.spectrum_stride"));
    if (s.contains("probe_times"))
      d.probe_times = get_array(s["probe_times"], "diagnostics.probe_times");
  }
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput("config: " + path.string() + " is not valid JSON (" + e.what() + ")");
  }
  return apply_config_json(std::move(base), doc);
}

void validate(const RunConfig& cfg) {
  if (cfg.model != "triad" && cfg.model != "linear")
    bad("model", "must be \"triad\" or \"linear\", got \"" + cfg.model + "\"");
  if (!(cfg.grid.dt > 0.0)) bad("grid.dt", "must be positive");
  if (!(cfg.grid.t_end > cfg.grid.t0)) bad("grid.t_end", "must be greater than grid.t0");
  if (cfg.ensemble < 1) bad("ensemble", "must be at least 1");
  if (cfg.initial.sampler != "gaussian" && cfg.initial.sampler != "point")
    bad("initial.sampler", "must be \"gaussian\" or \"point\"");
  const auto& d = cfg.diagnostics;
  if (!(d.max_lag > 0.0)) bad("diagnostics.max_lag", "must be positive");
  if (d.segment_len < 2) bad("diagnostics.segment_len", "must be at least 2");
  if (!(d.burn_in >= 0.0)) bad("diagnostics.burn_in", "must be non-negative");
  if (d.spectrum_stride < 1) bad("diagnostics.spectrum_stride", "must be at least 1");
  if (cfg.model == "triad") cfg.triad.validate();
}

json to_json(const RunConfig& cfg) {
  const auto& p = cfg.triad;
  json j;
  j["model"] = cfg.model;
  if (cfg.model == "triad") {
    j["triad"] = {{"gamma1", p.gamma1}, {"gamma2", p.gamma2}, {"gamma3", p.gamma3},
                  {"I12", p.I12},       {"I13", p.I13},       {"L12", p.L12},
                  {"L13", p.L13},       {"L23", p.L23},       {"F1", p.F1},
                  {"F2", p.F2},         {"F3", p.F3},         {"sigma1", p.sigma1},
                  {"sigma2", p.sigma2}, {"sigma3", p.sigma3}, {"epsilon", p.epsilon}};
  } else {
    const auto& q = cfg.linear;
    j["linear"] = {{"k", q.dims.k},          {"l", q.dims.l},
                   {"d", q.dims.d},          {"r", q.dims.r},
                   {"lambda_x", q.lambda_x}, {"lambda_y", q.lambda_y},
                   {"f_x", q.f_x},           {"f_y", q.f_y},
                   {"sigma1_x", q.sigma1_x}, {"sigma2_x", q.sigma2_x},
                   {"sigma1_y", q.sigma1_y}, {"sigma2_y", q.sigma2_y}};
  }
  j["grid"] = {{"t0", cfg.grid.t0}, {"t_end", cfg.grid.t_end}, {"dt", cfg.grid.dt}};
  j["seed"] = cfg.seed;
  j["ensemble"] = cfg.ensemble;
  j["directions"] = cfg.directions.size() == 2 ? "both" : direction_name(cfg.directions.front());
  json init = {{"sampler", cfg.initial.sampler}};
  if (cfg.initial.x0) init["x0"] = *cfg.initial.x0;
  if (cfg.initial.y0) init["y0"] = *cfg.initial.y0;
  if (cfg.initial.filter_mean) init["filter_mean"] = *cfg.initial.filter_mean;
  if (cfg.initial.filter_cov) init["filter_cov"] = *cfg.initial.filter_cov;
  j["initial"] = init;
  const auto& d = cfg.diagnostics;
  j["diagnostics"] = {{"max_lag", d.max_lag},         {"segment_len", d.segment_len},
                      {"extreme_theta", d.extreme_theta}, {"burn_in", d.burn_in},
                      {"spectrum_stride", d.spectrum_stride}, {"probe_times", d.probe_times}};
  return j;
}

std::string config_hash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

CgnsModel build_model(const RunConfig& cfg) {
  if (cfg.model == "triad") return triad_model(cfg.triad);
  if (cfg.model == "linear") return linear_model(cfg.linear);
  bad("model", "must be \"triad\" or \"linear\", got \"" + cfg.model + "\"");
}

TimeGrid build_grid(const RunConfig& cfg) {
  return TimeGrid::make(cfg.grid.t0, cfg.grid.t_end, cfg.grid.dt);
}

namespace {

Vector vector_or_zero(const std::optional<std::vector<double>>& v, int n, const char* key) {
  if (!v) return Vector::Zero(n);
  if (static_cast<int>(v->size()) != n)
    bad(key, "must have " + std::to_string(n) + " entries");
  return Eigen::Map<const Vector>(v->data(), n);
}

}  // namespace

Vector initial_x(const RunConfig& cfg, int k) { return vector_or_zero(cfg.initial.x0, k, "initial.x0"); }

Vector initial_y(const RunConfig& cfg, int l) { return vector_or_zero(cfg.initial.y0, l, "initial.y0"); }

GaussianState filter_init(const RunConfig& cfg, int l) {
  GaussianState st = default_filter_init(l);
  st.mean = vector_or_zero(cfg.initial.filter_mean, l, "initial.filter_mean");
  if (cfg.initial.filter_cov) {
    const auto& c = *cfg.initial.filter_cov;
    if (static_cast<int>(c.size()) != l * l)
      bad("initial.filter_cov", "must have " + std::to_string(l * l) + " entries");
    for (int a = 0; a < l; ++a)
      for (int b = 0; b < l; ++b) st.cov(a, b) = c[static_cast<std::size_t>(a * l + b)];
  }
  return st;
}

}  // namespace cgns::app

#include "commands.hpp"

#include "CLI11.hpp"

#include "cgns/errors.hpp"
#include "cgns/io.hpp"
#include "cgns/smoother.hpp"
#include "cgns/version.hpp"
#include "manifest.hpp"
#include "pipeline.hpp"

namespace cgns::app {

using nlohmann::json;

namespace {

std::string trajectory_header(long k, long l) {
  std::string h = "t";
  for (long i = 0; i < k; ++i) h += ",x_" + std::to_string(i);
  for (long i = 0; i < l; ++i) h += ",y_" + std::to_string(i);
  return h;
}

void check_model_shape(const CgnsModel& model, const Trajectory& tr, const fs::path& path) {
  if (tr.x_path.cols() != model.k() || tr.y_path.cols() != model.l())
    throw InvalidInput(path.string() + ": columns " +
                       trajectory_header(tr.x_path.cols(), tr.y_path.cols()) + " do not match model '" +
                       model.name() + "', which expects " + trajectory_header(model.k(), model.l()));
}

void check_posterior(const PosteriorSeries& ps, const Trajectory& tr, SeriesKind kind,
                     const fs::path& path) {
  if (ps.kind != kind)
    throw InvalidInput(path.string() + ": kind column is '" + to_string(ps.kind) + "', expected '" +
                       to_string(kind) + "'");
  if (ps.grid.n_steps != tr.grid.n_steps || ps.states.front().mean.size() != tr.y_path.cols())
    throw InvalidInput(path.string() + ": time grid or mu_* columns do not match the truth file");
}

Trajectory load_truth(const CgnsModel& model, const fs::path& path) {
  if (!fs::exists(path)) throw InvalidInput("truth file not found: " + path.string());
  Trajectory tr = io::read_trajectory_csv(path);
  check_model_shape(model, tr, path);
  return tr;
}

PosteriorSeries load_posterior(const fs::path& path, const Trajectory& tr, SeriesKind kind) {
  if (!fs::exists(path)) throw InvalidInput("posterior file not found: " + path.string());
  PosteriorSeries ps = io::read_posterior_csv(path);
  check_posterior(ps, tr, kind, path);
  ps.grid = tr.grid;
  return ps;
}

Trajectory simulate_truth(const RunConfig& cfg, const CgnsModel& model) {
  return simulate_path(model, initial_x(cfg, model.k()), initial_y(cfg, model.l()),
                       build_grid(cfg), cfg.seed);
}

}  // namespace

std::vector<fs::path> cmd_simulate(const RunConfig& cfg) {
  validate(cfg);
  const CgnsModel model = build_model(cfg);
  const Trajectory tr = simulate_truth(cfg, model);
  const fs::path csv = cfg.out / "truth.csv";
  io::write_trajectory_csv(csv, tr);
  json man = manifest_base(cfg, "simulate");
  man["files"] = {{"truth", "truth.csv"}};
  const fs::path mp = cfg.out / "simulate_manifest.json";
  write_json(mp, man);
  return {csv, mp};
}

std::vector<fs::path> cmd_assimilate(const RunConfig& cfg, const fs::path& truth_csv) {
  validate(cfg);
  const CgnsModel model = build_model(cfg);
  const Trajectory tr = load_truth(model, truth_csv);
  const PosteriorSeries f =
      run_filter(model, tr.x_path, tr.grid, filter_init(cfg, model.l()), truth_csv.string());
  const PosteriorSeries s = run_smoother(model, tr.x_path, tr.grid, f);
  const fs::path fp = cfg.out / "filter.csv", sp = cfg.out / "smoother.csv";
  io::write_posterior_csv(fp, f);
  io::write_posterior_csv(sp, s);
  json man = manifest_base(cfg, "assimilate");
  man["files"] = {{"truth", truth_csv.string()}, {"filter", "filter.csv"}, {"smoother", "smoother.csv"}};
  man["psd_clamps"] = {{"filter", f.psd_clamps}, {"smoother", s.psd_clamps}};
  const fs::path mp = cfg.out / "assimilate_manifest.json";
  write_json(mp, man);
  return {fp, sp, mp};
}

std::vector<fs::path> cmd_sample(const RunConfig& cfg, const SampleOptions& opt) {
  validate(cfg);
  const CgnsModel model = build_model(cfg);
  const Trajectory tr = load_truth(model, opt.truth_csv);
  const PosteriorSeries f = load_posterior(opt.filter_csv, tr, SeriesKind::Filter);
  std::optional<PosteriorSeries> smoother;
  std::vector<long> probes;
  for (double t : opt.probe_times) {
    if (t < tr.grid.t0 || t > tr.grid.time(tr.grid.n_steps))
      throw InvalidInput("probe time " + std::to_string(t) + " lies outside the time grid");
    probes.push_back(tr.grid.index_of(t));
  }
  std::vector<fs::path> written;
  const std::size_t export_count = std::min(cfg.export_samples.value_or(100), cfg.ensemble);
  for (SampleDirection dir : cfg.directions) {
    const bool fwd = dir == SampleDirection::Forward;
    SamplerInit init;
    if (cfg.initial.sampler == "point")
      init = {SamplerInit::Mode::PointMass, tr.y_path.row(fwd ? 0 : tr.grid.n_steps).transpose()};
    const SamplerPlan plan = fwd ? make_forward_plan(model, tr.x_path, tr.grid, f, init)
                                 : make_backward_plan(model, tr.x_path, tr.grid, f, init);
    const std::string dname = to_string(dir);
    const fs::path dir_out = cfg.out / dname;
    EnsembleRequest req;
    req.seed = cfg.seed;
    req.m = cfg.ensemble;
    req.threads = cfg.threads;
    req.export_dir = dir_out;
    req.export_count = export_count;
    req.probe_indices = probes;
    const EnsembleSummary sum = stream_ensemble(plan, req);
    written.insert(written.end(), sum.exported.begin(), sum.exported.end());

    json man = manifest_base(cfg, "sample");
    json sample_files = json::array();
    for (const auto& p : sum.exported) sample_files.push_back(p.filename().string());
    man["direction"] = dname;
    man["m"] = cfg.ensemble;
    man["exported"] = sum.exported.size();
    man["source_series"] = opt.filter_csv.string();
    man["files"] = {{"samples", sample_files}, {"truth", opt.truth_csv.string()}};
    if (!probes.empty()) {
      if (!fwd && !smoother) smoother = run_smoother(model, tr.x_path, tr.grid, f);
      const PosteriorSeries& ref = fwd ? f : *smoother;
      json rep = {{"direction", dname},
                  {"m", cfg.ensemble},
                  {"reference", fwd ? "filter" : "smoother"},
                  {"probes", consistency_report(sum.probes, ref, cfg.ensemble)}};
      const fs::path rp = dir_out / "consistency.json";
      write_json(rp, rep);
      man["files"]["consistency"] = "consistency.json";
      written.push_back(rp);
    }
    const fs::path mp = dir_out / "manifest.json";
    write_json(mp, man);
    written.push_back(mp);
  }
  return written;
}

std::vector<fs::path> cmd_diagnose(const RunConfig& cfg, const DiagnoseOptions& opt) {
  validate(cfg);
  const CgnsModel model = build_model(cfg);
  const Trajectory tr = load_truth(model, opt.truth_csv);
  const PosteriorSeries f = load_posterior(opt.filter_csv, tr, SeriesKind::Filter);
  const PosteriorSeries s = opt.smoother_csv
                                ? load_posterior(*opt.smoother_csv, tr, SeriesKind::Smoother)
                                : run_smoother(model, tr.x_path, tr.grid, f);
  json files = run_diagnostics(cfg, {&model, &tr, &f, &s}, cfg.export_samples.value_or(0));
  json man = manifest_base(cfg, "diagnose");
  files["truth"] = opt.truth_csv.string();
  files["filter"] = opt.filter_csv.string();
  man["files"] = files;
  const fs::path mp = cfg.out / "diagnose_manifest.json";
  write_json(mp, man);
  return {cfg.out / "metrics.json", cfg.out / "spectrum.json", mp};
}

std::vector<fs::path> cmd_case_study(const RunConfig& cfg) {
  validate(cfg);
  const CgnsModel model = build_model(cfg);
  const Trajectory tr = simulate_truth(cfg, model);
  const PosteriorSeries f =
      run_filter(model, tr.x_path, tr.grid, filter_init(cfg, model.l()), "truth.csv");
  const PosteriorSeries s = run_smoother(model, tr.x_path, tr.grid, f);
  io::write_trajectory_csv(cfg.out / "truth.csv", tr);
  io::write_posterior_csv(cfg.out / "filter.csv", f);
  io::write_posterior_csv(cfg.out / "smoother.csv", s);
  json files = run_diagnostics(cfg, {&model, &tr, &f, &s}, cfg.export_samples.value_or(10));
  files["truth"] = "truth.csv";
  files["filter"] = "filter.csv";
  files["smoother"] = "smoother.csv";
  json man = manifest_base(cfg, "case-study");
  man["files"] = files;
  man["psd_clamps"] = {{"filter", f.psd_clamps}, {"smoother", s.psd_clamps}};
  const fs::path mp = cfg.out / "manifest.json";
  write_json(mp, man);
  return {cfg.out / "truth.csv", cfg.out / "filter.csv", cfg.out / "smoother.csv", mp};
}

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> model;
  std::optional<unsigned> threads;
  std::optional<std::size_t> m;
  std::optional<std::size_t> export_samples;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--seed", f.seed, "Random seed");
  sub->add_option("--out", f.out, "Output directory");
  sub->add_option("--model", f.model, "Model name: triad or linear");
  sub->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg = load_config_file(f.config, cfg);
  if (f.model) cfg.model = *f.model;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.m) cfg.ensemble = *f.m;
  if (f.export_samples) cfg.export_samples = *f.export_samples;
  return cfg;
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(io::parse_double(item, "--probe-times"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditional Gaussian nonlinear system toolkit", "cgns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cgns::version());

  CommonFlags sim_f, asm_f, smp_f, dia_f, cs_f;
  std::string truth, filter, smoother, direction, probe_times;

  auto* sim = app.add_subcommand("simulate", "Simulate a truth trajectory");
  add_common(sim, sim_f);

  auto* as = app.add_subcommand("assimilate", "Run the filter and smoother on a truth file");
  add_common(as, asm_f);
  as->add_option("--truth", truth, "Truth CSV (default <out>/truth.csv)");

  auto* smp = app.add_subcommand("sample", "Draw forward or backward posterior samples");
  add_common(smp, smp_f);
  smp->add_option("--truth", truth, "Truth CSV (default <out>/truth.csv)");
  smp->add_option("--filter", filter, "Filter CSV (default <out>/filter.csv)");
  smp->add_option("--direction", direction, "forward, backward or both");
  smp->add_option("-m", smp_f.m, "Number of samples");
  smp->add_option("--probe-times", probe_times, "Comma-separated times for a consistency report");
  smp->add_option("--export-samples", smp_f.export_samples, "Sample CSVs to write (default 100)");

  auto* dia = app.add_subcommand("diagnose", "Compute metrics, ACF/PSD and uncertainty spectra");
  add_common(dia, dia_f);
  dia->add_option("--truth", truth, "Truth CSV (default <out>/truth.csv)");
  dia->add_option("--filter", filter, "Filter CSV (default <out>/filter.csv)");
  dia->add_option("--smoother", smoother, "Smoother CSV (recomputed when omitted)");
  dia->add_option("-m", dia_f.m, "Samples per direction");
  dia->add_option("--export-samples", dia_f.export_samples, "Sample CSVs to write (default 0)");

  auto* cs = app.add_subcommand("case-study", "Run the full triad case study");
  add_common(cs, cs_f);
  cs->add_option("-m", cs_f.m, "Samples per direction");
  cs->add_option("--export-samples", cs_f.export_samples, "Sample CSVs per direction (default 10)");

  std::vector<const char*> argv{"cgns"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    std::vector<fs::path> written;
    auto default_in = [](const std::string& given, const RunConfig& cfg, const char* name) {
      return given.empty() ? cfg.out / name : fs::path(given);
    };
    if (sim->parsed()) {
      written = cmd_simulate(resolve(sim_f));
    } else if (as->parsed()) {
      const RunConfig cfg = resolve(asm_f);
      written = cmd_assimilate(cfg, default_in(truth, cfg, "truth.csv"));
    } else if (smp->parsed()) {
      RunConfig cfg = resolve(smp_f);
      if (!direction.empty()) cfg.directions = parse_directions(direction);
      SampleOptions opt{default_in(truth, cfg, "truth.csv"), default_in(filter, cfg, "filter.csv"),
                        parse_times(probe_times)};
      written = cmd_sample(cfg, opt);
    } else if (dia->parsed()) {
      const RunConfig cfg = resolve(dia_f);
      DiagnoseOptions opt{default_in(truth, cfg, "truth.csv"), default_in(filter, cfg, "filter.csv"),
                          smoother.empty() ? std::nullopt : std::optional<fs::path>(smoother)};
      written = cmd_diagnose(cfg, opt);
    } else if (cs->parsed()) {
      written = cmd_case_study(resolve(cs_f));
    }
    for (const auto& p : written) out << p.string() << '\n';
    return 0;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const DegenerateSeries& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace cgns::app

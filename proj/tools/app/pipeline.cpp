#include "pipeline.hpp"

#include <cmath>
#include <cstdio>

#include "cgns/errors.hpp"
#include "cgns/io.hpp"
#include "cgns/smoother.hpp"
#include "manifest.hpp"

namespace cgns::app {

using nlohmann::json;

Matrix mean_matrix(const PosteriorSeries& series) {
  const auto l = series.states.front().mean.size();
  Matrix m(static_cast<Eigen::Index>(series.states.size()), l);
  for (std::size_t j = 0; j < series.states.size(); ++j)
    m.row(static_cast<Eigen::Index>(j)) = series.states[j].mean.transpose();
  return m;
}

namespace {

std::string sample_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%05zu.csv", i);
  return buf;
}

// Column c, or all columns when c == cols.
Matrix component(const Matrix& m, Eigen::Index c) {
  return c == m.cols() ? m : Matrix(m.col(c));
}

std::string component_key(Eigen::Index c, Eigen::Index l) {
  return c == l ? "all" : "y_" + std::to_string(c);
}

}  // namespace

EnsembleSummary stream_ensemble(const SamplerPlan& plan, const EnsembleRequest& req) {
  const Eigen::Index l = plan.l;
  const auto slots = static_cast<std::size_t>(l + 1);
  EnsembleSummary out;
  for (long idx : req.probe_indices) {
    ProbeMoments pm;
    pm.index = idx;
    pm.time = plan.grid.time(idx);
    pm.mean = Vector::Zero(l);
    pm.cov = Matrix::Zero(l, l);
    out.probes.push_back(pm);
  }
  const bool skill = req.truth_y && req.posterior_mean;
  std::vector<BiasVarianceAccumulator> acc;
  std::vector<double> mean_corr(slots), eta_sum(slots, 0.0), corr_sum(slots, 0.0),
      dominated(slots, 0.0);
  std::vector<Matrix> truth_c, mean_c;
  if (skill) {
    for (Eigen::Index c = 0; c <= l; ++c) {
      truth_c.push_back(component(*req.truth_y, c));
      mean_c.push_back(component(*req.posterior_mean, c));
      acc.emplace_back(truth_c.back());
      mean_corr[static_cast<std::size_t>(c)] = corr(truth_c.back(), mean_c.back());
    }
  }
  if (req.export_dir) fs::create_directories(*req.export_dir);

  std::size_t count = 0;
  for_each_sample(plan, req.seed, req.m, req.threads, [&](std::size_t i, const Matrix& path) {
    ++count;
    if (i == 0) out.first_sample = path;
    if (req.export_dir && i < req.export_count) {
      const fs::path p = *req.export_dir / sample_name(i);
      io::write_sample_csv(p, plan.grid, path);
      out.exported.push_back(p);
    }
    for (auto& pm : out.probes) {
      const Vector v = path.row(pm.index).transpose();
      const Vector delta = v - pm.mean;
      pm.mean += delta / static_cast<double>(count);
      pm.cov += delta * (v - pm.mean).transpose();
    }
    if (skill) {
      for (std::size_t c = 0; c < slots; ++c) {
        const Matrix s = component(path, static_cast<Eigen::Index>(c));
        acc[c].add(s);
        const double cs = corr(truth_c[c], s);
        corr_sum[c] += cs;
        if (std::abs(cs) <= std::abs(mean_corr[c])) dominated[c] += 1.0;
        eta_sum[c] += eta_factor(mean_c[c], s);
      }
    }
  });
  for (auto& pm : out.probes)
    pm.cov = count > 1 ? symmetrize(pm.cov / static_cast<double>(count - 1)) : pm.cov;
  if (skill) {
    const double m = static_cast<double>(count);
    for (std::size_t c = 0; c < slots; ++c) {
      out.bias_variance.push_back(acc[c].result(mean_c[c]));
      out.eta_mean.push_back(eta_sum[c] / m);
      out.corr_dominated_fraction.push_back(dominated[c] / m);
      out.corr_mean_over_samples.push_back(corr_sum[c] / m);
    }
  }
  return out;
}

json consistency_report(const std::vector<ProbeMoments>& probes, const PosteriorSeries& posterior,
                        std::size_t m) {
  json rep = json::array();
  const double md = static_cast<double>(m);
  for (const auto& pm : probes) {
    const auto& st = posterior.states[static_cast<std::size_t>(pm.index)];
    const auto l = st.mean.size();
    json mean_dev = json::array(), cov_dev = json::array();
    double worst_mean = 0.0, worst_cov = 0.0;
    for (Eigen::Index a = 0; a < l; ++a) {
      const double se = std::sqrt(st.cov(a, a) / md);
      const double z = se > 0.0 ? std::abs(pm.mean(a) - st.mean(a)) / se : 0.0;
      worst_mean = std::max(worst_mean, z);
      mean_dev.push_back({{"ensemble", pm.mean(a)},
                          {"posterior", st.mean(a)},
                          {"abs_error", std::abs(pm.mean(a) - st.mean(a))},
                          {"standard_errors", z}});
    }
    for (Eigen::Index a = 0; a < l; ++a)
      for (Eigen::Index b = a; b < l; ++b) {
        const double scale = std::sqrt(st.cov(a, a) * st.cov(b, b));
        const double rel = scale > 0.0 ? std::abs(pm.cov(a, b) - st.cov(a, b)) / scale : 0.0;
        worst_cov = std::max(worst_cov, rel);
        cov_dev.push_back({{"entry", "R_" + std::to_string(a) + std::to_string(b)},
                           {"ensemble", pm.cov(a, b)},
                           {"posterior", st.cov(a, b)},
                           {"relative_error", rel}});
      }
    rep.push_back({{"time", pm.time},
                   {"index", pm.index},
                   {"mean", mean_dev},
                   {"cov", cov_dev},
                   {"max_mean_standard_errors", worst_mean},
                   {"max_cov_relative_error", worst_cov},
                   {"mean_within_4se", worst_mean <= 4.0},
                   {"cov_within_10pct", worst_cov <= 0.1}});
  }
  return rep;
}

json metric_json(const MetricReport& r) {
  return {{"srmse", r.srmse},           {"corr", r.corr},
          {"corr_extreme", r.corr_extreme}, {"eta", r.eta},
          {"bias_sq", r.bias_sq},       {"variance_term", r.variance_term},
          {"expected_sq_srmse", r.expected_sq_srmse}};
}

json spectrum_json(const SpectrumTrack& tr, double burn_in_time) {
  auto track = [](const EigTrack& e) { return json{{"max", e.max}, {"min", e.min}}; };
  std::size_t post = 0, negative = 0;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (tr.times[i] < burn_in_time) continue;
    ++post;
    if (tr.difference.min[i] < 0.0) ++negative;
  }
  return {{"times", tr.times},
          {"damping", {{"unconditional", track(tr.damping_unconditional)},
                       {"forward", track(tr.damping_forward)},
                       {"backward", track(tr.damping_backward)}}},
          {"noise", {{"unconditional", track(tr.noise_unconditional)},
                     {"forward", track(tr.noise_forward)},
                     {"backward", track(tr.noise_backward)}}},
          {"difference", track(tr.difference)},
          {"summary",
           {{"min_eig_syy_minus_b", tr.min_eig_syy_minus_b},
            {"min_eig_forward_minus_backward_noise", tr.min_eig_rgr},
            {"min_noise_eig", tr.min_noise_eig},
            {"difference_negative_fraction_after_burn_in",
             post ? static_cast<double>(negative) / static_cast<double>(post) : 0.0}}}};
}

namespace {

MetricReport mean_report(const Matrix& truth, const Matrix& est, const std::vector<bool>* mask) {
  MetricReport r;
  r.srmse = srmse(truth, est);
  r.corr = corr(truth, est);
  r.corr_extreme = mask ? corr_conditional(truth, est, *mask) : std::nan("");
  r.eta = 1.0;
  r.bias_sq = r.srmse * r.srmse;
  r.variance_term = 0.0;
  r.expected_sq_srmse = r.bias_sq;
  return r;
}

json nan_safe(json j) {
  for (auto& [k, v] : j.items())
    if (v.is_number_float() && !std::isfinite(v.get<double>())) v = nullptr;
  return j;
}

}  // namespace

json run_diagnostics(const RunConfig& cfg, const DiagnoseInputs& in, std::size_t export_count) {
  const CgnsModel& model = *in.model;
  const Trajectory& truth = *in.truth;
  const TimeGrid& grid = truth.grid;
  const Eigen::Index l = model.l();
  const fs::path out = cfg.out;
  fs::create_directories(out);
  const auto& dc = cfg.diagnostics;

  const Matrix fmean = mean_matrix(*in.filter);
  const Matrix smean = mean_matrix(*in.smoother);
  json files;
  json metrics;

  // Posterior-mean skill per component.
  std::vector<std::vector<bool>> masks;
  for (Eigen::Index c = 0; c < l; ++c)
    masks.push_back(extreme_mask(truth.y_path.col(c), dc.extreme_theta));
  const std::pair<const char*, const Matrix*> mean_sources[] = {{"filter_mean", &fmean},
                                                                {"smoother_mean", &smean}};
  for (const auto& [name, est] : mean_sources) {
    json by_comp;
    for (Eigen::Index c = 0; c <= l; ++c) {
      const Matrix tc = component(truth.y_path, c);
      const Matrix ec = component(*est, c);
      by_comp[component_key(c, l)] =
          nan_safe(metric_json(mean_report(tc, ec, c < l ? &masks[static_cast<std::size_t>(c)] : nullptr)));
    }
    metrics["sources"][name] = by_comp;
  }
  double tr_f = 0.0, tr_s = 0.0;
  for (std::size_t j = 0; j < in.filter->states.size(); ++j) {
    tr_f += in.filter->states[j].cov.trace();
    tr_s += in.smoother->states[j].cov.trace();
  }
  const double n_states = static_cast<double>(in.filter->states.size());
  metrics["posterior_variance"] = {{"filter_mean_trace", tr_f / n_states},
                                   {"smoother_mean_trace", tr_s / n_states}};

  // Sampler ensembles.
  std::vector<std::pair<std::string, Matrix>> series_for_acf{
      {"truth", truth.y_path}, {"filter_mean", fmean}, {"smoother_mean", smean}};
  const SamplerInit init =
      cfg.initial.sampler == "point"
          ? SamplerInit{SamplerInit::Mode::PointMass, Vector()}
          : SamplerInit{};
  for (SampleDirection dir : cfg.directions) {
    const bool fwd = dir == SampleDirection::Forward;
    SamplerInit di = init;
    if (di.mode == SamplerInit::Mode::PointMass)
      di.point = truth.y_path.row(fwd ? 0 : grid.n_steps).transpose();
    const SamplerPlan plan = fwd ? make_forward_plan(model, truth.x_path, grid, *in.filter, di)
                                 : make_backward_plan(model, truth.x_path, grid, *in.filter, di);
    const std::string dname = to_string(dir);
    EnsembleRequest req;
    req.seed = cfg.seed;
    req.m = cfg.ensemble;
    req.threads = cfg.threads;
    req.export_count = std::min(export_count, cfg.ensemble);
    if (req.export_count > 0) req.export_dir = out / dname;
    req.truth_y = &truth.y_path;
    req.posterior_mean = fwd ? &fmean : &smean;
    for (double t : dc.probe_times)
      if (t >= grid.t0 && t <= grid.time(grid.n_steps)) req.probe_indices.push_back(grid.index_of(t));
    const EnsembleSummary sum = stream_ensemble(plan, req);
    if (!sum.probes.empty())
      metrics["consistency"][dname] = {
          {"reference", fwd ? "filter" : "smoother"},
          {"probes", consistency_report(sum.probes, fwd ? *in.filter : *in.smoother, cfg.ensemble)}};

    if (req.export_dir) {
      json sample_files = json::array();
      for (const auto& p : sum.exported) sample_files.push_back(p.filename().string());
      json man = manifest_base(cfg, "sample");
      man["direction"] = dname;
      man["m"] = cfg.ensemble;
      man["exported"] = sum.exported.size();
      man["source_series"] = fwd ? "filter" : "smoother";
      man["files"] = {{"samples", sample_files}};
      write_json(*req.export_dir / "manifest.json", man);
      files[dname + "_manifest"] = (fs::path(dname) / "manifest.json").string();
    }

    json by_comp;
    const std::string src = dname + "_sample";
    for (Eigen::Index c = 0; c <= l; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      const Matrix tc = component(truth.y_path, c);
      const Matrix sc = component(sum.first_sample, c);
      MetricReport r;
      r.srmse = srmse(tc, sc);
      r.corr = corr(tc, sc);
      r.corr_extreme = c < l ? corr_conditional(tc, sc, masks[cu]) : std::nan("");
      r.eta = sum.eta_mean[cu];
      r.bias_sq = sum.bias_variance[cu].bias_sq;
      r.variance_term = sum.bias_variance[cu].variance_term;
      r.expected_sq_srmse = sum.bias_variance[cu].expected_sq_srmse;
      json j = nan_safe(metric_json(r));
      j["corr_dominated_fraction"] = sum.corr_dominated_fraction[cu];
      j["corr_mean_over_samples"] = sum.corr_mean_over_samples[cu];
      by_comp[component_key(c, l)] = j;
    }
    metrics["sources"][src] = by_comp;
    metrics["ensembles"][dname] = {{"m", cfg.ensemble}, {"seed", cfg.seed},
                                   {"reference_mean", fwd ? "filter" : "smoother"}};
    series_for_acf.emplace_back(src, sum.first_sample);
  }

  // ACF / PSD after burn-in.
  const long b = grid.index_of(grid.t0 + dc.burn_in);
  const long n = grid.size() - b;
  if (n < 4) throw InvalidInput("diagnostics.burn_in leaves too few points for ACF/PSD");
  const long max_lag = std::min<long>(std::lround(dc.max_lag / grid.dt), n - 1);
  const long seg = std::min<long>(dc.segment_len, n / 2);
  for (const auto& [name, series] : series_for_acf) {
    const Matrix tail = series.bottomRows(n);
    for (Eigen::Index c = 0; c < l; ++c) {
      const std::string suffix = name + "_y" + std::to_string(c) + ".csv";
      const AcfCurve a = acf(Matrix(tail.col(c)), max_lag, grid.dt);
      io::write_curve_csv(out / ("acf_" + suffix), "lag", a.lags, a.values);
      files["acf"][name]["y" + std::to_string(c)] = "acf_" + suffix;
      if (seg >= 2) {
        const PsdEstimate p = psd_estimate(tail.col(c), seg, grid.dt);
        io::write_curve_csv(out / ("psd_" + suffix), "freq", p.freqs, p.power);
        files["psd"][name]["y" + std::to_string(c)] = "psd_" + suffix;
      }
    }
    if (name == "forward_sample" || name == "backward_sample") {
      const Matrix& ref = name == "forward_sample" ? fmean : smean;
      const AcfDecomposition d = acf_decomposition(tail, ref.bottomRows(n), max_lag, grid.dt);
      metrics["acf_decomposition"][name] = {{"beta1", d.beta1}, {"beta2", d.beta2}};
    }
  }

  // Uncertainty spectra along the truth path.
  const SpectrumTrack track =
      uncertainty_spectra(model, {SpectrumRun{&truth.x_path, in.filter}}, dc.spectrum_stride);
  write_json(out / "spectrum.json", spectrum_json(track, grid.t0 + dc.burn_in));
  files["spectrum"] = "spectrum.json";
  write_json(out / "metrics.json", metrics);
  files["metrics"] = "metrics.json";
  return files;
}

}  // namespace cgns::app

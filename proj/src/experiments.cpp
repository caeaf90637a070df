// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "sdese/error.hpp"

namespace sdese {

using nlohmann::json;

std::string_view library_version() noexcept { return "0.1.0"; }

std::string_view to_string(SweepKind kind) noexcept {
  switch (kind) {
    case SweepKind::variance: return "variance";
    case SweepKind::trsp: return "trsp";
    case SweepKind::steps: return "steps";
  }
  return "unknown";
}

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::gaussian_toy: return "gaussian_toy";
    case TaskKind::wav_pair: return "wav_pair";
  }
  return "unknown";
}

namespace {

SweepKind parse_sweep_kind(std::string_view s) {
  if (s == "variance") return SweepKind::variance;
  if (s == "trsp") return SweepKind::trsp;
  if (s == "steps") return SweepKind::steps;
  fail(ErrorCode::parse, "unknown sweep kind '" + std::string(s) + "'");
}

TaskKind parse_task_kind(std::string_view s) {
  if (s == "gaussian_toy") return TaskKind::gaussian_toy;
  if (s == "wav_pair") return TaskKind::wav_pair;
  fail(ErrorCode::parse, "unknown task '" + std::string(s) + "'");
}

std::string fmt6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double round6(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(fmt6(v).c_str(), nullptr);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

// ---------------------------------------------------------------- toy task

GaussianToy make_gaussian_toy(const GaussianToyConfig& cfg, std::uint64_t seed) {
  require(cfg.bins > 0 && cfg.frames > 0, ErrorCode::invalid_argument,
          "GaussianToyConfig: bins and frames must be > 0");
  require(cfg.speech_var > 0.0 && std::isfinite(cfg.snr_db), ErrorCode::invalid_argument,
          "GaussianToyConfig: speech_var must be > 0 and snr_db finite");
  require(cfg.repeats > 0, ErrorCode::invalid_argument, "GaussianToyConfig: repeats must be > 0");
  const double noise_var = cfg.speech_var * std::pow(10.0, -cfg.snr_db / 10.0);
  const double w = cfg.speech_var / (cfg.speech_var + noise_var);

  RandomSource rng(seed);
  GaussianToy toy;
  const auto rows = static_cast<std::size_t>(cfg.bins);
  const auto cols = static_cast<std::size_t>(cfg.frames);
  toy.s = ComplexGrid(rows, cols);
  toy.n = ComplexGrid(rows, cols);
  rng.fill_complex_normal(toy.s);
  rng.fill_complex_normal(toy.n);
  toy.s *= std::sqrt(cfg.speech_var);
  toy.n *= std::sqrt(noise_var);
  toy.y = toy.s + toy.n;
  toy.posterior_mean = toy.y * w;
  toy.posterior_var = w * noise_var;
  return toy;
}

void SweepPlan::validate() const {
  require(!sdes.empty(), ErrorCode::invalid_argument, "SweepPlan: no SDE configurations");
  require(!samplers.empty(), ErrorCode::invalid_argument, "SweepPlan: no sampler configurations");
  for (const SamplerConfig& s : samplers) {
    require(s.n_steps >= 1 && s.t_rsp > 0.0 && std::isfinite(s.t_rsp),
            ErrorCode::invalid_argument, "SweepPlan: sampler needs t_rsp > 0 and n_steps >= 1");
  }
  require(!t_rsp_grid.empty(), ErrorCode::invalid_argument, "SweepPlan: empty t_rsp grid");
  for (double t : t_rsp_grid) {
    require(t > 0.0 && std::isfinite(t), ErrorCode::invalid_argument,
            "SweepPlan: t_rsp grid values must be > 0");
  }
  require(trsp_dt > 0.0 && std::isfinite(trsp_dt), ErrorCode::invalid_argument,
          "SweepPlan: trsp_dt must be > 0");
  require(!step_counts.empty(), ErrorCode::invalid_argument, "SweepPlan: empty step counts");
  for (int n : step_counts) {
    require(n >= 1, ErrorCode::invalid_argument, "SweepPlan: step counts must be >= 1");
  }
  stft.validate();
  require(segments.seg_len > 0, ErrorCode::invalid_argument, "SweepPlan: seg_len must be > 0");
  if (task == TaskKind::gaussian_toy) {
    require(toy.bins == stft.bins(), ErrorCode::invalid_argument,
            "SweepPlan: toy bins must equal the STFT bin count");
    require(toy.frames > 0 && toy.repeats > 0 && toy.speech_var > 0.0,
            ErrorCode::invalid_argument, "SweepPlan: invalid toy configuration");
  } else {
    for (const auto* p : {&wav.clean, &wav.noisy}) {
      std::error_code ec;
      if (p->empty() || !std::filesystem::is_regular_file(*p, ec)) {
        fail(ErrorCode::io, "SweepPlan: wav_pair input not found: '" + p->string() + "'");
      }
    }
    wav.compression.validate();
  }
}

std::string SweepRow::config_key() const {
  return std::string(to_string(sde.kind())) + ":c=" + fmt6(sde.c()) + ":k=" + fmt6(sde.k()) +
         ":gamma=" + fmt6(sde.gamma()) + ":T=" + fmt6(sde.T()) + ":t_rsp=" +
         fmt6(sampler.t_rsp) + ":N=" + std::to_string(sampler.n_steps) +
         ":seed=" + std::to_string(sampler.seed) + (sampler.denoise_final ? ":denoise" : "");
}

namespace {

auto sort_key(const SweepRow& r) {
  return std::make_tuple(static_cast<int>(r.sde.kind()), r.sde.c(), r.sde.k(), r.sde.gamma(),
                         r.sde.T(), -r.sampler.t_rsp, r.sampler.n_steps, r.sampler.seed,
                         r.sampler.denoise_final);
}

SamplerConfig clamp_to_horizon(SamplerConfig s, const SdeSpec& spec) {
  s.t_rsp = std::min(s.t_rsp, spec.T());
  return s;
}

// Stream base shared by every configuration with the same sampler seed, so
// that rows differ only through their settings.
std::uint64_t row_stream(const SweepPlan& plan, const SamplerConfig& sampler) {
  return RandomSource::derive_seed(plan.seed, sampler.seed);
}

double status_threshold(const GaussianToy& toy) {
  return 2.0 * std::sqrt(static_cast<double>(toy.y.size()) * toy.posterior_var);
}

void mark_failure(SweepRow& row, const Error& e) {
  row.na_db = row.proxy_db = row.residual = kNaN;
  row.status = e.code() == ErrorCode::diverged ? "diverged"
                                               : std::string("failed_") + token(e.code());
}

}  // namespace

SweepRow evaluate_toy_row(const GaussianToy& toy, const SdeSpec& spec,
                          const SamplerConfig& sampler, const SweepPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.sde = spec;
  row.sampler = clamp_to_horizon(sampler, spec);
  row.prior_mismatch = mean_coefficients(spec, row.sampler.t_rsp).a * (toy.s - toy.y).norm();
  try {
    const std::size_t length = natural_length(toy.y.cols(), plan.stft);
    const Waveform s_wave = istft(toy.s, plan.stft, length);
    const Waveform n_wave = istft(toy.n, plan.stft, length);
    const ScoreFunction score =
        analytic_gaussian_score(GaussianTask{toy.posterior_mean, toy.posterior_var, spec});
    const std::uint64_t base = row_stream(plan, row.sampler);
    const int repeats = plan.toy.repeats;
    double na = 0.0;
    double proxy = 0.0;
    double residual = 0.0;
    for (int r = 0; r < repeats; ++r) {
      RandomSource rng = RandomSource::split(base, static_cast<std::uint64_t>(r));
      const ComplexGrid x = reverse_euler_maruyama(spec, toy.y, score, row.sampler, rng);
      residual += (x - toy.posterior_mean).norm();
      const GainFunction gain = gain_function(x, toy.y);
      const FilteredComponents fc = filtered_components(gain, toy.s, toy.y, plan.stft, length);
      na += noise_attenuation(n_wave, fc.n_tilde, plan.segments);
      proxy += speech_quality_proxy(fc.s_tilde, s_wave, plan.segments);
    }
    row.na_db = na / repeats;
    row.proxy_db = proxy / repeats;
    row.residual = residual / repeats;
    if (row.residual > status_threshold(toy)) row.status = "high_residual";
  } catch (const Error& e) {
    mark_failure(row, e);
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

WavMetrics evaluate_wav_estimate(const Waveform& clean, const Waveform& noisy,
                                 const Waveform& enhanced, const StftConfig& stft_cfg,
                                 const SegmentOptions& segments, const MetricAdapter& external) {
  if (clean.size() != noisy.size() || clean.size() != enhanced.size()) {
    fail(ErrorCode::shape_mismatch, "evaluate_wav_estimate: clean/noisy/enhanced lengths " +
                                        std::to_string(clean.size()) + "/" +
                                        std::to_string(noisy.size()) + "/" +
                                        std::to_string(enhanced.size()) + " differ");
  }
  const ComplexGrid S = stft(clean, stft_cfg);
  const ComplexGrid Y = stft(noisy, stft_cfg);
  const ComplexGrid S_hat = stft(enhanced, stft_cfg);
  // Metrics only cover samples reached by some frame.
  const std::size_t length = natural_length(S.cols(), stft_cfg);
  const FilteredComponents fc = filtered_components(gain_function(S_hat, Y), S, Y, stft_cfg, length);
  // References go through the same synthesis as the filtered parts, so edge
  // taper cancels; in the interior they equal clean and noisy - clean.
  const Waveform s_ref = istft(S, stft_cfg, length);
  const Waveform n_ref = istft(Y - S, stft_cfg, length);

  WavMetrics out;
  out.na_db = noise_attenuation(n_ref, fc.n_tilde, segments);
  out.proxy_db = speech_quality_proxy(fc.s_tilde, s_ref, segments);
  if (external.configured()) out.external_metric = external.evaluate(clean, enhanced);
  return out;
}

namespace {

struct WavContext {
  Waveform clean;
  Waveform noisy;
  ComplexGrid S;
  ComplexGrid Y;
};

SweepRow evaluate_wav_row(const WavContext& ctx, const SdeSpec& spec, const SamplerConfig& sampler,
                          const SweepPlan& plan) {
  const auto start = std::chrono::steady_clock::now();
  SweepRow row;
  row.sde = spec;
  row.sampler = clamp_to_horizon(sampler, spec);
  const CompressionConfig& comp = plan.wav.compression;
  const ComplexGrid Yc = compress(ctx.Y, comp);
  const ComplexGrid Sc = compress(ctx.S, comp);
  row.prior_mismatch = mean_coefficients(spec, row.sampler.t_rsp).a * (Sc - Yc).norm();
  try {
    const ScoreFunction score = plan.wav.score_factory(spec, Yc);
    RandomSource rng(row_stream(plan, row.sampler));
    const ComplexGrid xc = reverse_euler_maruyama(spec, Yc, score, row.sampler, rng);
    row.residual = (xc - Sc).norm();
    const ComplexGrid s_hat = decompress(xc, comp);
    const Waveform enhanced = istft(s_hat, plan.stft, ctx.clean.size());
    const WavMetrics m =
        evaluate_wav_estimate(ctx.clean, ctx.noisy, enhanced, plan.stft, plan.segments, plan.external);
    row.na_db = m.na_db;
    row.proxy_db = m.proxy_db;
    row.external_metric = m.external_metric;
  } catch (const Error& e) {
    mark_failure(row, e);
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

struct Job {
  SdeSpec spec;
  SamplerConfig sampler;
};

// Rows run concurrently; each writes only its own slot.
std::vector<SweepRow> run_jobs(const SweepPlan& plan, const std::vector<Job>& jobs) {
  plan.validate();
  std::optional<GaussianToy> toy;
  std::optional<WavContext> wav;
  if (plan.task == TaskKind::gaussian_toy) {
    toy = make_gaussian_toy(plan.toy, RandomSource::derive_seed(plan.seed, ~0ULL));
  } else {
    if (!plan.wav.score_factory) {
      fail(ErrorCode::not_configured,
           "wav_pair sweeps need a score factory; no trained score ships with this library "
           "(use the metrics command to score an externally enhanced file)");
    }
    WavContext ctx{read_wav(plan.wav.clean), read_wav(plan.wav.noisy), {}, {}};
    if (ctx.clean.size() != ctx.noisy.size()) {
      fail(ErrorCode::shape_mismatch, "wav_pair: clean and noisy lengths differ");
    }
    ctx.S = stft(ctx.clean, plan.stft);
    ctx.Y = stft(ctx.noisy, plan.stft);
    wav = std::move(ctx);
  }

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      rows[i] = toy ? evaluate_toy_row(*toy, jobs[i].spec, jobs[i].sampler, plan)
                    : evaluate_wav_row(*wav, jobs[i].spec, jobs[i].sampler, plan);
    }
  };
  const std::size_t n_threads =
      std::min<std::size_t>(jobs.size(), std::max(1U, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return sort_key(a) < sort_key(b); });
  return rows;
}

SweepReport make_report(const SweepPlan& plan, SweepKind kind, std::vector<SweepRow> rows) {
  for (SweepRow& r : rows) r.sweep = kind;
  return {kind, plan.task, plan.seed, std::string(library_version()), std::move(rows)};
}

// Fills relative_change within groups of rows sharing an SDE, against the
// row selected by is_reference.
template <typename IsReference>
void fill_relative_change(std::vector<SweepRow>& rows, IsReference is_reference) {
  for (SweepRow& r : rows) {
    const SweepRow* ref = nullptr;
    for (const SweepRow& cand : rows) {
      if (cand.sde == r.sde && cand.sampler.seed == r.sampler.seed &&
          cand.sampler.denoise_final == r.sampler.denoise_final && is_reference(cand)) {
        ref = &cand;
        break;
      }
    }
    r.relative_change = (ref == nullptr || ref == &r) ? 0.0
                                                      : (r.residual - ref->residual) / ref->residual;
  }
}

}  // namespace

SweepReport run_variance_sweep(const SweepPlan& plan) {
  std::vector<Job> jobs;
  for (const SdeSpec& spec : plan.sdes) {
    for (const SamplerConfig& s : plan.samplers) jobs.push_back({spec, s});
  }
  return make_report(plan, SweepKind::variance, run_jobs(plan, jobs));
}

SweepReport run_trsp_sweep(const SweepPlan& plan) {
  plan.validate();
  std::vector<Job> jobs;
  for (const SdeSpec& spec : plan.sdes) {
    std::set<double> seen;
    for (double t : plan.t_rsp_grid) {
      SamplerConfig s = plan.samplers.front();
      s.t_rsp = std::min(t, spec.T());
      if (!seen.insert(s.t_rsp).second) continue;
      s.n_steps = std::max(1, static_cast<int>(std::lround(s.t_rsp / plan.trsp_dt)));
      jobs.push_back({spec, s});
    }
  }
  std::vector<SweepRow> rows = run_jobs(plan, jobs);
  // Reference: the largest start point of each SDE, t_rsp = T when present.
  std::map<std::string, double> top;
  for (const SweepRow& r : rows) {
    double& best = top[r.sde.to_config()];
    best = std::max(best, r.sampler.t_rsp);
  }
  fill_relative_change(rows, [&](const SweepRow& r) {
    return r.sampler.t_rsp == top[r.sde.to_config()];
  });
  return make_report(plan, SweepKind::trsp, std::move(rows));
}

SweepReport run_step_robustness(const SweepPlan& plan) {
  plan.validate();
  std::vector<Job> jobs;
  for (const SdeSpec& spec : plan.sdes) {
    std::set<int> seen;
    for (int n : plan.step_counts) {
      if (!seen.insert(n).second) continue;
      SamplerConfig s = plan.samplers.front();
      s.n_steps = n;
      jobs.push_back({spec, s});
    }
  }
  std::vector<SweepRow> rows = run_jobs(plan, jobs);
  const int reference = plan.step_counts.front();
  fill_relative_change(rows, [&](const SweepRow& r) { return r.sampler.n_steps == reference; });
  return make_report(plan, SweepKind::steps, std::move(rows));
}

SweepReport run_sweep(const SweepPlan& plan, SweepKind kind) {
  switch (kind) {
    case SweepKind::variance: return run_variance_sweep(plan);
    case SweepKind::trsp: return run_trsp_sweep(plan);
    case SweepKind::steps: return run_step_robustness(plan);
  }
  fail(ErrorCode::invalid_argument, "run_sweep: unknown sweep kind");
}

// ---------------------------------------------------------------- reports

std::string_view csv_header() {
  return "sweep,task,plan_seed,sde,c,k,gamma,T,t_rsp,n_steps,sampler_seed,denoise_final,"
         "na_db,proxy_db,residual,prior_mismatch,relative_change,external_metric,status";
}

namespace {

json number6(double v) {
  if (!std::isfinite(v)) return nullptr;
  return round6(v);
}

double number_or_nan(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json sde_to_json(const SdeSpec& s) {
  return {{"kind", std::string(to_string(s.kind()))},
          {"c", number6(s.c())},
          {"k", number6(s.k())},
          {"gamma", number6(s.gamma())},
          {"T", number6(s.T())}};
}

json sampler_to_json(const SamplerConfig& s) {
  return {{"t_rsp", number6(s.t_rsp)},
          {"n_steps", s.n_steps},
          {"seed", s.seed},
          {"denoise_final", s.denoise_final}};
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const char* what) {
  if (!j.is_object()) fail(ErrorCode::parse, std::string(what) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(ErrorCode::parse, std::string(what) + ": unknown key '" + key + "'");
    }
  }
}

SdeSpec sde_from_json(const json& j) {
  check_keys(j, {"kind", "c", "k", "gamma", "T"}, "sde");
  const SdeSpec d = SdeSpec::defaults(parse_sde_kind(j.at("kind").get<std::string>()));
  return {d.kind(), j.value("gamma", d.gamma()), j.value("c", d.c()), j.value("k", d.k()),
          j.value("T", d.T())};
}

SamplerConfig sampler_from_json(const json& j) {
  check_keys(j, {"t_rsp", "n_steps", "seed", "denoise_final"}, "sampler");
  SamplerConfig s;
  s.t_rsp = j.value("t_rsp", s.t_rsp);
  s.n_steps = j.value("n_steps", s.n_steps);
  s.seed = j.value("seed", s.seed);
  s.denoise_final = j.value("denoise_final", s.denoise_final);
  return s;
}

json row_to_json(const SweepRow& r, bool include_timing) {
  json j = {{"config", r.config_key()},
            {"sde", sde_to_json(r.sde)},
            {"sampler", sampler_to_json(r.sampler)},
            {"na_db", number6(r.na_db)},
            {"proxy_db", number6(r.proxy_db)},
            {"residual", number6(r.residual)},
            {"prior_mismatch", number6(r.prior_mismatch)},
            {"relative_change", number6(r.relative_change)},
            {"external_metric", r.external_metric ? number6(*r.external_metric) : json(nullptr)},
            {"status", r.status}};
  if (include_timing) j["wall_seconds"] = number6(r.wall_seconds);
  return j;
}

// Parse errors from the JSON library surface as ErrorCode::parse.
template <typename F>
auto guarded_parse(const char* what, F&& f) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::parse, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string serialize_report(const SweepReport& report, ReportFormat format, bool include_timing) {
  if (format == ReportFormat::json) {
    json rows = json::array();
    for (const SweepRow& r : report.rows) rows.push_back(row_to_json(r, include_timing));
    const json j = {{"version", report.version},
                    {"sweep", std::string(to_string(report.sweep))},
                    {"task", std::string(to_string(report.task))},
                    {"seed", report.seed},
                    {"rows", std::move(rows)}};
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << csv_header() << (include_timing ? ",wall_seconds\n" : "\n");
  for (const SweepRow& r : report.rows) {
    out << to_string(r.sweep) << ',' << to_string(report.task) << ',' << report.seed << ','
        << to_string(r.sde.kind()) << ',' << fmt6(r.sde.c()) << ',' << fmt6(r.sde.k()) << ','
        << fmt6(r.sde.gamma()) << ',' << fmt6(r.sde.T()) << ',' << fmt6(r.sampler.t_rsp) << ','
        << r.sampler.n_steps << ',' << r.sampler.seed << ',' << (r.sampler.denoise_final ? 1 : 0)
        << ',' << fmt6(r.na_db) << ',' << fmt6(r.proxy_db) << ',' << fmt6(r.residual) << ','
        << fmt6(r.prior_mismatch) << ',' << fmt6(r.relative_change) << ','
        << (r.external_metric ? fmt6(*r.external_metric) : std::string()) << ',' << r.status;
    if (include_timing) out << ',' << fmt6(r.wall_seconds);
    out << '\n';
  }
  return out.str();
}

void emit_report(const SweepReport& report, ReportFormat format, const std::filesystem::path& path,
                 bool include_timing) {
  require(!report.rows.empty(), ErrorCode::invalid_argument, "emit_report: report has no rows");
  const std::string text = serialize_report(report, format, include_timing);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io, "emit_report: cannot open " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::io, "emit_report: write failed for " + path.string());
}

SweepReport parse_report_json(std::string_view text) {
  return guarded_parse("parse_report_json", [&] {
    const json j = json::parse(text);
    SweepReport report;
    report.version = j.at("version").get<std::string>();
    report.sweep = parse_sweep_kind(j.at("sweep").get<std::string>());
    report.task = parse_task_kind(j.at("task").get<std::string>());
    report.seed = j.at("seed").get<std::uint64_t>();
    for (const json& r : j.at("rows")) {
      SweepRow row;
      row.sweep = report.sweep;
      row.sde = sde_from_json(r.at("sde"));
      row.sampler = sampler_from_json(r.at("sampler"));
      row.na_db = number_or_nan(r.at("na_db"));
      row.proxy_db = number_or_nan(r.at("proxy_db"));
      row.residual = number_or_nan(r.at("residual"));
      row.prior_mismatch = number_or_nan(r.at("prior_mismatch"));
      row.relative_change = number_or_nan(r.at("relative_change"));
      if (!r.at("external_metric").is_null()) row.external_metric = r["external_metric"].get<double>();
      row.status = r.at("status").get<std::string>();
      if (r.contains("wall_seconds")) row.wall_seconds = number_or_nan(r["wall_seconds"]);
      report.rows.push_back(std::move(row));
    }
    return report;
  });
}

// ---------------------------------------------------------------- plans

SweepPlan parse_plan_json(std::string_view text) {
  return guarded_parse("parse_plan_json", [&] {
    const json j = json::parse(text);
    check_keys(j,
               {"sdes", "samplers", "t_rsp_grid", "trsp_dt", "step_counts", "task", "toy", "wav",
                "seed", "segments", "stft", "external"},
               "plan");
    SweepPlan plan;
    if (j.contains("sdes")) {
      plan.sdes.clear();
      for (const json& s : j["sdes"]) plan.sdes.push_back(sde_from_json(s));
    }
    if (j.contains("samplers")) {
      plan.samplers.clear();
      for (const json& s : j["samplers"]) plan.samplers.push_back(sampler_from_json(s));
    }
    if (j.contains("t_rsp_grid")) plan.t_rsp_grid = j["t_rsp_grid"].get<std::vector<double>>();
    plan.trsp_dt = j.value("trsp_dt", plan.trsp_dt);
    if (j.contains("step_counts")) plan.step_counts = j["step_counts"].get<std::vector<int>>();
    if (j.contains("task")) plan.task = parse_task_kind(j["task"].get<std::string>());
    plan.seed = j.value("seed", plan.seed);
    if (j.contains("toy")) {
      const json& t = j["toy"];
      check_keys(t, {"bins", "frames", "speech_var", "snr_db", "repeats"}, "toy");
      plan.toy.bins = t.value("bins", plan.toy.bins);
      plan.toy.frames = t.value("frames", plan.toy.frames);
      plan.toy.speech_var = t.value("speech_var", plan.toy.speech_var);
      plan.toy.snr_db = t.value("snr_db", plan.toy.snr_db);
      plan.toy.repeats = t.value("repeats", plan.toy.repeats);
    }
    if (j.contains("wav")) {
      const json& w = j["wav"];
      check_keys(w, {"clean", "noisy", "compression"}, "wav");
      plan.wav.clean = w.value("clean", std::string());
      plan.wav.noisy = w.value("noisy", std::string());
      if (w.contains("compression")) {
        check_keys(w["compression"], {"beta", "alpha"}, "compression");
        plan.wav.compression.beta = w["compression"].value("beta", plan.wav.compression.beta);
        plan.wav.compression.alpha = w["compression"].value("alpha", plan.wav.compression.alpha);
      }
    }
    if (j.contains("segments")) {
      const json& s = j["segments"];
      check_keys(s, {"seg_len", "floor_db", "ceil_db", "silence_rel"}, "segments");
      plan.segments.seg_len = s.value("seg_len", plan.segments.seg_len);
      plan.segments.floor_db = s.value("floor_db", plan.segments.floor_db);
      plan.segments.ceil_db = s.value("ceil_db", plan.segments.ceil_db);
      plan.segments.silence_rel = s.value("silence_rel", plan.segments.silence_rel);
    }
    if (j.contains("stft")) {
      check_keys(j["stft"], {"window_size", "hop"}, "stft");
      plan.stft.window_size = j["stft"].value("window_size", plan.stft.window_size);
      plan.stft.hop = j["stft"].value("hop", plan.stft.hop);
    }
    if (j.contains("external")) {
      const json& e = j["external"];
      check_keys(e, {"executable", "args", "stdout_regex"}, "external");
      MetricAdapter::Config cfg;
      cfg.executable = e.value("executable", cfg.executable);
      if (e.contains("args")) cfg.args = e["args"].get<std::vector<std::string>>();
      cfg.stdout_regex = e.value("stdout_regex", cfg.stdout_regex);
      plan.external = MetricAdapter(std::move(cfg));
    }
    return plan;
  });
}

std::string plan_to_json(const SweepPlan& plan) {
  json sdes = json::array();
  for (const SdeSpec& s : plan.sdes) {
    sdes.push_back({{"kind", std::string(to_string(s.kind()))},
                    {"c", s.c()},
                    {"k", s.k()},
                    {"gamma", s.gamma()},
                    {"T", s.T()}});
  }
  json samplers = json::array();
  for (const SamplerConfig& s : plan.samplers) {
    samplers.push_back({{"t_rsp", s.t_rsp},
                        {"n_steps", s.n_steps},
                        {"seed", s.seed},
                        {"denoise_final", s.denoise_final}});
  }
  json j = {
      {"sdes", std::move(sdes)},
      {"samplers", std::move(samplers)},
      {"t_rsp_grid", plan.t_rsp_grid},
      {"trsp_dt", plan.trsp_dt},
      {"step_counts", plan.step_counts},
      {"task", std::string(to_string(plan.task))},
      {"seed", plan.seed},
      {"toy",
       {{"bins", plan.toy.bins},
        {"frames", plan.toy.frames},
        {"speech_var", plan.toy.speech_var},
        {"snr_db", plan.toy.snr_db},
        {"repeats", plan.toy.repeats}}},
      {"wav",
       {{"clean", plan.wav.clean.string()},
        {"noisy", plan.wav.noisy.string()},
        {"compression", {{"beta", plan.wav.compression.beta}, {"alpha", plan.wav.compression.alpha}}}}},
      {"segments",
       {{"seg_len", plan.segments.seg_len},
        {"floor_db", plan.segments.floor_db},
        {"ceil_db", plan.segments.ceil_db},
        {"silence_rel", plan.segments.silence_rel}}},
      {"stft", {{"window_size", plan.stft.window_size}, {"hop", plan.stft.hop}}},
  };
  if (plan.external.configured()) {
    const MetricAdapter::Config& e = plan.external.config();
    j["external"] = {{"executable", e.executable}, {"args", e.args}, {"stdout_regex", e.stdout_regex}};
  }
  return j.dump(2) + "\n";
}

}  // namespace sdese

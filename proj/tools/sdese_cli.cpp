// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end over the sdese C library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdese/sdese.h"

namespace {

struct CliFailure {
  sdese_status status;
  std::string message;
};

void check(sdese_status st, const std::string& what) {
  if (st != SDESE_OK) throw CliFailure{st, what + ": " + sdese_last_error()};
}

struct Globals {
  std::optional<std::string> sde;
  std::vector<double> c;
  std::optional<double> k;
  std::optional<double> gamma;
  std::optional<double> T;
  std::vector<int> n_steps;
  std::vector<double> t_rsp;
  std::optional<std::uint64_t> seed;
  std::string out = "-";
  std::string format = "csv";
  std::string config;
  bool timing = false;
};

class Plan {
 public:
  Plan() = default;
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() { sdese_plan_destroy(p_); }
  sdese_plan** out() { return &p_; }
  sdese_plan* get() const { return p_; }

 private:
  sdese_plan* p_ = nullptr;
};

class Sde {
 public:
  Sde() = default;
  Sde(const Sde&) = delete;
  Sde& operator=(const Sde&) = delete;
  ~Sde() { sdese_sde_destroy(s_); }
  sdese_sde** out() { return &s_; }
  sdese_sde* get() const { return s_; }

 private:
  sdese_sde* s_ = nullptr;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliFailure{SDESE_ERR_IO, "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliFailure{SDESE_ERR_IO, "cannot open " + path};
  out << text;
  if (!out) throw CliFailure{SDESE_ERR_IO, "write failed for " + path};
}

sdese_sde_kind kind_of(const Globals& g) {
  const std::string name = g.sde.value_or("bbed");
  if (name == "ouve") return SDESE_SDE_OUVE;
  if (name == "bbed") return SDESE_SDE_BBED;
  throw CliFailure{SDESE_ERR_INVALID_ARGUMENT, "unknown --sde '" + name + "' (ouve|bbed)"};
}

// Default parameters of the chosen SDE with the global overrides applied,
// one entry per --c value.
std::vector<sdese_sde_params> sde_grid(const Globals& g) {
  Sde base;
  check(sdese_sde_create_default(kind_of(g), base.out()), "default SDE");
  sdese_sde_params p;
  check(sdese_sde_get(base.get(), &p), "default SDE");
  if (g.k) p.k = *g.k;
  if (g.gamma) p.gamma = *g.gamma;
  if (g.T) p.T = *g.T;
  std::vector<sdese_sde_params> out;
  if (g.c.empty()) {
    out.push_back(p);
  } else {
    for (double c : g.c) {
      p.c = c;
      out.push_back(p);
    }
  }
  return out;
}

bool sde_flags_given(const Globals& g) {
  return g.sde || !g.c.empty() || g.k || g.gamma || g.T;
}

enum class Sweep { variance, trsp, steps };

void build_plan(Plan& plan, const Globals& g, Sweep sweep) {
  if (!g.config.empty()) {
    check(sdese_plan_from_json(read_file(g.config).c_str(), plan.out()), "plan " + g.config);
  } else {
    check(sdese_plan_create(plan.out()), "plan");
  }
  if (g.config.empty() || sde_flags_given(g)) {
    check(sdese_plan_clear_sdes(plan.get()), "plan");
    for (const sdese_sde_params& p : sde_grid(g)) {
      Sde sde;
      check(sdese_sde_create(&p, sde.out()), "SDE");
      check(sdese_plan_add_sde(plan.get(), sde.get()), "plan");
    }
  }
  if (g.seed) check(sdese_plan_set_seed(plan.get(), *g.seed), "plan");

  const sdese_sampler_params defaults{1.0, 60, 0, 0};
  switch (sweep) {
    case Sweep::variance:
      if (!g.t_rsp.empty() || !g.n_steps.empty()) {
        check(sdese_plan_clear_samplers(plan.get()), "plan");
        const std::vector<double> ts = g.t_rsp.empty() ? std::vector<double>{defaults.t_rsp} : g.t_rsp;
        const std::vector<int> ns = g.n_steps.empty() ? std::vector<int>{defaults.n_steps} : g.n_steps;
        for (double t : ts) {
          for (int n : ns) {
            const sdese_sampler_params s{t, n, 0, 0};
            check(sdese_plan_add_sampler(plan.get(), &s), "sampler");
          }
        }
      }
      break;
    case Sweep::trsp:
      if (!g.t_rsp.empty()) {
        check(sdese_plan_set_trsp_grid(plan.get(), g.t_rsp.data(), g.t_rsp.size(), 1.0 / 30.0),
              "t_rsp grid");
      }
      break;
    case Sweep::steps:
      if (!g.n_steps.empty()) {
        check(sdese_plan_set_step_counts(plan.get(), g.n_steps.data(), g.n_steps.size()),
              "step counts");
      }
      if (!g.t_rsp.empty()) {
        check(sdese_plan_clear_samplers(plan.get()), "plan");
        const sdese_sampler_params s{g.t_rsp.front(), defaults.n_steps, 0, 0};
        check(sdese_plan_add_sampler(plan.get(), &s), "sampler");
      }
      break;
  }
}

sdese_format format_of(const Globals& g) {
  return g.format == "json" ? SDESE_FORMAT_JSON : SDESE_FORMAT_CSV;
}

void run_sweep_command(const Globals& g, Sweep sweep) {
  Plan plan;
  build_plan(plan, g, sweep);
  const sdese_sweep_kind kind = sweep == Sweep::variance ? SDESE_SWEEP_VARIANCE
                                : sweep == Sweep::trsp   ? SDESE_SWEEP_TRSP
                                                         : SDESE_SWEEP_STEPS;
  sdese_report* report = nullptr;
  check(sdese_run_sweep(plan.get(), kind, &report), "sweep");
  std::string text;
  size_t needed = 0;
  sdese_status st = sdese_report_serialize(report, format_of(g), g.timing, nullptr, 0, &needed);
  if (st == SDESE_OK) {
    text.resize(needed);
    st = sdese_report_serialize(report, format_of(g), g.timing, text.data(), needed, &needed);
    text.resize(needed - 1);
  }
  sdese_report_destroy(report);
  check(st, "report");
  write_output(g.out, text);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct KernelCheckArgs {
  std::vector<double> times;
  std::size_t paths = 100000;
  double dt = 1e-3;
  double x0 = 0.5;
  double y = 0.3;
};

void run_kernel_check(const Globals& g, const KernelCheckArgs& a) {
  const std::uint64_t seed = g.seed.value_or(0);
  std::vector<double> times = a.times;
  if (times.empty()) {
    times = kind_of(g) == SDESE_SDE_OUVE ? std::vector<double>{0.25, 0.5, 0.75, 1.0}
                                         : std::vector<double>{0.25, 0.5, 0.9, 0.999};
  }
  const double x0[2] = {a.x0, 0.0};
  const double y[2] = {a.y, 0.0};
  std::ostringstream csv;
  std::ostringstream json;
  csv << "sde,c,t,n_paths,mc_mean,oracle_mean,mean_z,mc_var,oracle_var,var_rel_err,var_z\n";
  json << "{\n  \"rows\": [";
  bool first = true;
  for (const sdese_sde_params& p : sde_grid(g)) {
    Sde sde;
    check(sdese_sde_create(&p, sde.out()), "SDE");
    std::vector<sdese_kernel_stats> stats(times.size());
    check(sdese_kernel_check(sde.get(), x0, y, times.data(), times.size(), a.paths, a.dt, seed,
                             stats.data()),
          "kernel check");
    const char* name = p.kind == SDESE_SDE_OUVE ? "ouve" : "bbed";
    for (const sdese_kernel_stats& s : stats) {
      const double mean_z = s.mean_stderr > 0 ? (s.mc_mean_re - s.oracle_mean_re) / s.mean_stderr : 0.0;
      const double rel = s.oracle_var > 0 ? (s.mc_var - s.oracle_var) / s.oracle_var : 0.0;
      const double var_z = s.var_stderr > 0 ? (s.mc_var - s.oracle_var) / s.var_stderr : 0.0;
      const std::vector<std::pair<const char*, std::string>> cols = {
          {"c", fmt(p.c)},           {"t", fmt(s.t)},
          {"n_paths", std::to_string(s.n_paths)},
          {"mc_mean", fmt(s.mc_mean_re)},     {"oracle_mean", fmt(s.oracle_mean_re)},
          {"mean_z", fmt(mean_z)},            {"mc_var", fmt(s.mc_var)},
          {"oracle_var", fmt(s.oracle_var)},  {"var_rel_err", fmt(rel)},
          {"var_z", fmt(var_z)}};
      csv << name;
      json << (first ? "\n" : ",\n") << "    {\"sde\": \"" << name << "\"";
      first = false;
      for (const auto& [key, value] : cols) {
        csv << ',' << value;
        json << ", \"" << key << "\": " << value;
      }
      csv << '\n';
      json << "}";
    }
  }
  json << "\n  ]\n}\n";
  write_output(g.out, g.format == "json" ? json.str() : csv.str());
}

struct MetricsArgs {
  std::string clean;
  std::string noisy;
  std::string enhanced;
  std::string metric_exe;
  std::vector<std::string> metric_args;
  std::string metric_regex;
};

void run_metrics(const Globals& g, const MetricsArgs& a) {
  Plan plan;
  if (!g.config.empty()) {
    check(sdese_plan_from_json(read_file(g.config).c_str(), plan.out()), "plan " + g.config);
  } else {
    check(sdese_plan_create(plan.out()), "plan");
  }
  if (!a.metric_exe.empty()) {
    std::vector<const char*> args;
    for (const std::string& s : a.metric_args) args.push_back(s.c_str());
    check(sdese_plan_set_external_metric(plan.get(), a.metric_exe.c_str(), args.data(), args.size(),
                                         a.metric_regex.empty() ? nullptr : a.metric_regex.c_str()),
          "external metric");
  }
  sdese_wav_result r;
  check(sdese_wav_metrics(a.clean.c_str(), a.noisy.c_str(), a.enhanced.c_str(), plan.get(), &r),
        "metrics");
  const std::string ext = r.has_external_metric ? fmt(r.external_metric) : "";
  std::string text;
  if (g.format == "json") {
    text = "{\"config\": \"" + a.enhanced + "\", \"na_db\": " + fmt(r.na_db) +
           ", \"proxy_db\": " + fmt(r.proxy_db) +
           ", \"external_metric\": " + (r.has_external_metric ? ext : "null") + "}\n";
  } else {
    text = "config,na_db,proxy_db,external_metric\n" + a.enhanced + "," + fmt(r.na_db) + "," +
           fmt(r.proxy_db) + "," + ext + "\n";
  }
  write_output(g.out, text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion-SDE speech-enhancement experiments (library " +
               std::string(sdese_version()) + ")"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--sde", g.sde, "SDE family")->check(CLI::IsMember({"ouve", "bbed"}));
  app.add_option("--c", g.c, "variance scale(s)")->delimiter(',');
  app.add_option("--k", g.k, "diffusion base k");
  app.add_option("--gamma", g.gamma, "OUVE stiffness");
  app.add_option("--T", g.T, "process horizon");
  app.add_option("--n-steps", g.n_steps, "reverse step count(s)")->delimiter(',');
  app.add_option("--t-rsp", g.t_rsp, "reverse start point(s)")->delimiter(',');
  app.add_option("--seed", g.seed, "base seed");
  app.add_option("--out", g.out, "output path, '-' for stdout");
  app.add_option("--format", g.format, "report format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--config", g.config, "sweep plan (JSON)")->check(CLI::ExistingFile);
  app.add_flag("--timing", g.timing, "include per-row wall time (output no longer byte-stable)");

  auto* sweep_c = app.add_subcommand("sweep-c", "variance-scale sweep");
  auto* sweep_trsp = app.add_subcommand("sweep-trsp", "reverse start point sweep at step 1/30");
  auto* sweep_steps = app.add_subcommand("sweep-steps", "step-count robustness sweep");

  KernelCheckArgs kc;
  auto* kernel = app.add_subcommand("kernel-check", "Monte-Carlo check of the closed-form kernel");
  kernel->add_option("--times", kc.times, "checkpoints (multiples of dt)")->delimiter(',');
  kernel->add_option("--paths", kc.paths, "Monte-Carlo paths");
  kernel->add_option("--dt", kc.dt, "forward step");
  kernel->add_option("--x0", kc.x0, "initial value (real)");
  kernel->add_option("--y", kc.y, "condition value (real)");

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "score an enhanced WAV against clean/noisy WAVs");
  metrics->add_option("--clean", ma.clean)->required()->check(CLI::ExistingFile);
  metrics->add_option("--noisy", ma.noisy)->required()->check(CLI::ExistingFile);
  metrics->add_option("--enhanced", ma.enhanced)->required()->check(CLI::ExistingFile);
  metrics->add_option("--metric-exe", ma.metric_exe, "external metric executable");
  metrics->add_option("--metric-arg", ma.metric_args, "argument template; {ref} and {deg} expand");
  metrics->add_option("--metric-regex", ma.metric_regex, "regex whose first group is the score");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep_c->parsed()) run_sweep_command(g, Sweep::variance);
    if (sweep_trsp->parsed()) run_sweep_command(g, Sweep::trsp);
    if (sweep_steps->parsed()) run_sweep_command(g, Sweep::steps);
    if (kernel->parsed()) run_kernel_check(g, kc);
    if (metrics->parsed()) run_metrics(g, ma);
  } catch (const CliFailure& f) {
    std::cerr << "sdese_cli: " << sdese_status_name(f.status) << ": " << f.message << '\n';
    return 1;
  }
  return 0;
}

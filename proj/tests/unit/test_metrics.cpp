// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sdese/error.hpp"
#include "sdese/metrics.hpp"

using namespace sdese;

namespace {

Waveform noise(std::size_t n, std::uint64_t seed, double scale = 1.0) {
  RandomSource rng(seed);
  Waveform w;
  w.samples.resize(n);
  for (double& v : w.samples) v = scale * rng.normal();
  return w;
}

Waveform scaled(Waveform w, double s) {
  for (double& v : w.samples) v *= s;
  return w;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

// Executable shell script in the temp directory.
std::string stub(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / ("sdese_stub_" + name);
  std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
  std::filesystem::permissions(p, std::filesystem::perms::owner_all);
  return p.string();
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("gain function examples") {
    RandomSource rng(1);
    ComplexGrid y(8, 8);
    rng.fill_complex_normal(y);
    const GainFunction id = gain_function(y, y);
    for (const cplx& g : id.values.values()) CHECK(std::abs(g - 1.0) < 1e-15);
    CHECK(id.guarded_cells == 0);

    ComplexGrid y0 = y;
    y0[3] = 0.0;
    const GainFunction zero = gain_function(ComplexGrid(8, 8), y0);
    for (std::size_t i = 0; i < y0.size(); ++i) CHECK(zero.values[i] == (i == 3 ? cplx(1.0) : cplx(0.0)));
    CHECK(zero.guarded_cells == 1);

    ComplexGrid s_hat(8, 8);
    rng.fill_complex_normal(s_hat);
    s_hat[5] = y[5] * 1e4;  // capped
    const GainFunction g = gain_function(s_hat, y);
    CHECK(std::abs(g.values[5]) == doctest::Approx(100.0));
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i == 5) continue;
      if (std::abs(s_hat[i] / y[i]) <= 100.0) CHECK(std::abs(g.values[i] * y[i] - s_hat[i]) < 1e-12);
    }
    CHECK(code_of([&] { gain_function(ComplexGrid(2, 2), y); }) == ErrorCode::shape_mismatch);
  }

  TEST_CASE("filtered components") {
    const StftConfig cfg;
    const Waveform s = noise(6000, 2);
    const Waveform n = noise(6000, 3, 0.7);
    Waveform y = s;
    for (std::size_t i = 0; i < y.size(); ++i) y.samples[i] += n.samples[i];
    const ComplexGrid S = stft(s, cfg);
    const ComplexGrid Y = stft(y, cfg);
    const GainFunction ones{ComplexGrid(S.rows(), S.cols(), 1.0), 0};
    const FilteredComponents fc = filtered_components(ones, S, Y, cfg);
    const Waveform ry = istft(Y, cfg, natural_length(S.cols(), cfg));
    CHECK(fc.s_tilde.size() == fc.n_tilde.size());
    for (std::size_t i = 128; i + 128 < ry.size(); ++i) {
      CHECK(std::abs(fc.s_tilde.samples[i] + fc.n_tilde.samples[i] - ry.samples[i]) < 1e-6);
    }
    const GainFunction none{ComplexGrid(S.rows(), S.cols()), 0};
    const FilteredComponents z = filtered_components(none, S, Y, cfg);
    CHECK(z.s_tilde.energy() == 0.0);
    CHECK(z.n_tilde.energy() == 0.0);

    // Binary mask keeping speech-dominated cells removes noise energy.
    GainFunction mask{ComplexGrid(S.rows(), S.cols()), 0};
    const ComplexGrid N = Y - S;
    for (std::size_t i = 0; i < S.size(); ++i) mask.values[i] = std::abs(S[i]) > std::abs(N[i]) ? 1.0 : 0.0;
    const FilteredComponents m = filtered_components(mask, S, Y, cfg);
    const FilteredComponents full = filtered_components(ones, S, Y, cfg);
    CHECK(m.n_tilde.energy() < full.n_tilde.energy());
    CHECK(code_of([&] { filtered_components(ones, S, ComplexGrid(2, 2), cfg); }) ==
          ErrorCode::shape_mismatch);
  }

  TEST_CASE("noise attenuation examples") {
    const Waveform n = noise(5000, 4);
    CHECK(noise_attenuation(n, n) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(noise_attenuation(n, scaled(n, 1 / std::sqrt(10.0))) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(noise_attenuation(n, scaled(n, 0.0)) == 60.0);
    CHECK(noise_attenuation(n, scaled(n, 1e3)) == -30.0);
  }

  TEST_CASE("noise attenuation properties") {
    const Waveform n = noise(5000, 5);
    const Waveform nt = noise(5000, 6, 0.3);
    CHECK(noise_attenuation(scaled(n, 7.0), scaled(nt, 7.0)) ==
          doctest::Approx(noise_attenuation(n, nt)).epsilon(1e-12));
    double prev = noise_attenuation(n, nt);
    for (double s : {0.8, 0.5, 0.1, 0.01}) {
      const double v = noise_attenuation(n, scaled(nt, s));
      CHECK(v > prev);
      prev = v;
    }
  }

  TEST_CASE("segmentation and silence") {
    Waveform n = noise(2048, 7);
    // Silence one full segment: it is skipped rather than clamped.
    for (std::size_t i = 512; i < 1024; ++i) n.samples[i] = 0.0;
    Waveform nt = scaled(n, 0.1);
    CHECK(noise_attenuation(n, nt) == doctest::Approx(20.0).epsilon(1e-12));
    // Shorter than one segment: a single segment.
    const Waveform small = noise(100, 8);
    CHECK(noise_attenuation(small, scaled(small, 0.1)) == doctest::Approx(20.0).epsilon(1e-12));
    Waveform silent;
    silent.samples.assign(1024, 0.0);
    CHECK(code_of([&] { noise_attenuation(silent, silent); }) == ErrorCode::domain);
    CHECK(code_of([&] { noise_attenuation(n, small); }) == ErrorCode::shape_mismatch);
    SegmentOptions bad;
    bad.seg_len = 0;
    CHECK(code_of([&] { noise_attenuation(n, n, bad); }) == ErrorCode::invalid_argument);
  }

  TEST_CASE("speech quality proxy") {
    const Waveform s = noise(4096, 9);
    CHECK(speech_quality_proxy(s, s) == 60.0);
    CHECK(speech_quality_proxy(scaled(s, 0.5), s) == doctest::Approx(10 * std::log10(4.0)).epsilon(1e-12));
    double prev = 1e9;
    for (double level : {0.01, 0.05, 0.2, 0.5}) {
      Waveform st = s;
      const Waveform e = noise(4096, 10, level);
      for (std::size_t i = 0; i < st.size(); ++i) st.samples[i] += e.samples[i];
      const double v = speech_quality_proxy(st, s);
      CHECK(std::isfinite(v));
      CHECK(v > 0.0);
      CHECK(v < prev);
      prev = v;
    }
    Waveform silent;
    silent.samples.assign(4096, 0.0);
    CHECK(code_of([&] { speech_quality_proxy(s, silent); }) == ErrorCode::domain);
  }

  TEST_CASE("external metric adapter") {
    const Waveform w = noise(1600, 11, 0.1);
    CHECK(code_of([&] { external_metric(MetricAdapter{}, w, w); }) == ErrorCode::not_configured);
    CHECK(code_of([&] { external_metric(MetricAdapter({"/nonexistent/pesq"}), w, w); }) ==
          ErrorCode::not_configured);
    CHECK(code_of([&] { external_metric(MetricAdapter({"sdese-no-such-tool-xyz"}), w, w); }) ==
          ErrorCode::not_configured);

    const MetricAdapter echo({stub("echo", "echo 'MOS-LQO: 4.5'")});
    CHECK(external_metric(echo, w, w) == 4.5);

    MetricAdapter::Config cfg{stub("files", "test -s \"$1\" && test -s \"$2\" && echo \"score=+3.25 other=9\"")};
    cfg.stdout_regex = R"(score=([-+]?[0-9.]+))";
    CHECK(external_metric(MetricAdapter(cfg), w, w) == 3.25);

    const MetricAdapter text({stub("text", "echo no numbers here")});
    CHECK(code_of([&] { external_metric(text, w, w); }) == ErrorCode::parse);
    const MetricAdapter failing({stub("fail", "echo 1.0; exit 3")});
    CHECK(code_of([&] { external_metric(failing, w, w); }) == ErrorCode::io);

    // Copies share the configuration.
    const MetricAdapter copy = echo;
    CHECK(copy.evaluate(w, w) == 4.5);
  }
}

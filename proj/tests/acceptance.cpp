// Acceptance suite: runs the full-scale phase-transition experiment and the
// other release gates end to end, printing one PASS/FAIL line per criterion.
// Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "declip/bench.hpp"
#include "declip/dictionary.hpp"
#include "declip/framing.hpp"
#include "declip/kernels.hpp"
#include "declip/rng.hpp"
#include "declip/signal.hpp"
#include "declip/solver.hpp"
#include "declip/wav.hpp"
#include "dense_reference.hpp"
#include "test_support.hpp"

using namespace declip;

namespace {

struct Gate {
  int failed = 0;

  void check(bool ok, const std::string& name, const std::string& detail) {
    std::printf("[%s] %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------------

void full_scale_transition(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.n = 1024;
  cfg.dict_kind = DictKind::orthonormal_dct;
  cfg.k_values = {512, 576, 640, 704, 768, 832};
  cfg.target_isnr_db = {10.0};
  cfg.trials = 100;
  cfg.seed = 42;

  const BenchResult res = run_phase_transition(cfg, SolverKind::iht_dc);

  double p512 = 0.0, isnr512 = 0.0;
  for (const auto& row : res.rows)
    if (row.k == 512) {
      p512 = row.success_prob;
      isnr512 = row.achieved_isnr_db;
    }
  gate.check(p512 >= 0.99 && std::abs(isnr512 - 10.0) <= 0.1,
             "phase-transition-k512",
             fmt("success=%.2f at K=512, iSNR=%.3f dB, %.0fs", p512, isnr512,
                 elapsed_s(t0)));

  // probability must fall from >= 0.9 to <= 0.1 inside K in [512, 832]
  bool seen_high = false, dropped = false;
  std::string profile;
  for (const auto& row : res.rows) {
    profile += fmt("%d:%.2f ", row.k, row.success_prob);
    if (row.success_prob >= 0.9) seen_high = true;
    if (seen_high && row.success_prob <= 0.1) dropped = true;
  }
  gate.check(dropped, "transition-band", profile);
}

void severity_ordering(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.n = 1024;
  cfg.k_values = {384};
  cfg.target_isnr_db = {5.0, 10.0, 20.0};
  cfg.trials = 100;
  cfg.seed = 43;

  const BenchResult res = run_phase_transition(cfg, SolverKind::iht_dc);
  const double band = 2.0 / std::sqrt(100.0);
  const double p5 = res.rows[0].success_prob;
  const double p10 = res.rows[1].success_prob;
  const double p20 = res.rows[2].success_prob;
  gate.check(p5 <= p10 + band && p10 <= p20 + band, "severity-ordering",
             fmt("K=384: p(5dB)=%.2f <= p(10dB)=%.2f <= p(20dB)=%.2f "
                 "(band %.2f), %.0fs",
                 p5, p10, p20, band, elapsed_s(t0)));
}

void baseline_dominance(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  BenchConfig cfg;
  cfg.n = 256;
  cfg.k_values = {16, 32, 64, 96, 128, 160, 192};
  cfg.target_isnr_db = {5.0, 10.0, 20.0};
  cfg.trials = 25;
  cfg.seed = 44;

  const BenchResult dc = run_phase_transition(cfg, SolverKind::iht_dc);
  const BenchResult base = run_phase_transition(cfg, SolverKind::iht_baseline);
  const double band = 2.0 / std::sqrt(cfg.trials);
  bool ok = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < dc.rows.size(); ++i) {
    const double margin = base.rows[i].success_prob - dc.rows[i].success_prob;
    worst = std::max(worst, margin);
    if (margin > band) ok = false;
  }
  gate.check(ok, "consistency-dominance",
             fmt("desk grid (N=256, 25 trials): max baseline advantage %.2f "
                 "(band %.2f), %.0fs",
                 worst, band, elapsed_s(t0)));
}

void gradient_oracle(Gate& gate) {
  Rng rng(45);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 8 + static_cast<int>(rng.below(57));  // N <= 64
    const DictKind kind = (trial % 2 == 0) ? DictKind::orthonormal_dct
                                           : DictKind::redundant_dct;
    const Dictionary dict = Dictionary::build(kind, n);
    TimeSignal x = testsup::random_signal(rng, n);
    const double tau = testsup::tau_for_fraction(x.samples, 0.3);
    ClippedObservation obs = clip(x, tau);
    const auto alpha = testsup::random_vector(rng, dict.d(), 0.5);

    const auto analytic = gradient(alpha, obs, dict);
    std::vector<double> fd(alpha.size());
    std::vector<double> probe = alpha;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const double h = 1e-6 * (1.0 + std::abs(alpha[i]));
      probe[i] = alpha[i] + h;
      const double fp = consistency_cost(dict.synthesize(probe), obs);
      probe[i] = alpha[i] - h;
      const double fm = consistency_cost(dict.synthesize(probe), obs);
      probe[i] = alpha[i];
      fd[i] = (fp - fm) / (2.0 * h);
    }
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      diff += (analytic[i] - fd[i]) * (analytic[i] - fd[i]);
      ref += fd[i] * fd[i];
    }
    worst = std::max(worst, std::sqrt(diff / std::max(ref, 1e-300)));
  }
  gate.check(worst < 1e-5, "gradient-oracle",
             fmt("100 instances, worst relative l2 error %.2e", worst));
}

void zero_set_characterization(Gate& gate) {
  Rng rng(46);
  int checked = 0;
  bool ok = true;
  while (checked < 1000) {
    const int n = 8 + static_cast<int>(rng.below(64));
    TimeSignal x = testsup::random_signal(rng, n);
    const double tau = testsup::tau_for_fraction(x.samples, 0.3);
    ClippedObservation obs = clip(x, tau);

    std::vector<double> good = obs.samples();
    for (int i : obs.mask().clipped_pos()) good[i] = tau + rng.uniform01();
    for (int i : obs.mask().clipped_neg()) good[i] = -tau - rng.uniform01();
    if (consistency_cost(good, obs) != 0.0) ok = false;
    ++checked;

    if (checked >= 1000) break;
    std::vector<double> bad = good;
    const double delta = 0.05 + rng.uniform01();
    const auto& mask = obs.mask();
    switch (rng.below(3)) {
      case 0:
        if (mask.reliable().empty()) continue;
        bad[mask.reliable()[0]] += delta;
        break;
      case 1:
        if (mask.clipped_pos().empty()) continue;
        bad[mask.clipped_pos()[0]] = tau - delta;
        break;
      default:
        if (mask.clipped_neg().empty()) continue;
        bad[mask.clipped_neg()[0]] = -tau + delta;
        break;
    }
    if (!(consistency_cost(bad, obs) > 0.0)) ok = false;
    ++checked;
  }
  gate.check(ok, "consistency-zero-set",
             fmt("%d randomized two-sided checks", checked));
}

void ola_reconstruction(Gate& gate) {
  Rng rng(47);
  const FramePlan plan = FramePlan::standard(256);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int len = 1 + static_cast<int>(rng.below(4000));
    const auto x = testsup::random_vector(rng, len);
    auto frames = split_frames(x, plan);
    for (auto& f : frames)
      kernels::multiply(f.data(), plan.window.data(), f.size(), f.data());
    const TimeSignal back = overlap_add(frames, plan, len);
    for (int i = 0; i < len; ++i)
      worst = std::max(worst, std::abs(back.samples[i] - x[i]));
  }
  gate.check(worst < 1e-10, "ola-reconstruction",
             fmt("100 random signals, max abs error %.2e", worst));
}

void dictionary_suite(Gate& gate) {
  const int n = 64;
  const Dictionary ortho = Dictionary::build(DictKind::orthonormal_dct, n);
  const Dictionary redun = Dictionary::build(DictKind::redundant_dct, n);

  // orthonormality, entrywise
  double gram_err = 0.0;
  for (int k = 0; k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    const auto gram_col = ortho.analyze(ortho.synthesize(e));
    for (int j = 0; j < n; ++j)
      gram_err = std::max(gram_err,
                          std::abs(gram_col[j] - (j == k ? 1.0 : 0.0)));
  }

  // unit column norms of the redundant dictionary
  double norm_err = 0.0;
  for (int k = 0; k < redun.d(); ++k) {
    std::vector<double> e(redun.d(), 0.0);
    e[k] = 1.0;
    const auto atom = redun.synthesize(e);
    norm_err = std::max(
        norm_err, std::abs(std::sqrt(kernels::sqnorm(atom.data(), n)) - 1.0));
  }

  // adjoint identity, relative
  Rng rng(48);
  double adj_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const Dictionary& dict = (trial % 2 == 0) ? ortho : redun;
    const auto alpha = testsup::random_vector(rng, dict.d());
    const auto x = testsup::random_vector(rng, n);
    const auto ax = dict.synthesize(alpha);
    const auto atx = dict.analyze(x);
    const double lhs = kernels::dot(ax.data(), x.data(), n);
    const double rhs = kernels::dot(alpha.data(), atx.data(), dict.d());
    adj_err = std::max(adj_err, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }

  // H_K best K-term approximation against 1000 random sparse competitors
  const int d = 128, kk = 16;
  const auto alpha = testsup::random_vector(rng, d);
  const SparseCoeffs kept = hard_threshold(alpha, kk);
  double err_best = 0.0;
  for (int i = 0; i < d; ++i)
    err_best += (alpha[i] - kept.values[i]) * (alpha[i] - kept.values[i]);
  bool hk_ok = true;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> beta(d, 0.0);
    for (int picks = 0; picks < kk; ++picks) {
      const int idx = static_cast<int>(rng.below(d));
      beta[idx] = alpha[idx];  // optimal value on a random support
    }
    double err = 0.0;
    for (int i = 0; i < d; ++i)
      err += (alpha[i] - beta[i]) * (alpha[i] - beta[i]);
    if (err_best > err + 1e-12) hk_ok = false;
  }

  gate.check(gram_err <= 1e-10 && norm_err <= 1e-10 && adj_err <= 1e-10 && hk_ok,
             "dictionary-suite",
             fmt("gram err %.1e, column norm err %.1e, adjoint err %.1e, "
                 "H_K optimal vs 1000 competitors: %s",
                 gram_err, norm_err, adj_err, hk_ok ? "yes" : "no"));
}

void audio_end_to_end(Gate& gate) {
  const auto t0 = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "declip_acceptance";
  fs::create_directories(dir);
  const std::string wav_path = (dir / "music_like.wav").string();

  // 2 s of damped-sinusoid "music" at 16 kHz, stored as 32-bit float WAV
  const TimeSignal music = testsup::music_like(2.0, 16000);
  {
    WavAudio audio;
    audio.sample_rate = 16000;
    audio.format = WavFormat::float32;
    audio.channels = {music.samples};
    write_wav(wav_path, audio);
  }
  const WavAudio loaded = read_wav(wav_path);
  TimeSignal x{loaded.channels[0], loaded.sample_rate};

  const double tau = tau_for_isnr(x.samples, 10.0, 0.05);
  const ClippedObservation obs = clip(x, tau);
  TimeSignal clipped{obs.samples(), x.sample_rate};

  SolverConfig cfg;
  cfg.adaptive = AdaptiveSchedule{};
  const FramePlan plan = FramePlan::standard(1024);
  const DeclipResult result =
      declip_audio(clipped, tau, DictKind::redundant_dct, cfg, plan);

  const double in_db = isnr(x.samples, clipped.samples);
  const double out_db = osnr(x.samples, result.output.samples);
  const double gain = out_db - in_db;
  gate.check(gain > 3.0, "audio-end-to-end",
             fmt("iSNR=%.2f dB, oSNR=%.2f dB, gain=%.2f dB, %.0fs", in_db,
                 out_db, gain, elapsed_s(t0)));
}

void bench_determinism(Gate& gate) {
  BenchConfig cfg;
  cfg.n = 128;
  cfg.k_values = {8, 24, 48};
  cfg.target_isnr_db = {5.0, 10.0};
  cfg.trials = 10;
  cfg.seed = 49;

  cfg.threads = 1;
  const std::string a = to_csv(run_phase_transition(cfg, SolverKind::iht_dc));
  const std::string b = to_csv(run_phase_transition(cfg, SolverKind::iht_dc));
  cfg.threads = 4;
  const std::string c = to_csv(run_phase_transition(cfg, SolverKind::iht_dc));
  gate.check(a == b && a == c, "bench-determinism",
             fmt("%zu-byte CSV identical across repeat runs and thread counts",
                 a.size()));
}

}  // namespace

int main() {
  Gate gate;
  gradient_oracle(gate);
  zero_set_characterization(gate);
  ola_reconstruction(gate);
  dictionary_suite(gate);
  bench_determinism(gate);
  baseline_dominance(gate);
  severity_ordering(gate);
  full_scale_transition(gate);
  audio_end_to_end(gate);

  if (gate.failed > 0) {
    std::printf("%d criterion(s) failed\n", gate.failed);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}

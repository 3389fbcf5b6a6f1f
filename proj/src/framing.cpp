#include "declip/framing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "declip/kernels.hpp"
#include "declip/parallel.hpp"

namespace declip {

namespace {
constexpr double kPi = 3.14159265358979323846;

int frame_count(int len, const FramePlan& plan) {
  // Last frame must start at or after the final padded sample index.
  return (plan.pad() + len - 1) / plan.hop + 1;
}
}  // namespace

std::vector<double> sine_window(int n) {
  if (n < 1) throw std::invalid_argument("sine_window: n must be >= 1");
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::sin(kPi * (i + 0.5) / n);
  // enforce exact symmetry against rounding differences in sin()
  for (int i = 0; i < n / 2; ++i) w[n - 1 - i] = w[i];
  return w;
}

FramePlan FramePlan::standard(int frame_len) {
  FramePlan plan;
  plan.frame_len = frame_len;
  plan.hop = frame_len / 4;
  plan.window = sine_window(frame_len);
  plan.validate();
  return plan;
}

void FramePlan::validate() const {
  if (frame_len < 1 || hop < 1 || hop > frame_len)
    throw std::invalid_argument("FramePlan: bad frame_len/hop");
  if (frame_len % hop != 0)
    throw std::invalid_argument("FramePlan: hop must divide frame_len");
  if (static_cast<int>(window.size()) != frame_len)
    throw std::invalid_argument("FramePlan: window length mismatch");
  for (double v : window)
    if (!(v > 0.0) || v > 1.0)
      throw std::invalid_argument("FramePlan: window entries must be in (0, 1]");
}

std::vector<std::vector<double>> split_frames(std::span<const double> x,
                                              const FramePlan& plan) {
  plan.validate();
  const int len = static_cast<int>(x.size());
  const int pad = plan.pad();
  const int frames = frame_count(len, plan);

  std::vector<std::vector<double>> out(frames);
  for (int f = 0; f < frames; ++f) {
    auto& frame = out[f];
    frame.assign(plan.frame_len, 0.0);
    const int start = f * plan.hop - pad;  // original coordinates
    const int lo = std::max(0, -start);
    const int hi = std::min(plan.frame_len, len - start);
    for (int i = lo; i < hi; ++i) frame[i] = x[start + i];
  }
  return out;
}

int frame_offset(const FramePlan& plan, int frame_index) {
  return frame_index * plan.hop - plan.pad();
}

TimeSignal overlap_add(const std::vector<std::vector<double>>& frames,
                       const FramePlan& plan, int out_len) {
  plan.validate();
  if (out_len < 0) throw std::invalid_argument("overlap_add: negative length");
  const int pad = plan.pad();
  const int frames_n = static_cast<int>(frames.size());
  const int padded_len = frames_n > 0 ? (frames_n - 1) * plan.hop + plan.frame_len : 0;
  if (padded_len < pad + out_len)
    throw std::invalid_argument("overlap_add: frames do not cover out_len");

  std::vector<double> acc(padded_len, 0.0), env(padded_len, 0.0);
  for (int f = 0; f < frames_n; ++f) {
    const auto& frame = frames[f];
    if (static_cast<int>(frame.size()) != plan.frame_len)
      throw std::invalid_argument("overlap_add: frame length mismatch");
    const int start = f * plan.hop;
    for (int i = 0; i < plan.frame_len; ++i) {
      const double w = plan.window[i];
      acc[start + i] += w * frame[i];
      env[start + i] += w * w;
    }
  }

  TimeSignal out;
  out.samples.resize(out_len);
  for (int i = 0; i < out_len; ++i) out.samples[i] = acc[pad + i] / env[pad + i];
  return out;
}

DeclipResult declip_audio(const TimeSignal& clipped, double tau,
                          DictKind dict_kind, const SolverConfig& cfg,
                          const FramePlan& plan, const DeclipOptions& options) {
  if (tau <= 0.0) throw std::invalid_argument("declip_audio: tau must be positive");
  plan.validate();

  const auto& xc = clipped.samples;
  auto frames = split_frames(xc, plan);
  const int frames_n = static_cast<int>(frames.size());

  const Dictionary dict = Dictionary::build(dict_kind, plan.frame_len);

  SolverConfig frame_cfg = cfg;
  if (!frame_cfg.adaptive) frame_cfg.adaptive = AdaptiveSchedule{};
  {
    // Let the schedule reach its sparsity cap even when the caller kept the
    // fixed-K iteration default.
    const auto& sched = *frame_cfg.adaptive;
    const int k_max = sched.k_max > 0 ? sched.k_max : dict.d() / 4;
    const int needed = (k_max - sched.k_start) / sched.k_step + 17;
    frame_cfg.max_iters = std::max(frame_cfg.max_iters, needed);
  }

  std::vector<DeclipFrameReport> reports(frames_n);
  std::vector<std::vector<double>> outputs(frames_n);

  auto process = [&](int f) {
    DeclipFrameReport& rep = reports[f];
    rep.index = f;
    rep.offset = frame_offset(plan, f);

    const std::vector<double>& raw = frames[f];
    // Clip detection happens on the raw frame; the solver then works on the
    // windowed observation, whose per-sample clipping level is w[i]*tau with
    // the same index sets.
    ClipMask mask = detect_mask(raw, tau, options.eps_mask);

    std::vector<double> windowed(plan.frame_len);
    kernels::multiply(raw.data(), plan.window.data(), plan.frame_len,
                      windowed.data());

    if (!mask.has_clipped()) {
      rep.bypassed = true;
      outputs[f] = std::move(windowed);
      return;
    }
    try {
      ClippedObservation obs(windowed, tau, std::move(mask));
      SolveResult solved = iht_dc_adaptive(obs, dict, frame_cfg);
      rep.k_used = solved.report.k_used;
      rep.iterations = solved.report.iterations;
      rep.final_cost = solved.report.final_cost;
      rep.stop_reason = solved.report.stop_reason;
      outputs[f] = dict.synthesize(solved.coeffs);
    } catch (const std::exception& e) {
      rep.failed = true;
      rep.error = e.what();
      outputs[f] = std::move(windowed);  // fall back to the observed frame
    }
  };

  parallel_for(frames_n, resolve_threads(options.threads), process);

  TimeSignal out = overlap_add(outputs, plan, static_cast<int>(xc.size()));
  out.sample_rate = clipped.sample_rate;

  if (options.replace_reliable) {
    ClipMask global = detect_mask(xc, tau, options.eps_mask);
    for (int i : global.reliable()) out.samples[i] = xc[i];
  }
  return {std::move(out), std::move(reports)};
}

}  // namespace declip

#pragma once
// Shared helpers for the test binaries.

#include <cmath>
#include <cstdint>
#include <vector>

#include "declip/rng.hpp"
#include "declip/signal.hpp"

namespace testsup {

inline std::vector<double> random_vector(declip::Rng& rng, int n,
                                         double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

inline declip::TimeSignal random_signal(declip::Rng& rng, int n,
                                        double scale = 1.0) {
  declip::TimeSignal s;
  s.samples = random_vector(rng, n, scale);
  return s;
}

// Clipping threshold that clips roughly the given fraction of samples.
inline double tau_for_fraction(const std::vector<double>& x, double fraction) {
  std::vector<double> mags(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mags[i] = std::abs(x[i]);
  std::sort(mags.begin(), mags.end());
  const std::size_t idx = static_cast<std::size_t>(
      (1.0 - fraction) * static_cast<double>(mags.size()));
  const double tau = mags[std::min(idx, mags.size() - 1)];
  return tau > 0.0 ? tau : 0.5 * mags.back() + 1e-9;
}

// Deterministic "music-like" signal: a handful of note events, each a sum of
// exponentially damped harmonics.
inline declip::TimeSignal music_like(double seconds, int sample_rate) {
  const int n = static_cast<int>(seconds * sample_rate);
  declip::TimeSignal sig;
  sig.sample_rate = sample_rate;
  sig.samples.assign(n, 0.0);

  struct Note {
    double t0, f0, amp, decay;
  };
  const Note notes[] = {
      {0.00, 220.00, 0.9, 3.0}, {0.25, 277.18, 0.7, 2.5},
      {0.50, 329.63, 0.8, 3.5}, {0.75, 440.00, 1.0, 2.0},
      {1.00, 246.94, 0.6, 3.0}, {1.20, 369.99, 0.8, 4.0},
      {1.45, 493.88, 0.7, 2.5}, {1.70, 554.37, 0.9, 3.0},
  };
  const double harmonics[] = {1.0, 0.5, 0.33, 0.2, 0.12};

  for (const Note& note : notes) {
    const int start = static_cast<int>(note.t0 * sample_rate);
    for (int i = start; i < n; ++i) {
      const double t = static_cast<double>(i - start) / sample_rate;
      const double env = note.amp * std::exp(-note.decay * t);
      if (env < 1e-5) break;
      double v = 0.0;
      for (int h = 0; h < 5; ++h)
        v += harmonics[h] *
             std::sin(2.0 * M_PI * note.f0 * (h + 1) * t + 0.37 * (h + 1));
      sig.samples[i] += env * v;
    }
  }

  double peak = 0.0;
  for (double v : sig.samples) peak = std::max(peak, std::abs(v));
  for (double& v : sig.samples) v *= 0.7 / peak;
  return sig;
}

}  // namespace testsup

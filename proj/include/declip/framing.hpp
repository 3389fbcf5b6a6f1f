#pragma once
// Frame-based audio declipping: split the signal into 75%-overlapping
// windowed frames, solve each frame independently, re-synthesize by
// weighted overlap-add.

#include <span>
#include <string>
#include <vector>

#include "declip/dictionary.hpp"
#include "declip/signal.hpp"
#include "declip/solver.hpp"

namespace declip {

// w[i] = sin(pi*(i+0.5)/n); symmetric, entries in (0, 1].
std::vector<double> sine_window(int n);

struct FramePlan {
  int frame_len = 1024;
  int hop = 256;
  std::vector<double> window;  // applied at analysis and at synthesis

  static FramePlan standard(int frame_len = 1024);
  void validate() const;
  int pad() const { return frame_len - hop; }
};

// Frames of the zero-padded signal at offsets 0, hop, 2*hop, ... The padding
// (frame_len - hop on the left, enough on the right) makes every original
// sample land in exactly frame_len/hop frames. Frames are not windowed here.
std::vector<std::vector<double>> split_frames(std::span<const double> x,
                                              const FramePlan& plan);

// Offset of frame f in original-signal coordinates (can be negative).
int frame_offset(const FramePlan& plan, int frame_index);

// Multiplies each frame by the window, accumulates at its offset and divides
// by the accumulated squared-window envelope. Together with an analysis
// window applied by the caller this reconstructs the input exactly:
// overlap_add(window * split_frames(x)) == x.
TimeSignal overlap_add(const std::vector<std::vector<double>>& frames,
                       const FramePlan& plan, int out_len);

struct DeclipFrameReport {
  int index = 0;
  int offset = 0;  // original-signal coordinates
  bool bypassed = false;
  bool failed = false;
  std::string error;
  int k_used = 0;
  int iterations = 0;
  double final_cost = 0.0;
  StopReason stop_reason = StopReason::consistent;
};

struct DeclipOptions {
  double eps_mask = 0.0;
  bool replace_reliable = false;  // copy observed values back on reliable samples
  int threads = 0;                // <= 0: DECLIP_THREADS env, then all cores
};

struct DeclipResult {
  TimeSignal output;
  std::vector<DeclipFrameReport> frames;
};

// Full pipeline: split -> detect mask on the raw frame -> window ->
// adaptive IHT-DC per frame -> overlap-add. Frames without clipped samples
// bypass the solver; per-frame solver failures fall back to the observed
// frame and are recorded, never thrown.
DeclipResult declip_audio(const TimeSignal& clipped, double tau,
                          DictKind dict_kind, const SolverConfig& cfg,
                          const FramePlan& plan,
                          const DeclipOptions& options = {});

}  // namespace declip

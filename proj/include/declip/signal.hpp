#pragma once
// Clipping forward model: hard clip, index-set decomposition of the samples
// into reliable / positively clipped / negatively clipped sets, and the
// consistency map and cost built on that decomposition.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace declip {

struct TimeSignal {
  std::vector<double> samples;
  std::optional<int> sample_rate;  // samples per second, when meaningful

  int n() const { return static_cast<int>(samples.size()); }
};

// Per-sample classification. Values: 0 reliable, +1 clipped at +tau,
// -1 clipped at -tau.
class ClipMask {
 public:
  explicit ClipMask(std::vector<std::int8_t> classes);
  static ClipMask from_sets(std::vector<int> reliable, std::vector<int> clipped_pos,
                            std::vector<int> clipped_neg, int n);

  int n() const { return static_cast<int>(classes_.size()); }
  const std::vector<int>& reliable() const { return reliable_; }
  const std::vector<int>& clipped_pos() const { return clipped_pos_; }
  const std::vector<int>& clipped_neg() const { return clipped_neg_; }
  const std::vector<std::int8_t>& classes() const { return classes_; }
  bool has_clipped() const {
    return !clipped_pos_.empty() || !clipped_neg_.empty();
  }

 private:
  ClipMask() = default;
  std::vector<std::int8_t> classes_;
  std::vector<int> reliable_, clipped_pos_, clipped_neg_;
};

// A clipped observation: the samples, the clipping level and the mask. The
// per-sample clamp bounds consumed by the kernels are precomputed here.
//
// checked() additionally verifies that the samples sit where the mask says
// (|x| < tau on reliable samples, x = +/-tau within eps on clipped ones);
// the plain constructor skips that, which the framing pipeline relies on
// because its windowed frames carry a per-sample clipping level w[i]*tau.
class ClippedObservation {
 public:
  ClippedObservation(std::vector<double> samples, double tau, ClipMask mask);
  static ClippedObservation checked(std::vector<double> samples, double tau,
                                    ClipMask mask, double eps = 0.0);

  int n() const { return static_cast<int>(samples_.size()); }
  const std::vector<double>& samples() const { return samples_; }
  double tau() const { return tau_; }
  const ClipMask& mask() const { return mask_; }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }

 private:
  std::vector<double> samples_;
  double tau_;
  ClipMask mask_;
  std::vector<double> lo_, hi_;
};

// Hard clip: min(|x_i|, tau) * sign(x_i) with the mask derived from x itself
// (|x_i| >= tau lands in the clipped set matching the sign of x_i).
ClippedObservation clip(const TimeSignal& x, double tau);

// Recovers the mask from clipped samples: x >= tau - eps_mask goes to the
// positive clipped set, x <= -tau + eps_mask to the negative one.
ClipMask detect_mask(std::span<const double> x_c, double tau,
                     double eps_mask = 0.0);

// Identity on reliable samples, positive part on the positively clipped set,
// negative part on the negatively clipped set.
std::vector<double> consistency_map(std::span<const double> u,
                                    const ClipMask& mask);

// 0.5 * || consistency_map(x_c - x_tilde) ||^2, fused single pass.
double consistency_cost(std::span<const double> x_tilde,
                        const ClippedObservation& obs);

bool is_consistent(std::span<const double> x_tilde,
                   const ClippedObservation& obs, double tol);

}  // namespace declip

#include "declip/signal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "declip/kernels.hpp"

namespace declip {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ClipMask::ClipMask(std::vector<std::int8_t> classes)
    : classes_(std::move(classes)) {
  for (int i = 0; i < n(); ++i) {
    switch (classes_[i]) {
      case 0: reliable_.push_back(i); break;
      case 1: clipped_pos_.push_back(i); break;
      case -1: clipped_neg_.push_back(i); break;
      default:
        throw std::invalid_argument("ClipMask: class values must be -1, 0 or 1");
    }
  }
}

ClipMask ClipMask::from_sets(std::vector<int> reliable,
                             std::vector<int> clipped_pos,
                             std::vector<int> clipped_neg, int n) {
  if (n < 0) throw std::invalid_argument("ClipMask: negative length");
  std::vector<std::int8_t> cls(static_cast<std::size_t>(n), std::int8_t{99});
  auto place = [&](const std::vector<int>& set, std::int8_t v) {
    for (int i : set) {
      if (i < 0 || i >= n)
        throw std::invalid_argument("ClipMask: index out of range");
      if (cls[i] != 99)
        throw std::invalid_argument("ClipMask: sets are not disjoint");
      cls[i] = v;
    }
  };
  place(reliable, 0);
  place(clipped_pos, 1);
  place(clipped_neg, -1);
  for (std::int8_t c : cls)
    if (c == 99)
      throw std::invalid_argument("ClipMask: sets do not cover all indices");
  return ClipMask(std::move(cls));
}

ClippedObservation::ClippedObservation(std::vector<double> samples, double tau,
                                       ClipMask mask)
    : samples_(std::move(samples)), tau_(tau), mask_(std::move(mask)) {
  if (tau_ <= 0.0) throw std::invalid_argument("ClippedObservation: tau must be positive");
  if (mask_.n() != n())
    throw std::invalid_argument("ClippedObservation: mask length mismatch");
  lo_.resize(samples_.size());
  hi_.resize(samples_.size());
  const auto& cls = mask_.classes();
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (cls[i] == 0) {
      lo_[i] = 0.0;
      hi_[i] = 0.0;
    } else if (cls[i] > 0) {
      lo_[i] = -kInf;   // residual u = x_c - x~ penalized only when positive
      hi_[i] = 0.0;
    } else {
      lo_[i] = 0.0;
      hi_[i] = kInf;
    }
  }
}

ClippedObservation ClippedObservation::checked(std::vector<double> samples,
                                               double tau, ClipMask mask,
                                               double eps) {
  const auto& cls = mask.classes();
  if (static_cast<std::size_t>(mask.n()) != samples.size())
    throw std::invalid_argument("ClippedObservation: mask length mismatch");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!std::isfinite(samples[i]))
      throw std::invalid_argument("ClippedObservation: non-finite sample");
    if (cls[i] == 0) {
      if (std::abs(samples[i]) >= tau)
        throw std::invalid_argument("ClippedObservation: reliable sample at or above tau");
    } else if (std::abs(samples[i] - (cls[i] > 0 ? tau : -tau)) > eps) {
      throw std::invalid_argument("ClippedObservation: clipped sample not at +/-tau");
    }
  }
  return ClippedObservation(std::move(samples), tau, std::move(mask));
}

ClippedObservation clip(const TimeSignal& x, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("clip: tau must be positive");
  if (x.n() < 1) throw std::invalid_argument("clip: empty signal");
  for (double v : x.samples)
    if (!std::isfinite(v)) throw std::invalid_argument("clip: non-finite sample");

  std::vector<double> out(x.samples.size());
  kernels::hard_clip(x.samples.data(), x.samples.size(), tau, out.data());

  std::vector<std::int8_t> cls(x.samples.size());
  for (std::size_t i = 0; i < x.samples.size(); ++i) {
    const double v = x.samples[i];
    cls[i] = (v >= tau) ? std::int8_t{1} : (v <= -tau) ? std::int8_t{-1} : std::int8_t{0};
  }
  return ClippedObservation(std::move(out), tau, ClipMask(std::move(cls)));
}

ClipMask detect_mask(std::span<const double> x_c, double tau, double eps_mask) {
  if (tau <= 0.0) throw std::invalid_argument("detect_mask: tau must be positive");
  if (eps_mask < 0.0) throw std::invalid_argument("detect_mask: negative eps_mask");
  std::vector<std::int8_t> cls(x_c.size());
  for (std::size_t i = 0; i < x_c.size(); ++i) {
    const double v = x_c[i];
    cls[i] = (v >= tau - eps_mask)    ? std::int8_t{1}
             : (v <= -tau + eps_mask) ? std::int8_t{-1}
                                      : std::int8_t{0};
  }
  return ClipMask(std::move(cls));
}

std::vector<double> consistency_map(std::span<const double> u,
                                    const ClipMask& mask) {
  if (static_cast<int>(u.size()) != mask.n())
    throw std::invalid_argument("consistency_map: length mismatch");
  std::vector<double> lo(u.size()), hi(u.size()), out(u.size());
  const auto& cls = mask.classes();
  for (std::size_t i = 0; i < u.size(); ++i) {
    lo[i] = (cls[i] > 0) ? -kInf : 0.0;
    hi[i] = (cls[i] < 0) ? kInf : 0.0;
  }
  kernels::clamp_residual(u.data(), lo.data(), hi.data(), u.size(), out.data());
  return out;
}

double consistency_cost(std::span<const double> x_tilde,
                        const ClippedObservation& obs) {
  if (static_cast<int>(x_tilde.size()) != obs.n())
    throw std::invalid_argument("consistency_cost: length mismatch");
  // cost(x~) = 0.5 * || B(x_c - x~) ||^2, evaluated as a line cost at mu=1
  // along direction x~ from base x_c.
  return 0.5 * kernels::clamp_residual_sqnorm_step(
                   obs.samples().data(), x_tilde.data(), 1.0,
                   obs.lower().data(), obs.upper().data(), x_tilde.size());
}

bool is_consistent(std::span<const double> x_tilde,
                   const ClippedObservation& obs, double tol) {
  return consistency_cost(x_tilde, obs) <= tol;
}

}  // namespace declip

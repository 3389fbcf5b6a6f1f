#include "declip/dictionary.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

#include "declip/kernels.hpp"
#include "declip/rng.hpp"

namespace declip {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution through the
// new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

struct Scratch {
  std::vector<double> in, out;
};

Scratch& scratch(std::size_t d) {
  thread_local Scratch s;
  if (s.in.size() < d) {
    s.in.resize(d);
    s.out.resize(d);
  }
  return s;
}

}  // namespace

const char* to_string(DictKind kind) {
  return kind == DictKind::orthonormal_dct ? "orthonormal_dct" : "redundant_dct";
}

DictKind dict_kind_from_string(const std::string& s) {
  if (s == "orthonormal_dct") return DictKind::orthonormal_dct;
  if (s == "redundant_dct") return DictKind::redundant_dct;
  throw std::invalid_argument("unknown dictionary kind: " + s);
}

SparseCoeffs hard_threshold(std::span<const double> alpha, int k) {
  const int d = static_cast<int>(alpha.size());
  if (k < 0 || k > d)
    throw std::invalid_argument("hard_threshold: k out of range");

  SparseCoeffs result;
  result.values.assign(d, 0.0);
  if (k == 0) return result;

  std::vector<int> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  auto larger = [&](int i, int j) {
    const double ai = std::abs(alpha[i]), aj = std::abs(alpha[j]);
    return ai > aj || (ai == aj && i < j);
  };
  if (k < d)
    std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), larger);
  for (int t = 0; t < k; ++t) result.values[idx[t]] = alpha[idx[t]];
  for (int i = 0; i < d; ++i)
    if (result.values[i] != 0.0) result.support.push_back(i);
  return result;
}

Dictionary Dictionary::build(DictKind kind, int n) {
  if (n < 1) throw std::invalid_argument("Dictionary: n must be >= 1");

  Dictionary dict;
  dict.n_ = n;
  dict.d_ = (kind == DictKind::orthonormal_dct) ? n : 2 * n;
  dict.kind_ = kind;

  // Atom k is s_k * cos(pi*(2m+1)*k / (2D)) over samples m < N. The scaling
  // that makes columns orthonormal (D = N) and unit-norm (D = 2N) is the
  // same expression in N for both kinds.
  dict.scale_.resize(dict.d_);
  dict.scale_[0] = std::sqrt(1.0 / n);
  for (int k = 1; k < dict.d_; ++k) dict.scale_[k] = std::sqrt(2.0 / n);

  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    std::vector<double> a(dict.d_), b(dict.d_);
    dict.plan_fwd_ = fftw_plan_r2r_1d(dict.d_, a.data(), b.data(), FFTW_REDFT10,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    dict.plan_bwd_ = fftw_plan_r2r_1d(dict.d_, a.data(), b.data(), FFTW_REDFT01,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  if (!dict.plan_fwd_ || !dict.plan_bwd_)
    throw std::runtime_error("Dictionary: FFTW plan creation failed");

  // Largest eigenvalue of Psi Psi^T by power iteration (fixed seed).
  {
    Rng rng(0x5eedu);
    std::vector<double> v(n), w;
    for (double& x : v) x = rng.normal();
    double lambda = 1.0;
    for (int it = 0; it < 64; ++it) {
      std::vector<double> coef = dict.analyze(v);
      w = dict.synthesize(coef);
      const double nrm = std::sqrt(kernels::sqnorm(w.data(), w.size()));
      if (nrm == 0.0) break;
      lambda = kernels::dot(v.data(), w.data(), v.size()) /
               kernels::sqnorm(v.data(), v.size());
      for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / nrm;
    }
    dict.frame_norm_ = lambda;
  }
  return dict;
}

Dictionary::Dictionary(Dictionary&& other) noexcept { *this = std::move(other); }

Dictionary& Dictionary::operator=(Dictionary&& other) noexcept {
  std::swap(n_, other.n_);
  std::swap(d_, other.d_);
  std::swap(kind_, other.kind_);
  std::swap(scale_, other.scale_);
  std::swap(frame_norm_, other.frame_norm_);
  std::swap(plan_fwd_, other.plan_fwd_);
  std::swap(plan_bwd_, other.plan_bwd_);
  return *this;
}

Dictionary::~Dictionary() {
  if (plan_fwd_ || plan_bwd_) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  }
}

void Dictionary::synthesize(std::span<const double> alpha,
                            std::span<double> out) const {
  if (static_cast<int>(alpha.size()) != d_)
    throw std::invalid_argument("synthesize: coefficient length mismatch");
  if (static_cast<int>(out.size()) != n_)
    throw std::invalid_argument("synthesize: output length mismatch");

  auto& s = scratch(d_);
  // REDFT01 computes b_0 + 2*sum_k b_k cos(...), so halve every entry but
  // the DC one.
  s.in[0] = scale_[0] * alpha[0];
  for (int k = 1; k < d_; ++k) s.in[k] = 0.5 * scale_[k] * alpha[k];
  fftw_execute_r2r(static_cast<fftw_plan>(plan_bwd_), s.in.data(), s.out.data());
  std::copy_n(s.out.begin(), n_, out.begin());
}

std::vector<double> Dictionary::synthesize(std::span<const double> alpha) const {
  std::vector<double> out(n_);
  synthesize(alpha, out);
  return out;
}

std::vector<double> Dictionary::synthesize(const SparseCoeffs& alpha) const {
  return synthesize(std::span<const double>(alpha.values));
}

void Dictionary::analyze(std::span<const double> x,
                         std::span<double> out) const {
  if (static_cast<int>(x.size()) != n_)
    throw std::invalid_argument("analyze: signal length mismatch");
  if (static_cast<int>(out.size()) != d_)
    throw std::invalid_argument("analyze: output length mismatch");

  auto& s = scratch(d_);
  std::copy(x.begin(), x.end(), s.in.begin());
  std::fill(s.in.begin() + n_, s.in.begin() + d_, 0.0);  // zero-pad when D > N
  fftw_execute_r2r(static_cast<fftw_plan>(plan_fwd_), s.in.data(), s.out.data());
  for (int k = 0; k < d_; ++k) out[k] = 0.5 * scale_[k] * s.out[k];
}

std::vector<double> Dictionary::analyze(std::span<const double> x) const {
  std::vector<double> out(d_);
  analyze(x, out);
  return out;
}

}  // namespace declip

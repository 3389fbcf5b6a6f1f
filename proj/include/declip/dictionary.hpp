#pragma once
// Synthesis dictionaries: orthonormal DCT-II (D = N) and a two-times
// frequency-oversampled DCT (D = 2N) whose columns are normalized to unit
// norm. Forward/adjoint application runs through FFTW r2r transforms; the
// test suite checks both against an explicit dense-matrix reference.

#include <span>
#include <string>
#include <vector>

namespace declip {

enum class DictKind { orthonormal_dct, redundant_dct };

const char* to_string(DictKind kind);
DictKind dict_kind_from_string(const std::string& s);

struct SparseCoeffs {
  std::vector<double> values;  // dense, length D
  std::vector<int> support;    // ascending indices of the nonzero entries

  int l0() const { return static_cast<int>(support.size()); }
};

// Keeps the K largest-magnitude entries (ties keep the lowest index) and
// zeroes the rest.
SparseCoeffs hard_threshold(std::span<const double> alpha, int k);

class Dictionary {
 public:
  static Dictionary build(DictKind kind, int n);

  Dictionary(const Dictionary&) = delete;
  Dictionary& operator=(const Dictionary&) = delete;
  Dictionary(Dictionary&& other) noexcept;
  Dictionary& operator=(Dictionary&& other) noexcept;
  ~Dictionary();

  int n() const { return n_; }
  int d() const { return d_; }
  DictKind kind() const { return kind_; }

  // x = Psi * alpha
  void synthesize(std::span<const double> alpha, std::span<double> out) const;
  std::vector<double> synthesize(std::span<const double> alpha) const;
  std::vector<double> synthesize(const SparseCoeffs& alpha) const;

  // alpha = Psi^T * x
  void analyze(std::span<const double> x, std::span<double> out) const;
  std::vector<double> analyze(std::span<const double> x) const;

  // Power-iteration estimate of ||Psi Psi^T||, fixed at build time; the
  // default line-search bracket is 2 over this value.
  double frame_operator_norm() const { return frame_norm_; }

 private:
  Dictionary() = default;

  int n_ = 0;
  int d_ = 0;
  DictKind kind_ = DictKind::orthonormal_dct;
  std::vector<double> scale_;  // per-atom column scaling
  double frame_norm_ = 1.0;
  void* plan_fwd_ = nullptr;  // fftw_plan, REDFT10 of size d
  void* plan_bwd_ = nullptr;  // fftw_plan, REDFT01 of size d
};

}  // namespace declip

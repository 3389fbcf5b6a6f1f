#pragma once
// Explicit dense-matrix reference for the DCT dictionaries, built by direct
// cosine evaluation and applied by plain matrix products. Kept independent
// of the transform-based production path on purpose: it is the oracle that
// path is tested against.

#include <cmath>
#include <vector>

#include "declip/dictionary.hpp"

namespace testsup {

struct DenseDict {
  int n = 0, d = 0;
  std::vector<double> m;  // row-major, n x d

  static DenseDict build(declip::DictKind kind, int n) {
    DenseDict dict;
    dict.n = n;
    dict.d = (kind == declip::DictKind::orthonormal_dct) ? n : 2 * n;
    dict.m.resize(static_cast<std::size_t>(n) * dict.d);
    for (int k = 0; k < dict.d; ++k) {
      // unnormalized atom, then exact unit-norm scaling from its own entries
      std::vector<double> col(n);
      double norm_sq = 0.0;
      for (int i = 0; i < n; ++i) {
        col[i] = std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * dict.d));
        norm_sq += col[i] * col[i];
      }
      const double scale = 1.0 / std::sqrt(norm_sq);
      for (int i = 0; i < n; ++i)
        dict.m[static_cast<std::size_t>(i) * dict.d + k] = scale * col[i];
    }
    return dict;
  }

  std::vector<double> synthesize(const std::vector<double>& alpha) const {
    std::vector<double> x(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k)
        x[i] += m[static_cast<std::size_t>(i) * d + k] * alpha[k];
    return x;
  }

  std::vector<double> analyze(const std::vector<double>& x) const {
    std::vector<double> alpha(d, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < d; ++k)
        alpha[k] += m[static_cast<std::size_t>(i) * d + k] * x[i];
    return alpha;
  }
};

}  // namespace testsup

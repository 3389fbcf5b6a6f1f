#pragma once
// Internal dispatch table shared by the scalar and SIMD kernel TUs.

#include <cstddef>

namespace declip::kernels::detail {

struct Table {
  void (*hard_clip)(const double*, std::size_t, double, double*);
  void (*multiply)(const double*, const double*, std::size_t, double*);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*dot)(const double*, const double*, std::size_t);
  double (*sqnorm)(const double*, std::size_t);
  void (*clamp_residual)(const double*, const double*, const double*,
                         std::size_t, double*);
  double (*clamp_residual_sqnorm)(const double*, const double*, const double*,
                                  std::size_t);
  double (*clamp_residual_sqnorm_step)(const double*, const double*, double,
                                       const double*, const double*,
                                       std::size_t);
  const char* name;
};

const Table& avx2_table();   // defined in kernels_avx2.cpp when built
bool runtime_has_avx2();

}  // namespace declip::kernels::detail

#pragma once
// Array kernels used by the inner loops: scalar reference implementations
// plus SIMD variants selected at runtime. All kernels are pure functions of
// their arguments and safe to call concurrently.
//
// The consistency penalty is expressed through per-sample clamp bounds:
// a residual u is mapped to u - clamp(u, lo, hi). Reliable samples use
// (0, 0), positively clipped samples (-inf, 0), negatively clipped samples
// (0, +inf), and samples excluded from the cost (-inf, +inf).

#include <cstddef>

namespace declip::kernels {

enum class Mode { Auto, Scalar, Avx2 };

// Selects the kernel set. Auto picks the best variant the CPU supports;
// requesting Avx2 on hardware without it falls back to scalar. The
// DECLIP_SIMD environment variable ("auto"/"scalar"/"avx2") sets the
// initial mode.
void set_mode(Mode mode);
Mode mode();

// Name of the kernel set actually in use: "scalar" or "avx2".
const char* active_name();
bool cpu_has_avx2();

// out[i] = min(max(x[i], -tau), tau)
void hard_clip(const double* x, std::size_t n, double tau, double* out);

// out[i] = a[i] * b[i]
void multiply(const double* a, const double* b, std::size_t n, double* out);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

double dot(const double* a, const double* b, std::size_t n);
double sqnorm(const double* x, std::size_t n);

// out[i] = u[i] - clamp(u[i], lo[i], hi[i])
void clamp_residual(const double* u, const double* lo, const double* hi,
                    std::size_t n, double* out);

// sum_i (u[i] - clamp(u[i], lo[i], hi[i]))^2
double clamp_residual_sqnorm(const double* u, const double* lo,
                             const double* hi, std::size_t n);

// Same with u[i] replaced by u[i] - mu * step[i], in one fused pass. This is
// the line-search hot loop.
double clamp_residual_sqnorm_step(const double* u, const double* step,
                                  double mu, const double* lo,
                                  const double* hi, std::size_t n);

}  // namespace declip::kernels

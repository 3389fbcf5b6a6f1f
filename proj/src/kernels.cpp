#include "declip/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>

#include "kernels_table.hpp"

namespace declip::kernels {

namespace scalar {

void hard_clip(const double* x, std::size_t n, double tau, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::min(std::max(x[i], -tau), tau);
}

void multiply(const double* a, const double* b, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sqnorm(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
  return s;
}

void clamp_residual(const double* u, const double* lo, const double* hi,
                    std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = u[i] - std::min(std::max(u[i], lo[i]), hi[i]);
}

double clamp_residual_sqnorm(const double* u, const double* lo,
                             const double* hi, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = u[i] - std::min(std::max(u[i], lo[i]), hi[i]);
    s += r * r;
  }
  return s;
}

double clamp_residual_sqnorm_step(const double* u, const double* step,
                                  double mu, const double* lo,
                                  const double* hi, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u[i] - mu * step[i];
    const double r = v - std::min(std::max(v, lo[i]), hi[i]);
    s += r * r;
  }
  return s;
}

}  // namespace scalar

namespace detail {
namespace {

const Table kScalarTable = {
    scalar::hard_clip,
    scalar::multiply,
    scalar::axpy,
    scalar::dot,
    scalar::sqnorm,
    scalar::clamp_residual,
    scalar::clamp_residual_sqnorm,
    scalar::clamp_residual_sqnorm_step,
    "scalar",
};

bool host_has_avx2() {
#if DECLIP_HAVE_AVX2_TU
  return runtime_has_avx2();
#else
  return false;
#endif
}

const Table* resolve(Mode m) {
#if DECLIP_HAVE_AVX2_TU
  if (m != Mode::Scalar && host_has_avx2()) return &avx2_table();
#else
  (void)m;
#endif
  return &kScalarTable;
}

Mode initial_mode() {
  if (const char* env = std::getenv("DECLIP_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return Mode::Scalar;
    if (std::strcmp(env, "avx2") == 0) return Mode::Avx2;
  }
  return Mode::Auto;
}

Mode g_mode = initial_mode();
const Table* g_active = resolve(g_mode);

}  // namespace
}  // namespace detail

void set_mode(Mode m) {
  detail::g_mode = m;
  detail::g_active = detail::resolve(m);
}

Mode mode() { return detail::g_mode; }

const char* active_name() { return detail::g_active->name; }

bool cpu_has_avx2() { return detail::host_has_avx2(); }

void hard_clip(const double* x, std::size_t n, double tau, double* out) {
  detail::g_active->hard_clip(x, n, tau, out);
}

void multiply(const double* a, const double* b, std::size_t n, double* out) {
  detail::g_active->multiply(a, b, n, out);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  detail::g_active->axpy(a, x, y, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return detail::g_active->dot(a, b, n);
}

double sqnorm(const double* x, std::size_t n) {
  return detail::g_active->sqnorm(x, n);
}

void clamp_residual(const double* u, const double* lo, const double* hi,
                    std::size_t n, double* out) {
  detail::g_active->clamp_residual(u, lo, hi, n, out);
}

double clamp_residual_sqnorm(const double* u, const double* lo,
                             const double* hi, std::size_t n) {
  return detail::g_active->clamp_residual_sqnorm(u, lo, hi, n);
}

double clamp_residual_sqnorm_step(const double* u, const double* step,
                                  double mu, const double* lo,
                                  const double* hi, std::size_t n) {
  return detail::g_active->clamp_residual_sqnorm_step(u, step, mu, lo, hi, n);
}

}  // namespace declip::kernels

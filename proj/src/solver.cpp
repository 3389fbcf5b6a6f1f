#include "declip/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "declip/kernels.hpp"

namespace declip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5)-1)/2

double resolve_mu_max(const GoldenSectionSearch& gss, const Dictionary& dict) {
  return gss.mu_max > 0.0 ? gss.mu_max : 2.0 / dict.frame_operator_norm();
}

// Golden-section minimization of h over [0, mu_max]; h0 = h(0) is already
// known to the caller. Returns the best probed point, or 0 when nothing
// probed improves on h0.
template <typename H>
double golden_minimize(const H& h, double h0, double mu_max, double tol,
                       int max_evals) {
  double a = 0.0, b = mu_max;
  double best_mu = 0.0, best_h = h0;
  int evals = 0;

  auto probe = [&](double mu) {
    const double v = h(mu);
    ++evals;
    if (v < best_h) {
      best_h = v;
      best_mu = mu;
    }
    return v;
  };

  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double hc = probe(c);
  double hd = probe(d);
  while (evals < max_evals && (b - a) > tol * mu_max) {
    if (hc < hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - kInvPhi * (b - a);
      hc = probe(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + kInvPhi * (b - a);
      hd = probe(d);
    }
  }
  return best_mu;
}

// Keeps the k largest magnitudes of v in place (ties keep the lowest index).
void threshold_inplace(std::vector<double>& v, int k, std::vector<int>& idx) {
  const int d = static_cast<int>(v.size());
  if (k >= d) return;
  if (k <= 0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  idx.resize(d);
  std::iota(idx.begin(), idx.end(), 0);
  auto larger = [&](int i, int j) {
    const double ai = std::abs(v[i]), aj = std::abs(v[j]);
    return ai > aj || (ai == aj && i < j);
  };
  std::nth_element(idx.begin(), idx.begin() + (k - 1), idx.end(), larger);
  for (int t = k; t < d; ++t) v[idx[t]] = 0.0;
}

SparseCoeffs make_sparse(std::vector<double> values) {
  SparseCoeffs c;
  c.values = std::move(values);
  for (int i = 0; i < static_cast<int>(c.values.size()); ++i)
    if (c.values[i] != 0.0) c.support.push_back(i);
  return c;
}

struct IhtWork {
  std::vector<double> u;       // x_c - Psi alpha
  std::vector<double> mapped;  // B(u)
  std::vector<double> dir;     // Psi^T B(u)
  std::vector<double> ydir;    // Psi dir
  std::vector<double> next;    // alpha + mu * dir, thresholded
  std::vector<double> ynext;   // Psi next
  std::vector<int> idx;
};

// One gradient + threshold step at sparsity k. Returns E(Psi alpha) after
// the update. alpha and y are updated in place; coeff_delta gets
// ||alpha_next - alpha|| and coeff_norm ||alpha|| before the update.
double iht_step(const std::vector<double>& xc, const double* lo,
                const double* hi, const Dictionary& dict,
                const StepRule& step, double mu_max, int k,
                std::vector<double>& alpha, std::vector<double>& y,
                IhtWork& w, double& coeff_delta, double& coeff_norm) {
  const std::size_t n = xc.size();
  const int dcoef = dict.d();

  for (std::size_t i = 0; i < n; ++i) w.u[i] = xc[i] - y[i];
  kernels::clamp_residual(w.u.data(), lo, hi, n, w.mapped.data());
  dict.analyze(w.mapped, w.dir);

  double mu;
  if (const auto* fixed = std::get_if<FixedStep>(&step)) {
    mu = fixed->mu;
  } else {
    const auto& gss = std::get<GoldenSectionSearch>(step);
    dict.synthesize(w.dir, w.ydir);
    const double h0 =
        0.5 * kernels::clamp_residual_sqnorm(w.u.data(), lo, hi, n);
    // After a step alpha + m*dir the residual becomes u - m*ydir.
    auto h = [&](double m) {
      return 0.5 * kernels::clamp_residual_sqnorm_step(
                       w.u.data(), w.ydir.data(), m, lo, hi, n);
    };
    mu = golden_minimize(h, h0, mu_max, gss.tol, gss.max_evals);
  }

  std::copy(alpha.begin(), alpha.end(), w.next.begin());
  kernels::axpy(mu, w.dir.data(), w.next.data(), dcoef);
  threshold_inplace(w.next, k, w.idx);

  coeff_norm = std::sqrt(kernels::sqnorm(alpha.data(), alpha.size()));
  double delta_sq = 0.0;
  for (int i = 0; i < dcoef; ++i) {
    const double d = w.next[i] - alpha[i];
    delta_sq += d * d;
  }
  coeff_delta = std::sqrt(delta_sq);

  dict.synthesize(w.next, w.ynext);
  alpha.swap(w.next);
  y.swap(w.ynext);

  for (std::size_t i = 0; i < n; ++i) w.u[i] = xc[i] - y[i];
  return 0.5 * kernels::clamp_residual_sqnorm(w.u.data(), lo, hi, n);
}

SolveResult iht_fixed_k(const ClippedObservation& obs, const Dictionary& dict,
                        int k, const SolverConfig& cfg, const double* lo,
                        const double* hi) {
  if (obs.n() != dict.n())
    throw std::invalid_argument("solver: observation/dictionary length mismatch");
  if (k < 0 || k > dict.d())
    throw std::invalid_argument("solver: k out of range");

  const auto& xc = obs.samples();
  const double xc_sq = kernels::sqnorm(xc.data(), xc.size());
  const double cost_tol = cfg.cost_tol >= 0.0 ? cfg.cost_tol : 1e-12 * xc_sq;
  double mu_max = 1.0;
  if (const auto* gss = std::get_if<GoldenSectionSearch>(&cfg.step))
    mu_max = resolve_mu_max(*gss, dict);

  std::vector<double> alpha(dict.d(), 0.0), y(dict.n(), 0.0);
  IhtWork w;
  w.u.resize(dict.n());
  w.mapped.resize(dict.n());
  w.dir.resize(dict.d());
  w.ydir.resize(dict.n());
  w.next.resize(dict.d());
  w.ynext.resize(dict.n());

  SolveReport report;
  report.k_used = k;
  report.stop_reason = StopReason::max_iters;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double delta = 0.0, norm = 0.0;
    const double cost = iht_step(xc, lo, hi, dict, cfg.step, mu_max, k, alpha,
                                 y, w, delta, norm);
    report.iterations = iter;
    report.cost_trace.push_back(cost);
    if (cost <= cost_tol) {
      report.converged = true;
      report.stop_reason = StopReason::cost_tol;
      break;
    }
    const double rel = delta / (norm > 0.0 ? norm : 1.0);
    if (rel <= cfg.coeff_tol) {
      report.converged = true;
      report.stop_reason = StopReason::coeff_tol;
      break;
    }
  }
  report.final_cost =
      report.cost_trace.empty() ? 0.0 : report.cost_trace.back();
  return {make_sparse(std::move(alpha)), std::move(report)};
}

}  // namespace

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::cost_tol: return "cost_tol";
    case StopReason::coeff_tol: return "coeff_tol";
    case StopReason::max_iters: return "max_iters";
    case StopReason::consistent: return "consistent";
  }
  return "unknown";
}

std::vector<double> gradient(std::span<const double> alpha,
                             const ClippedObservation& obs,
                             const Dictionary& dict) {
  if (static_cast<int>(alpha.size()) != dict.d())
    throw std::invalid_argument("gradient: coefficient length mismatch");
  if (obs.n() != dict.n())
    throw std::invalid_argument("gradient: observation length mismatch");
  std::vector<double> y = dict.synthesize(alpha);
  std::vector<double> u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) u[i] = obs.samples()[i] - y[i];
  std::vector<double> mapped(u.size());
  kernels::clamp_residual(u.data(), obs.lower().data(), obs.upper().data(),
                          u.size(), mapped.data());
  std::vector<double> g = dict.analyze(mapped);
  for (double& v : g) v = -v;
  return g;
}

double golden_section_step(std::span<const double> alpha,
                           std::span<const double> descent_dir,
                           const ClippedObservation& obs,
                           const Dictionary& dict, double mu_max, double tol,
                           int max_evals) {
  if (mu_max <= 0.0)
    throw std::invalid_argument("golden_section_step: mu_max must be positive");
  std::vector<double> y = dict.synthesize(alpha);
  std::vector<double> yd = dict.synthesize(descent_dir);
  std::vector<double> u(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) u[i] = obs.samples()[i] - y[i];

  const double* lo = obs.lower().data();
  const double* hi = obs.upper().data();
  const double h0 =
      0.5 * kernels::clamp_residual_sqnorm(u.data(), lo, hi, u.size());
  auto h = [&](double m) {
    return 0.5 * kernels::clamp_residual_sqnorm_step(u.data(), yd.data(), m,
                                                     lo, hi, u.size());
  };
  return golden_minimize(h, h0, mu_max, tol, max_evals);
}

SolveResult iht_dc(const ClippedObservation& obs, const Dictionary& dict,
                   int k, const SolverConfig& cfg) {
  return iht_fixed_k(obs, dict, k, cfg, obs.lower().data(),
                     obs.upper().data());
}

SolveResult iht_baseline(const ClippedObservation& obs, const Dictionary& dict,
                         int k, const SolverConfig& cfg) {
  if (obs.mask().reliable().empty())
    throw std::invalid_argument("iht_baseline: no reliable samples");
  // Reliable samples keep the exact-match penalty; clipped ones are dropped
  // from the cost altogether.
  std::vector<double> lo(obs.n()), hi(obs.n());
  const auto& cls = obs.mask().classes();
  for (int i = 0; i < obs.n(); ++i) {
    if (cls[i] == 0) {
      lo[i] = 0.0;
      hi[i] = 0.0;
    } else {
      lo[i] = -kInf;
      hi[i] = kInf;
    }
  }
  return iht_fixed_k(obs, dict, k, cfg, lo.data(), hi.data());
}

SolveResult iht_dc_adaptive(const ClippedObservation& obs,
                            const Dictionary& dict, const SolverConfig& cfg) {
  if (!cfg.adaptive)
    throw std::invalid_argument("iht_dc_adaptive: adaptive schedule missing");
  const AdaptiveSchedule& sched = *cfg.adaptive;
  const int k_max = sched.k_max > 0 ? sched.k_max : dict.d() / 4;
  if (sched.k_start < 1 || sched.k_step < 1)
    throw std::invalid_argument("iht_dc_adaptive: bad schedule");
  if (sched.k_start > k_max || k_max > dict.d())
    throw std::invalid_argument("iht_dc_adaptive: k bounds out of range");
  if (obs.n() != dict.n())
    throw std::invalid_argument("solver: observation/dictionary length mismatch");

  const auto& xc = obs.samples();
  const double xc_sq = kernels::sqnorm(xc.data(), xc.size());
  const double target = sched.residual_energy_frac * xc_sq;
  const double* lo = obs.lower().data();
  const double* hi = obs.upper().data();
  double mu_max = 1.0;
  if (const auto* gss = std::get_if<GoldenSectionSearch>(&cfg.step))
    mu_max = resolve_mu_max(*gss, dict);

  std::vector<double> alpha(dict.d(), 0.0), y(dict.n(), 0.0);
  IhtWork w;
  w.u.resize(dict.n());
  w.mapped.resize(dict.n());
  w.dir.resize(dict.d());
  w.ydir.resize(dict.n());
  w.next.resize(dict.d());
  w.ynext.resize(dict.n());

  SolveReport report;
  report.stop_reason = StopReason::max_iters;

  int k = sched.k_start;
  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    double delta = 0.0, norm = 0.0;
    const double cost = iht_step(xc, lo, hi, dict, cfg.step, mu_max, k, alpha,
                                 y, w, delta, norm);
    report.iterations = iter;
    report.cost_trace.push_back(cost);
    report.k_used = k;
    if (2.0 * cost <= target) {  // ||B(x_c - Psi alpha)||^2 <= frac*||x_c||^2
      report.converged = true;
      report.stop_reason = StopReason::consistent;
      break;
    }
    if (k == k_max) break;  // sparsity budget exhausted
    k = std::min(k + sched.k_step, k_max);
  }
  report.final_cost =
      report.cost_trace.empty() ? 0.0 : report.cost_trace.back();
  return {make_sparse(std::move(alpha)), std::move(report)};
}

}  // namespace declip

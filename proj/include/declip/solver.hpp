#pragma once
// Declipping solvers. iht_dc descends the consistency cost
// E(x~) = 0.5*||B(x_c - x~)||^2 with a hard-thresholded gradient step and a
// golden-section step size; iht_baseline is plain IHT on the reliable
// samples only; iht_dc_adaptive grows the sparsity level until the
// consistency residual is small.

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "declip/dictionary.hpp"
#include "declip/signal.hpp"

namespace declip {

struct GoldenSectionSearch {
  double mu_max = 0.0;  // <= 0: use 2 / ||Psi Psi^T||
  double tol = 1e-4;    // bracket width termination, relative to mu_max
  int max_evals = 40;
};

struct FixedStep {
  double mu = 1.0;
};

using StepRule = std::variant<GoldenSectionSearch, FixedStep>;

struct AdaptiveSchedule {
  int k_start = 1;
  int k_step = 1;
  double residual_energy_frac = 1e-4;  // stop when ||B(x_c-Psi a)||^2 <= frac*||x_c||^2
  int k_max = 0;                       // <= 0: D/4
};

struct SolverConfig {
  int max_iters = 500;
  double coeff_tol = 1e-7;  // relative l2 change of the coefficients
  double cost_tol = -1.0;   // absolute; < 0: 1e-12 * ||x_c||^2
  StepRule step = GoldenSectionSearch{};
  std::optional<AdaptiveSchedule> adaptive;
};

enum class StopReason { cost_tol, coeff_tol, max_iters, consistent };
const char* to_string(StopReason reason);

struct SolveReport {
  int iterations = 0;
  std::vector<double> cost_trace;  // E(Psi alpha) after each iteration
  double final_cost = 0.0;
  bool converged = false;
  int k_used = 0;
  StopReason stop_reason = StopReason::max_iters;
};

struct SolveResult {
  SparseCoeffs coeffs;
  SolveReport report;
};

// -Psi^T B(x_c - Psi alpha), the gradient of E(Psi .) at alpha.
std::vector<double> gradient(std::span<const double> alpha,
                             const ClippedObservation& obs,
                             const Dictionary& dict);

// Minimizes g(mu) = E(Psi(alpha + mu * descent_dir)) over [0, mu_max] by
// golden section. Guarantees g(mu*) <= g(0); a zero direction returns 0.
double golden_section_step(std::span<const double> alpha,
                           std::span<const double> descent_dir,
                           const ClippedObservation& obs,
                           const Dictionary& dict, double mu_max, double tol,
                           int max_evals);

SolveResult iht_dc(const ClippedObservation& obs, const Dictionary& dict,
                   int k, const SolverConfig& cfg);

// Plain IHT on the reliable samples; the clipped ones are ignored entirely.
SolveResult iht_baseline(const ClippedObservation& obs, const Dictionary& dict,
                         int k, const SolverConfig& cfg);

SolveResult iht_dc_adaptive(const ClippedObservation& obs,
                            const Dictionary& dict, const SolverConfig& cfg);

}  // namespace declip

#pragma once
// Benchmark harness: SNR metrics, random K-sparse instance generation,
// clipping-severity targeting and the Monte-Carlo phase-transition
// experiment over (sparsity, severity) grids.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "declip/dictionary.hpp"
#include "declip/rng.hpp"
#include "declip/signal.hpp"
#include "declip/solver.hpp"

namespace declip {

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// 10*log10(||x||^2 / ||x - y||^2); +inf when y == x exactly.
double snr_db(std::span<const double> x, std::span<const double> y);
double isnr(std::span<const double> x, std::span<const double> x_clipped);
double osnr(std::span<const double> x, std::span<const double> x_hat);

// Random K-sparse instance: support uniform without replacement, nonzero
// coefficients i.i.d. standard normal, x = Psi * alpha.
std::pair<TimeSignal, SparseCoeffs> gen_sparse_signal(int n, int k,
                                                      const Dictionary& dict,
                                                      Rng& rng);

// Bisects the clipping threshold so that isnr(x, clip(x, tau)) hits
// target_db within tol_db; isnr is increasing in tau.
double tau_for_isnr(std::span<const double> x, double target_db,
                    double tol_db = 0.1);

enum class SolverKind { iht_dc, iht_baseline };
const char* to_string(SolverKind kind);

struct BenchConfig {
  int n = 1024;
  DictKind dict_kind = DictKind::orthonormal_dct;
  std::vector<int> k_values = {32,  64,  128, 256, 384, 512,
                               576, 640, 704, 768, 896, 1024};
  std::vector<double> target_isnr_db = {5.0, 10.0, 20.0};
  int trials = 100;
  double success_osnr_db = 80.0;
  std::uint64_t seed = 20130553;
  double isnr_tol_db = 0.05;
  bool timing = false;  // keep runtimes at 0 so the CSV stays byte-reproducible
  int threads = 0;
  SolverConfig solver;
};

struct BenchRow {
  int k = 0;
  double target_isnr_db = 0.0;
  double achieved_isnr_db = 0.0;  // mean over trials
  double success_prob = 0.0;
  double mean_iters = 0.0;
  double mean_runtime_s = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
};

// One row per (k, severity) grid point; trial t of grid point g draws its
// generator from substream(seed, g, t), so results are independent of
// execution order and thread count.
BenchResult run_phase_transition(const BenchConfig& cfg, SolverKind solver);

// header: k,target_isnr_db,achieved_isnr_db,success_prob,mean_iters,mean_runtime_s
void write_csv(const BenchResult& result, std::ostream& os);
std::string to_csv(const BenchResult& result);

}  // namespace declip

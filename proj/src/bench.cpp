#include "declip/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "declip/kernels.hpp"
#include "declip/parallel.hpp"

namespace declip {

double snr_db(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("snr: length mismatch");
  const double ref = kernels::sqnorm(x.data(), x.size());
  if (ref == 0.0) throw std::invalid_argument("snr: zero reference signal");
  double err = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    err += d * d;
  }
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(ref / err);
}

double isnr(std::span<const double> x, std::span<const double> x_clipped) {
  return snr_db(x, x_clipped);
}

double osnr(std::span<const double> x, std::span<const double> x_hat) {
  return snr_db(x, x_hat);
}

std::pair<TimeSignal, SparseCoeffs> gen_sparse_signal(int n, int k,
                                                      const Dictionary& dict,
                                                      Rng& rng) {
  if (n != dict.n())
    throw std::invalid_argument("gen_sparse_signal: n/dictionary mismatch");
  if (k < 0 || k > dict.d())
    throw std::invalid_argument("gen_sparse_signal: k out of range");

  // Uniform K-subset of [D] by partial Fisher-Yates.
  const int d = dict.d();
  std::vector<int> pool(d);
  std::iota(pool.begin(), pool.end(), 0);
  SparseCoeffs alpha;
  alpha.values.assign(d, 0.0);
  for (int t = 0; t < k; ++t) {
    const int j = t + static_cast<int>(rng.below(static_cast<std::uint64_t>(d - t)));
    std::swap(pool[t], pool[j]);
  }
  std::sort(pool.begin(), pool.begin() + k);
  for (int t = 0; t < k; ++t) {
    double v;
    do {
      v = rng.normal();
    } while (v == 0.0);
    alpha.values[pool[t]] = v;
    alpha.support.push_back(pool[t]);
  }

  TimeSignal x;
  x.samples = dict.synthesize(alpha);
  return {std::move(x), std::move(alpha)};
}

double tau_for_isnr(std::span<const double> x, double target_db,
                    double tol_db) {
  if (target_db <= 0.0)
    throw NumericError("tau_for_isnr: target must be positive");
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw NumericError("tau_for_isnr: zero signal");

  TimeSignal sig;
  sig.samples.assign(x.begin(), x.end());
  auto isnr_at = [&](double tau) {
    return isnr(x, clip(sig, tau).samples());
  };

  double lo = peak * 1e-9, hi = peak;
  if (isnr_at(lo) > target_db)
    throw NumericError("tau_for_isnr: target below achievable range");
  // isnr(hi) = +inf: nothing is strictly above the peak.
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = isnr_at(mid);
    if (std::abs(v - target_db) <= tol_db) return mid;
    (v < target_db ? lo : hi) = mid;
  }
  throw NumericError("tau_for_isnr: bisection failed to converge");
}

const char* to_string(SolverKind kind) {
  return kind == SolverKind::iht_dc ? "iht_dc" : "iht_baseline";
}

namespace {

struct TrialOutcome {
  bool success = false;
  double achieved_isnr = 0.0;
  int iterations = 0;
  double runtime_s = 0.0;
};

TrialOutcome run_trial(const BenchConfig& cfg, SolverKind solver,
                       const Dictionary& dict, int k, double target_db,
                       Rng rng) {
  TrialOutcome out;
  auto [x, alpha_true] = gen_sparse_signal(cfg.n, k, dict, rng);
  const double tau = tau_for_isnr(x.samples, target_db, cfg.isnr_tol_db);
  ClippedObservation obs = clip(x, tau);
  out.achieved_isnr = isnr(x.samples, obs.samples());

  const auto t0 = std::chrono::steady_clock::now();
  SolveResult solved = (solver == SolverKind::iht_dc)
                           ? iht_dc(obs, dict, k, cfg.solver)
                           : iht_baseline(obs, dict, k, cfg.solver);
  if (cfg.timing) {
    out.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
  }
  out.iterations = solved.report.iterations;

  const std::vector<double> x_hat = dict.synthesize(solved.coeffs);
  out.success = osnr(x.samples, x_hat) > cfg.success_osnr_db;
  return out;
}

}  // namespace

BenchResult run_phase_transition(const BenchConfig& cfg, SolverKind solver) {
  if (cfg.trials < 1) throw std::invalid_argument("bench: trials must be >= 1");
  const Dictionary dict = Dictionary::build(cfg.dict_kind, cfg.n);
  for (int k : cfg.k_values)
    if (k < 1 || k > dict.d())
      throw std::invalid_argument("bench: k out of range");

  struct GridPoint {
    int k;
    double target;
  };
  std::vector<GridPoint> grid;
  for (int k : cfg.k_values)
    for (double t : cfg.target_isnr_db) grid.push_back({k, t});

  const int total = static_cast<int>(grid.size()) * cfg.trials;
  std::vector<TrialOutcome> outcomes(total);
  const int threads = resolve_threads(cfg.threads);

  parallel_for(total, threads, [&](int job) {
    const int g = job / cfg.trials;
    const int t = job % cfg.trials;
    // Trial failures count as unsuccessful recoveries instead of aborting
    // the sweep.
    try {
      outcomes[job] = run_trial(cfg, solver, dict, grid[g].k, grid[g].target,
                                Rng::substream(cfg.seed, g, t));
    } catch (const std::exception&) {
      outcomes[job] = TrialOutcome{};
    }
  });

  BenchResult result;
  for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
    BenchRow row;
    row.k = grid[g].k;
    row.target_isnr_db = grid[g].target;
    double isnr_sum = 0.0, iter_sum = 0.0, time_sum = 0.0;
    int successes = 0;
    for (int t = 0; t < cfg.trials; ++t) {
      const TrialOutcome& o = outcomes[g * cfg.trials + t];
      successes += o.success ? 1 : 0;
      isnr_sum += o.achieved_isnr;
      iter_sum += o.iterations;
      time_sum += o.runtime_s;
    }
    row.achieved_isnr_db = isnr_sum / cfg.trials;
    row.success_prob = static_cast<double>(successes) / cfg.trials;
    row.mean_iters = iter_sum / cfg.trials;
    row.mean_runtime_s = time_sum / cfg.trials;
    result.rows.push_back(row);
  }
  return result;
}

void write_csv(const BenchResult& result, std::ostream& os) {
  os << "k,target_isnr_db,achieved_isnr_db,success_prob,mean_iters,"
        "mean_runtime_s\n";
  char buf[192];
  for (const BenchRow& r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.6g,%.6g,%.6g,%.6g,%.6g\n", r.k,
                  r.target_isnr_db, r.achieved_isnr_db, r.success_prob,
                  r.mean_iters, r.mean_runtime_s);
    os << buf;
  }
}

std::string to_csv(const BenchResult& result) {
  std::ostringstream ss;
  write_csv(result, ss);
  return ss.str();
}

}  // namespace declip

// Command-line front end: clip / declip / bench / metrics subcommands over
// WAV and CSV files. Every file-producing run also writes a JSON manifest
// with the resolved configuration and input digests so results can be
// reproduced exactly.
//
// Exit codes: 0 success, 2 usage error, 3 I/O error, 4 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "declip/bench.hpp"
#include "declip/config.hpp"
#include "declip/dictionary.hpp"
#include "declip/framing.hpp"
#include "declip/kernels.hpp"
#include "declip/parallel.hpp"
#include "declip/rng.hpp"
#include "declip/signal.hpp"
#include "declip/solver.hpp"
#include "declip/version.hpp"
#include "declip/wav.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumerical = 4;

std::string fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw declip::IoError("cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

json input_digests(const std::vector<std::string>& paths) {
  json arr = json::array();
  for (const auto& p : paths)
    arr.push_back({{"path", p}, {"digest", "fnv1a64:" + fnv1a64_file(p)}});
  return arr;
}

void write_manifest(const std::string& out_path, const std::string& subcommand,
                    const json& config, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs, double runtime_s) {
  json m{{"schema_version", 1},
         {"tool", declip::kToolName},
         {"version", declip::kVersion},
         {"subcommand", subcommand},
         {"rng", declip::Rng::kName},
         {"config", config},
         {"inputs", input_digests(inputs)},
         {"outputs", outputs},
         {"runtime_s", runtime_s}};
  std::ofstream os(out_path, std::ios::trunc);
  if (!os) throw declip::IoError("cannot write manifest " + out_path);
  os << m.dump(2) << "\n";
}

std::string snr_to_string(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// solver/bench configuration files

declip::SolverConfig solver_from_config(const declip::KeyValueConfig& cfg,
                                        bool allow_adaptive) {
  declip::SolverConfig sc;
  sc.max_iters = cfg.get_int("solver", "max_iters", sc.max_iters);
  sc.coeff_tol = cfg.get_double("solver", "coeff_tol", sc.coeff_tol);
  sc.cost_tol = cfg.get_double("solver", "cost_tol", sc.cost_tol);
  const std::string step = cfg.get("solver", "step", "golden");
  if (step == "golden") {
    declip::GoldenSectionSearch gss;
    gss.mu_max = cfg.get_double("solver", "mu_max", gss.mu_max);
    gss.tol = cfg.get_double("solver", "gss_tol", gss.tol);
    gss.max_evals = cfg.get_int("solver", "gss_max_evals", gss.max_evals);
    sc.step = gss;
  } else if (step == "fixed") {
    declip::FixedStep fs;
    fs.mu = cfg.get_double("solver", "mu", fs.mu);
    sc.step = fs;
  } else {
    throw std::invalid_argument("config: solver.step must be golden or fixed");
  }
  if (allow_adaptive) {
    declip::AdaptiveSchedule sched;
    sched.k_start = cfg.get_int("adaptive", "k_start", sched.k_start);
    sched.k_step = cfg.get_int("adaptive", "k_step", sched.k_step);
    sched.residual_energy_frac = cfg.get_double(
        "adaptive", "residual_energy_frac", sched.residual_energy_frac);
    sched.k_max = cfg.get_int("adaptive", "k_max", sched.k_max);
    sc.adaptive = sched;
  }
  return sc;
}

json solver_to_json(const declip::SolverConfig& sc) {
  json j{{"max_iters", sc.max_iters},
         {"coeff_tol", sc.coeff_tol},
         {"cost_tol", sc.cost_tol}};
  if (const auto* gss = std::get_if<declip::GoldenSectionSearch>(&sc.step)) {
    j["step"] = "golden";
    j["mu_max"] = gss->mu_max;
    j["gss_tol"] = gss->tol;
    j["gss_max_evals"] = gss->max_evals;
  } else {
    j["step"] = "fixed";
    j["mu"] = std::get<declip::FixedStep>(sc.step).mu;
  }
  if (sc.adaptive) {
    j["adaptive"] = {{"k_start", sc.adaptive->k_start},
                     {"k_step", sc.adaptive->k_step},
                     {"residual_energy_frac", sc.adaptive->residual_energy_frac},
                     {"k_max", sc.adaptive->k_max}};
  }
  return j;
}

// ---------------------------------------------------------------------------
// clip

struct ClipArgs {
  std::string input, output;
  std::optional<double> tau;
  std::optional<double> isnr_db;
};

int run_clip(const ClipArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  if (args.tau.has_value() == args.isnr_db.has_value())
    throw CLI::ValidationError("clip", "exactly one of --tau / --isnr-db required");

  declip::WavAudio audio = declip::read_wav(args.input);
  json channel_info = json::array();

  for (int c = 0; c < audio.num_channels(); ++c) {
    auto& samples = audio.channels[c];
    declip::TimeSignal sig{samples, audio.sample_rate};
    const double tau = args.tau ? *args.tau
                                : declip::tau_for_isnr(samples, *args.isnr_db);
    declip::ClippedObservation obs = declip::clip(sig, tau);
    double achieved = std::numeric_limits<double>::infinity();
    if (obs.mask().has_clipped()) achieved = declip::isnr(samples, obs.samples());
    std::printf("channel %d: tau=%.6g iSNR=%s dB (%d of %d samples clipped)\n",
                c, tau, snr_to_string(achieved).c_str(),
                obs.mask().n() - static_cast<int>(obs.mask().reliable().size()),
                obs.mask().n());
    channel_info.push_back({{"channel", c}, {"tau", tau}});
    samples = obs.samples();
  }

  declip::write_wav(args.output, audio);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json config{{"channels", channel_info}};
  if (args.tau) config["tau"] = *args.tau;
  if (args.isnr_db) config["isnr_db"] = *args.isnr_db;
  write_manifest(args.output + ".manifest.json", "clip", config, {args.input},
                 {args.output}, runtime);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// declip

struct DeclipArgs {
  std::string input, output;
  double tau = 0.0;
  int frame_len = 1024;
  int hop = 0;  // 0: frame_len / 4
  std::string dict = "redundant_dct";
  std::string config_path;
  std::string report_path;
  std::string reference_path;
  double eps_mask = -1.0;  // <0: by input format
  bool replace_reliable = false;
  int threads = 0;
};

int run_declip(const DeclipArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  if (args.tau <= 0.0)
    throw CLI::ValidationError("declip", "--tau must be positive");

  declip::WavAudio audio = declip::read_wav(args.input);
  const declip::DictKind kind = declip::dict_kind_from_string(args.dict);

  declip::SolverConfig solver_cfg;
  if (!args.config_path.empty()) {
    auto file = declip::KeyValueConfig::parse_file(args.config_path);
    solver_cfg = solver_from_config(file, /*allow_adaptive=*/true);
    file.ensure_all_consumed();
  }
  if (!solver_cfg.adaptive) solver_cfg.adaptive = declip::AdaptiveSchedule{};

  declip::FramePlan plan = declip::FramePlan::standard(args.frame_len);
  if (args.hop > 0) {
    plan.hop = args.hop;
    plan.validate();
  }

  declip::DeclipOptions options;
  options.eps_mask = args.eps_mask >= 0.0 ? args.eps_mask
                     : audio.format == declip::WavFormat::pcm16
                         ? 1.0 / 32768.0
                         : 1e-6;
  options.replace_reliable = args.replace_reliable;
  options.threads = args.threads;

  json channels = json::array();
  for (int c = 0; c < audio.num_channels(); ++c) {
    declip::TimeSignal sig{audio.channels[c], audio.sample_rate};
    declip::DeclipResult result =
        declip::declip_audio(sig, args.tau, kind, solver_cfg, plan, options);
    json frames = json::array();
    for (const auto& f : result.frames) {
      if (f.bypassed) continue;
      frames.push_back({{"index", f.index},
                        {"offset", f.offset},
                        {"k_used", f.k_used},
                        {"iterations", f.iterations},
                        {"final_cost", f.final_cost},
                        {"stop_reason", f.failed ? "error" : to_string(f.stop_reason)}});
    }
    channels.push_back({{"channel", c},
                        {"frames_total", static_cast<int>(result.frames.size())},
                        {"frames", std::move(frames)}});
    audio.channels[c] = std::move(result.output.samples);
  }
  declip::write_wav(args.output, audio);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double duration =
      static_cast<double>(audio.num_frames()) / audio.sample_rate;

  json report{{"schema_version", 1},
              {"runtime_s", runtime},
              {"duration_s", duration},
              {"runtime_ratio", duration > 0.0 ? runtime / duration : 0.0},
              {"isnr_db", nullptr},
              {"osnr_db", nullptr},
              {"gain_db", nullptr},
              {"channels", std::move(channels)}};

  if (!args.reference_path.empty()) {
    declip::WavAudio ref = declip::read_wav(args.reference_path);
    declip::WavAudio clipped = declip::read_wav(args.input);
    if (ref.num_channels() != audio.num_channels() ||
        ref.num_frames() != audio.num_frames())
      throw declip::IoError("reference shape does not match input");
    double ref_sq = 0.0, in_err = 0.0, out_err = 0.0;
    for (int c = 0; c < ref.num_channels(); ++c)
      for (int i = 0; i < ref.num_frames(); ++i) {
        const double r = ref.channels[c][i];
        const double dc = r - clipped.channels[c][i];
        const double dr = r - audio.channels[c][i];
        ref_sq += r * r;
        in_err += dc * dc;
        out_err += dr * dr;
      }
    const double in_db = in_err == 0.0 ? std::numeric_limits<double>::infinity()
                                       : 10.0 * std::log10(ref_sq / in_err);
    const double out_db = out_err == 0.0
                              ? std::numeric_limits<double>::infinity()
                              : 10.0 * std::log10(ref_sq / out_err);
    report["isnr_db"] = in_db;
    report["osnr_db"] = out_db;
    report["gain_db"] = out_db - in_db;
    std::printf("iSNR=%s dB  oSNR=%s dB  gain=%s dB\n",
                snr_to_string(in_db).c_str(), snr_to_string(out_db).c_str(),
                snr_to_string(out_db - in_db).c_str());
  }

  if (!args.report_path.empty()) {
    std::ofstream os(args.report_path, std::ios::trunc);
    if (!os) throw declip::IoError("cannot write report " + args.report_path);
    os << report.dump(2) << "\n";
  }

  json config{{"tau", args.tau},
              {"frame_len", plan.frame_len},
              {"hop", plan.hop},
              {"dict", args.dict},
              {"eps_mask", options.eps_mask},
              {"replace_reliable", options.replace_reliable},
              {"threads", declip::resolve_threads(args.threads)},
              {"solver", solver_to_json(solver_cfg)}};
  std::vector<std::string> inputs{args.input};
  if (!args.reference_path.empty()) inputs.push_back(args.reference_path);
  write_manifest(args.output + ".manifest.json", "declip", config, inputs,
                 {args.output}, runtime);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string config_path;
  std::string out_path;
  std::string solver = "both";
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

std::string baseline_path(const std::string& path) {
  std::filesystem::path p(path);
  std::filesystem::path stem = p.stem();
  stem += "_baseline";
  stem += p.extension();
  return (p.parent_path() / stem).string();
}

int run_bench(const BenchArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  declip::BenchConfig cfg;
  if (!args.config_path.empty()) {
    auto file = declip::KeyValueConfig::parse_file(args.config_path);
    cfg.n = file.get_int("bench", "n", cfg.n);
    cfg.dict_kind = declip::dict_kind_from_string(
        file.get("bench", "dict", to_string(cfg.dict_kind)));
    cfg.k_values = file.get_int_list("bench", "k_values", cfg.k_values);
    cfg.target_isnr_db =
        file.get_double_list("bench", "isnr_db", cfg.target_isnr_db);
    cfg.trials = file.get_int("bench", "trials", cfg.trials);
    cfg.success_osnr_db =
        file.get_double("bench", "success_osnr_db", cfg.success_osnr_db);
    if (file.has("bench", "seed"))
      cfg.seed = std::stoull(file.get("bench", "seed", "0"));
    cfg.timing = file.get_bool("bench", "timing", cfg.timing);
    cfg.solver = solver_from_config(file, /*allow_adaptive=*/false);
    file.ensure_all_consumed();
  }
  if (args.seed) cfg.seed = *args.seed;
  cfg.threads = args.threads;

  const bool run_dc = args.solver == "both" || args.solver == "iht_dc";
  const bool run_base = args.solver == "both" || args.solver == "iht_baseline";
  if (!run_dc && !run_base)
    throw CLI::ValidationError("bench",
                               "--solver must be both, iht_dc or iht_baseline");

  std::vector<std::string> outputs;
  auto emit = [&](declip::SolverKind kind, const std::string& path) {
    declip::BenchResult result = declip::run_phase_transition(cfg, kind);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw declip::IoError("cannot write " + path);
    declip::write_csv(result, os);
    outputs.push_back(path);
    std::printf("%s: %zu rows -> %s\n", to_string(kind), result.rows.size(),
                path.c_str());
  };

  if (run_dc) emit(declip::SolverKind::iht_dc, args.out_path);
  if (run_base)
    emit(declip::SolverKind::iht_baseline,
         run_dc ? baseline_path(args.out_path) : args.out_path);

  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json config{{"n", cfg.n},
              {"dict", to_string(cfg.dict_kind)},
              {"k_values", cfg.k_values},
              {"isnr_db", cfg.target_isnr_db},
              {"trials", cfg.trials},
              {"success_osnr_db", cfg.success_osnr_db},
              {"seed", cfg.seed},
              {"timing", cfg.timing},
              {"threads", declip::resolve_threads(cfg.threads)},
              {"solver_selection", args.solver},
              {"solver", solver_to_json(cfg.solver)}};
  std::vector<std::string> inputs;
  if (!args.config_path.empty()) inputs.push_back(args.config_path);
  write_manifest(args.out_path + ".manifest.json", "bench", config, inputs,
                 outputs, runtime);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// metrics

int run_metrics(const std::string& original, const std::string& processed) {
  declip::WavAudio a = declip::read_wav(original);
  declip::WavAudio b = declip::read_wav(processed);
  if (a.num_channels() != b.num_channels() || a.num_frames() != b.num_frames())
    throw std::invalid_argument("metrics: files differ in shape");

  double ref_sq = 0.0, err_sq = 0.0;
  for (int c = 0; c < a.num_channels(); ++c) {
    const double v = declip::snr_db(a.channels[c], b.channels[c]);
    std::printf("channel %d: %s dB\n", c, snr_to_string(v).c_str());
    for (int i = 0; i < a.num_frames(); ++i) {
      const double d = a.channels[c][i] - b.channels[c][i];
      ref_sq += a.channels[c][i] * a.channels[c][i];
      err_sq += d * d;
    }
  }
  const double overall = err_sq == 0.0
                             ? std::numeric_limits<double>::infinity()
                             : 10.0 * std::log10(ref_sq / err_sq);
  std::printf("overall: %s dB\n", snr_to_string(overall).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse declipping toolkit"};
  app.set_version_flag("--version", declip::kVersion);
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0: DECLIP_THREADS env, then all cores)");

  ClipArgs clip_args;
  auto* clip_cmd = app.add_subcommand("clip", "hard-clip a WAV file");
  clip_cmd->add_option("input", clip_args.input, "input WAV")->required();
  clip_cmd->add_option("output", clip_args.output, "output WAV")->required();
  double clip_tau = 0.0, clip_isnr = 0.0;
  auto* tau_opt = clip_cmd->add_option("--tau", clip_tau, "clipping threshold");
  auto* isnr_opt =
      clip_cmd->add_option("--isnr-db", clip_isnr, "target iSNR in dB");
  tau_opt->excludes(isnr_opt);

  DeclipArgs declip_args;
  auto* declip_cmd = app.add_subcommand("declip", "restore a clipped WAV file");
  declip_cmd->add_option("input", declip_args.input, "clipped WAV")->required();
  declip_cmd->add_option("output", declip_args.output, "restored WAV")->required();
  declip_cmd->add_option("--tau", declip_args.tau, "clipping threshold")->required();
  declip_cmd->add_option("--frame", declip_args.frame_len, "frame length");
  declip_cmd->add_option("--hop", declip_args.hop, "hop size (default frame/4)");
  declip_cmd->add_option("--dict", declip_args.dict,
                         "orthonormal_dct | redundant_dct");
  declip_cmd->add_option("--config", declip_args.config_path, "solver config file");
  declip_cmd->add_option("--report", declip_args.report_path, "JSON report path");
  declip_cmd->add_option("--reference", declip_args.reference_path,
                         "unclipped reference WAV for SNR reporting");
  declip_cmd->add_option("--eps-mask", declip_args.eps_mask,
                         "mask detection tolerance (default by format)");
  declip_cmd->add_flag("--replace-reliable", declip_args.replace_reliable,
                       "copy observed values back on reliable samples");

  BenchArgs bench_args;
  auto* bench_cmd =
      app.add_subcommand("bench", "phase-transition benchmark (CSV output)");
  bench_cmd->add_option("--config", bench_args.config_path, "bench config file");
  bench_cmd->add_option("--out", bench_args.out_path, "output CSV")->required();
  bench_cmd->add_option("--solver", bench_args.solver,
                        "both | iht_dc | iht_baseline");
  std::uint64_t bench_seed = 0;
  auto* seed_opt = bench_cmd->add_option("--seed", bench_seed, "RNG seed override");

  std::string metrics_a, metrics_b;
  auto* metrics_cmd = app.add_subcommand("metrics", "SNR between two WAV files");
  metrics_cmd->add_option("original", metrics_a, "reference WAV")->required();
  metrics_cmd->add_option("processed", metrics_b, "processed WAV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (clip_cmd->parsed()) {
      if (tau_opt->count()) clip_args.tau = clip_tau;
      if (isnr_opt->count()) clip_args.isnr_db = clip_isnr;
      return run_clip(clip_args);
    }
    if (declip_cmd->parsed()) {
      declip_args.threads = threads;
      return run_declip(declip_args);
    }
    if (bench_cmd->parsed()) {
      if (seed_opt->count()) bench_args.seed = bench_seed;
      bench_args.threads = threads;
      return run_bench(bench_args);
    }
    if (metrics_cmd->parsed()) return run_metrics(metrics_a, metrics_b);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const declip::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const declip::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

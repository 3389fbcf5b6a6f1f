// End-to-end tests of the command-line binary. The path to the built tool
// arrives through the DECLIP_CLI environment variable (set by CTest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "declip/bench.hpp"
#include "declip/signal.hpp"
#include "declip/wav.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

std::string cli_path() {
  const char* p = std::getenv("DECLIP_CLI");
  REQUIRE_MESSAGE(p != nullptr, "DECLIP_CLI must point to the built binary");
  return p;
}

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("declip_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const fs::path out_file = work_dir() / "cli_output.txt";
  const std::string cmd =
      cli_path() + " " + args + " > " + out_file.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(out_file);
  result.output.assign(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  return result;
}

std::vector<char> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path write_tone_wav(const std::string& name, declip::WavFormat format,
                        double amplitude = 0.9, int n = 4000) {
  declip::WavAudio audio;
  audio.sample_rate = 16000;
  audio.format = format;
  audio.channels.resize(1);
  audio.channels[0].resize(n);
  for (int i = 0; i < n; ++i)
    audio.channels[0][i] = amplitude * std::sin(0.113 * i);
  if (format == declip::WavFormat::pcm16)
    for (double& v : audio.channels[0])
      v = std::round(v * 32768.0) / 32768.0;  // representable in PCM16
  const fs::path p = work_dir() / name;
  declip::write_wav(p.string(), audio);
  return p;
}

}  // namespace

TEST_CASE("clip bounds the output and reports iSNR") {
  const fs::path in = write_tone_wav("tone.wav", declip::WavFormat::pcm16);
  const fs::path out = work_dir() / "tone_clipped.wav";
  const CliResult r =
      run_cli("clip " + in.string() + " " + out.string() + " --tau 0.5");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("iSNR=") != std::string::npos);

  declip::WavAudio clipped = declip::read_wav(out.string());
  for (double v : clipped.channels[0]) CHECK(std::abs(v) <= 0.5);
  CHECK(fs::exists(out.string() + ".manifest.json"));
}

TEST_CASE("clip with tau above the peak is a bit-identical pass-through") {
  const fs::path in = write_tone_wav("tone2.wav", declip::WavFormat::pcm16);
  const fs::path out = work_dir() / "tone2_clipped.wav";
  const CliResult r =
      run_cli("clip " + in.string() + " " + out.string() + " --tau 0.99");
  CHECK(r.exit_code == 0);
  CHECK(slurp(in) == slurp(out));
  CHECK(r.output.find("iSNR=inf") != std::string::npos);
}

TEST_CASE("clip --isnr-db hits the requested severity") {
  const fs::path in = write_tone_wav("tone3.wav", declip::WavFormat::float32);
  const fs::path out = work_dir() / "tone3_clipped.wav";
  const CliResult r =
      run_cli("clip " + in.string() + " " + out.string() + " --isnr-db 10");
  CHECK(r.exit_code == 0);

  declip::WavAudio original = declip::read_wav(in.string());
  declip::WavAudio clipped = declip::read_wav(out.string());
  const double achieved =
      declip::isnr(original.channels[0], clipped.channels[0]);
  CHECK(achieved > 9.9);
  CHECK(achieved < 10.1);
}

TEST_CASE("clip rejects conflicting or missing saturation options") {
  const fs::path in = write_tone_wav("tone4.wav", declip::WavFormat::pcm16);
  const fs::path out = work_dir() / "unused.wav";
  CHECK(run_cli("clip " + in.string() + " " + out.string()).exit_code == 2);
  CHECK(run_cli("clip " + in.string() + " " + out.string() +
                " --tau 0.5 --isnr-db 10")
            .exit_code == 2);
}

TEST_CASE("declip restores a clipped tone and writes the report") {
  const fs::path ref = write_tone_wav("dc_ref.wav", declip::WavFormat::float32,
                                      0.9, 3000);
  const fs::path clipped = work_dir() / "dc_clipped.wav";
  const fs::path restored = work_dir() / "dc_restored.wav";
  const fs::path report = work_dir() / "dc_report.json";

  declip::WavAudio audio = declip::read_wav(ref.string());
  const double tau =
      declip::tau_for_isnr(audio.channels[0], 10.0, 0.05);
  {
    declip::TimeSignal sig{audio.channels[0], audio.sample_rate};
    audio.channels[0] = declip::clip(sig, tau).samples();
    declip::write_wav(clipped.string(), audio);
  }

  char tau_str[32];
  std::snprintf(tau_str, sizeof tau_str, "%.17g", tau);
  const CliResult r = run_cli("declip " + clipped.string() + " " +
                              restored.string() + " --tau " + tau_str +
                              " --frame 256 --report " + report.string() +
                              " --reference " + ref.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("gain=") != std::string::npos);

  const auto report_bytes = slurp(report);
  json rep = json::parse(report_bytes.begin(), report_bytes.end());
  CHECK(rep["schema_version"] == 1);
  CHECK(rep["gain_db"].get<double>() > 0.0);
  CHECK(rep["channels"].size() == 1);
  CHECK(rep["channels"][0]["frames"].size() > 0);
  for (const auto& f : rep["channels"][0]["frames"]) {
    CHECK(f.contains("index"));
    CHECK(f.contains("offset"));
    CHECK(f.contains("k_used"));
    CHECK(f.contains("iterations"));
    CHECK(f.contains("final_cost"));
    CHECK(f.contains("stop_reason"));
  }
}

TEST_CASE("declip of an unclipped file is near-identity") {
  const fs::path in = write_tone_wav("dc_id.wav", declip::WavFormat::pcm16,
                                     0.4, 2000);
  const fs::path out = work_dir() / "dc_id_out.wav";
  const CliResult r = run_cli("declip " + in.string() + " " + out.string() +
                              " --tau 0.9 --frame 256");
  CHECK(r.exit_code == 0);
  declip::WavAudio a = declip::read_wav(in.string());
  declip::WavAudio b = declip::read_wav(out.string());
  for (int i = 0; i < a.num_frames(); ++i)
    CHECK(std::abs(a.channels[0][i] - b.channels[0][i]) < 1e-4);
}

TEST_CASE("bench produces identical CSV across runs and thread counts") {
  const fs::path cfg = work_dir() / "bench.cfg";
  {
    std::ofstream os(cfg);
    os << "[bench]\nn = 64\nk_values = 4, 12\nisnr_db = 10\ntrials = 4\n"
          "seed = 1234\n";
  }
  const fs::path out1 = work_dir() / "bench1.csv";
  const fs::path out2 = work_dir() / "bench2.csv";

  CHECK(run_cli("bench --config " + cfg.string() + " --out " + out1.string())
            .exit_code == 0);
  CHECK(run_cli("--threads 4 bench --config " + cfg.string() + " --out " +
                out2.string())
            .exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));

  // DECLIP_THREADS is the fallback for --threads and cannot change results
  const fs::path out3 = work_dir() / "bench3.csv";
  {
    const std::string cmd = "DECLIP_THREADS=3 " + cli_path() + " bench --config " +
                            cfg.string() + " --out " + out3.string() +
                            " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
  }
  CHECK(slurp(out1) == slurp(out3));
  CHECK(fs::exists(work_dir() / "bench1_baseline.csv"));
  CHECK(fs::exists(out1.string() + ".manifest.json"));

  const auto bytes = slurp(out1);
  const std::string text(bytes.begin(), bytes.end());
  CHECK(text.rfind("k,target_isnr_db,achieved_isnr_db,success_prob,"
                   "mean_iters,mean_runtime_s\n", 0) == 0);
}

TEST_CASE("bench rejects unknown config keys") {
  const fs::path cfg = work_dir() / "bench_bad.cfg";
  {
    std::ofstream os(cfg);
    os << "[bench]\nn = 64\nnot_a_key = 3\n";
  }
  const CliResult r = run_cli("bench --config " + cfg.string() + " --out " +
                              (work_dir() / "x.csv").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("not_a_key") != std::string::npos);
}

TEST_CASE("metrics prints inf for identical files and 0 dB for silence") {
  const fs::path a = write_tone_wav("m_a.wav", declip::WavFormat::pcm16);
  const fs::path silence = work_dir() / "m_silence.wav";
  {
    declip::WavAudio s = declip::read_wav(a.string());
    for (double& v : s.channels[0]) v = 0.0;
    declip::write_wav(silence.string(), s);
  }

  CliResult same = run_cli("metrics " + a.string() + " " + a.string());
  CHECK(same.exit_code == 0);
  CHECK(same.output.find("inf") != std::string::npos);

  CliResult zero = run_cli("metrics " + a.string() + " " + silence.string());
  CHECK(zero.exit_code == 0);
  CHECK(zero.output.find("overall: 0.0000 dB") != std::string::npos);
}

TEST_CASE("metrics agrees with the library SNR on a known pair") {
  const fs::path a = write_tone_wav("m_x.wav", declip::WavFormat::float32);
  const fs::path b = work_dir() / "m_y.wav";
  {
    declip::WavAudio y = declip::read_wav(a.string());
    for (std::size_t i = 0; i < y.channels[0].size(); ++i)
      y.channels[0][i] = static_cast<double>(
          static_cast<float>(y.channels[0][i] + 1e-3 * std::sin(0.7 * i)));
    declip::write_wav(b.string(), y);
  }
  const declip::WavAudio xa = declip::read_wav(a.string());
  const declip::WavAudio yb = declip::read_wav(b.string());
  const double expected = declip::snr_db(xa.channels[0], yb.channels[0]);
  char line[64];
  std::snprintf(line, sizeof line, "overall: %.4f dB", expected);

  const CliResult r = run_cli("metrics " + a.string() + " " + b.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find(line) != std::string::npos);
}

TEST_CASE("stereo channels are processed independently") {
  declip::WavAudio stereo;
  stereo.sample_rate = 16000;
  stereo.format = declip::WavFormat::pcm16;
  stereo.channels.resize(2);
  for (int i = 0; i < 2000; ++i) {
    stereo.channels[0].push_back(0.9 * std::sin(0.113 * i));
    stereo.channels[1].push_back(0.3 * std::sin(0.029 * i));  // never clips
  }
  const fs::path in = work_dir() / "stereo.wav";
  const fs::path out = work_dir() / "stereo_clipped.wav";
  declip::write_wav(in.string(), stereo);

  const CliResult r =
      run_cli("clip " + in.string() + " " + out.string() + " --tau 0.5");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("channel 0:") != std::string::npos);
  CHECK(r.output.find("channel 1:") != std::string::npos);

  declip::WavAudio clipped = declip::read_wav(out.string());
  for (double v : clipped.channels[0]) CHECK(std::abs(v) <= 0.5);
  // the quiet channel is untouched
  for (std::size_t i = 0; i < stereo.channels[1].size(); ++i)
    CHECK(clipped.channels[1][i] ==
          doctest::Approx(stereo.channels[1][i]).epsilon(1e-4));
}

TEST_CASE("exit codes distinguish usage, I/O and numerical failures") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("clip").exit_code == 2);
  CHECK(run_cli("metrics missing_a.wav missing_b.wav").exit_code == 3);

  const fs::path in = write_tone_wav("ec.wav", declip::WavFormat::pcm16);
  const fs::path out = work_dir() / "ec_out.wav";
  // a negative iSNR target is unachievable
  CHECK(run_cli("clip " + in.string() + " " + out.string() + " --isnr-db -5")
            .exit_code == 4);
}

#pragma once
// Minimal RIFF/WAVE reader and writer: 16-bit integer PCM and 32-bit IEEE
// float, little-endian, any channel count. Samples are exposed normalized to
// [-1, 1] (integer data divided by 32768).

#include <stdexcept>
#include <string>
#include <vector>

namespace declip {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class WavFormat { pcm16, float32 };

struct WavAudio {
  int sample_rate = 16000;
  WavFormat format = WavFormat::pcm16;
  std::vector<std::vector<double>> channels;

  int num_channels() const { return static_cast<int>(channels.size()); }
  int num_frames() const {
    return channels.empty() ? 0 : static_cast<int>(channels[0].size());
  }
};

WavAudio read_wav(const std::string& path);
void write_wav(const std::string& path, const WavAudio& audio);

}  // namespace declip

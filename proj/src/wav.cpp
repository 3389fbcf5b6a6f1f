#include "declip/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace declip {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::string& s, std::uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void wr_u16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

float bits_to_float(std::uint32_t b) {
  float f;
  std::memcpy(&f, &b, sizeof f);
  return f;
}

std::uint32_t float_to_bits(float f) {
  std::uint32_t b;
  std::memcpy(&b, &f, sizeof b);
  return b;
}

}  // namespace

WavAudio read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw IoError(path + ": not a RIFF/WAVE file");

  std::uint16_t audio_format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  const unsigned char* pcm = nullptr;
  std::uint32_t pcm_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const char* id = reinterpret_cast<const char*>(data.data() + pos);
    const std::uint32_t sz = rd_u32(data.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + sz > data.size()) throw IoError(path + ": truncated chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (sz < 16) throw IoError(path + ": bad fmt chunk");
      audio_format = rd_u16(data.data() + body);
      channels = rd_u16(data.data() + body + 2);
      sample_rate = rd_u32(data.data() + body + 4);
      bits = rd_u16(data.data() + body + 14);
    } else if (std::memcmp(id, "data", 4) == 0) {
      pcm = data.data() + body;
      pcm_len = sz;
    }
    pos = body + sz + (sz & 1);  // chunks are word-aligned
  }

  if (!pcm || channels == 0 || sample_rate == 0)
    throw IoError(path + ": missing fmt or data chunk");

  WavAudio audio;
  audio.sample_rate = static_cast<int>(sample_rate);
  audio.channels.resize(channels);

  if (audio_format == 1 && bits == 16) {
    audio.format = WavFormat::pcm16;
    const std::uint32_t frames = pcm_len / (2u * channels);
    for (auto& ch : audio.channels) ch.resize(frames);
    for (std::uint32_t f = 0; f < frames; ++f)
      for (std::uint16_t c = 0; c < channels; ++c) {
        const std::int16_t v = static_cast<std::int16_t>(
            rd_u16(pcm + 2 * (static_cast<std::size_t>(f) * channels + c)));
        audio.channels[c][f] = v / 32768.0;
      }
  } else if (audio_format == 3 && bits == 32) {
    audio.format = WavFormat::float32;
    const std::uint32_t frames = pcm_len / (4u * channels);
    for (auto& ch : audio.channels) ch.resize(frames);
    for (std::uint32_t f = 0; f < frames; ++f)
      for (std::uint16_t c = 0; c < channels; ++c) {
        const std::uint32_t b =
            rd_u32(pcm + 4 * (static_cast<std::size_t>(f) * channels + c));
        audio.channels[c][f] = static_cast<double>(bits_to_float(b));
      }
  } else {
    throw IoError(path + ": unsupported format (need PCM16 or float32)");
  }
  return audio;
}

void write_wav(const std::string& path, const WavAudio& audio) {
  const int channels = audio.num_channels();
  if (channels == 0) throw IoError("write_wav: no channels");
  const int frames = audio.num_frames();
  for (const auto& ch : audio.channels)
    if (static_cast<int>(ch.size()) != frames)
      throw IoError("write_wav: channel length mismatch");

  const bool pcm = audio.format == WavFormat::pcm16;
  const int bytes_per_sample = pcm ? 2 : 4;
  const std::uint32_t data_len =
      static_cast<std::uint32_t>(frames) * channels * bytes_per_sample;

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  wr_u32(out, 36 + data_len);
  out += "WAVE";
  out += "fmt ";
  wr_u32(out, 16);
  wr_u16(out, pcm ? 1 : 3);
  wr_u16(out, static_cast<std::uint16_t>(channels));
  wr_u32(out, static_cast<std::uint32_t>(audio.sample_rate));
  const std::uint32_t byte_rate =
      static_cast<std::uint32_t>(audio.sample_rate) * channels * bytes_per_sample;
  wr_u32(out, byte_rate);
  wr_u16(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  wr_u16(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  out += "data";
  wr_u32(out, data_len);

  for (int f = 0; f < frames; ++f)
    for (int c = 0; c < channels; ++c) {
      const double v = audio.channels[c][f];
      if (pcm) {
        const long q = std::lrint(v * 32768.0);
        const std::int16_t s = static_cast<std::int16_t>(
            std::clamp(q, -32768L, 32767L));
        wr_u16(out, static_cast<std::uint16_t>(s));
      } else {
        wr_u32(out, float_to_bits(static_cast<float>(v)));
      }
    }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace declip

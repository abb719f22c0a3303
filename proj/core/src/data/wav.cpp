#include "talkgen/data/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "talkgen/common.hpp"

namespace talkgen::data {

namespace {

template <typename T>
void wr(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T rd(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  TG_CHECK(static_cast<bool>(is), "wav: truncated file");
  return v;
}

}  // namespace

std::vector<float> read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  TG_CHECK(is.good(), "read_wav: cannot open ", path);
  char tag[4];
  is.read(tag, 4);
  TG_CHECK(is.good() && std::memcmp(tag, "RIFF", 4) == 0, "read_wav: not RIFF: ", path);
  rd<uint32_t>(is);  // riff size
  is.read(tag, 4);
  TG_CHECK(is.good() && std::memcmp(tag, "WAVE", 4) == 0, "read_wav: not WAVE: ", path);

  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  std::vector<float> samples;
  bool got_fmt = false, got_data = false;
  while (is.read(tag, 4)) {
    const uint32_t size = rd<uint32_t>(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      const uint16_t format = rd<uint16_t>(is);
      channels = rd<uint16_t>(is);
      rate = rd<uint32_t>(is);
      rd<uint32_t>(is);  // byte rate
      rd<uint16_t>(is);  // block align
      bits = rd<uint16_t>(is);
      if (size > 16) is.seekg(size - 16, std::ios::cur);
      TG_CHECK(format == 1, "read_wav: only PCM supported: ", path);
      got_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      TG_CHECK(got_fmt, "read_wav: data chunk before fmt: ", path);
      TG_CHECK(channels == 1, "read_wav: expected mono, got ", channels, " channels");
      TG_CHECK(rate == kSampleRate, "read_wav: expected ", kSampleRate, " Hz, got ", rate);
      TG_CHECK(bits == 16, "read_wav: expected 16-bit PCM, got ", bits);
      const size_t n = size / 2;
      samples.resize(n);
      for (size_t i = 0; i < n; ++i)
        samples[i] = static_cast<float>(rd<int16_t>(is)) / 32768.0f;
      got_data = true;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
    }
  }
  TG_CHECK(got_data, "read_wav: no data chunk in ", path);
  return samples;
}

void write_wav(const std::string& path, const std::vector<float>& samples) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  TG_CHECK(os.good(), "write_wav: cannot open ", path);
  const uint32_t data_size = static_cast<uint32_t>(samples.size() * 2);
  os.write("RIFF", 4);
  wr<uint32_t>(os, 36 + data_size);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  wr<uint32_t>(os, 16);
  wr<uint16_t>(os, 1);  // PCM
  wr<uint16_t>(os, 1);  // mono
  wr<uint32_t>(os, kSampleRate);
  wr<uint32_t>(os, kSampleRate * 2);
  wr<uint16_t>(os, 2);
  wr<uint16_t>(os, 16);
  os.write("data", 4);
  wr<uint32_t>(os, data_size);
  for (float s : samples) {
    const long q = std::lround(std::clamp(s, -1.0f, 1.0f) * 32767.0f);
    wr<int16_t>(os, static_cast<int16_t>(q));
  }
  TG_CHECK(os.good(), "write_wav: write failed ", path);
}

}  // namespace talkgen::data

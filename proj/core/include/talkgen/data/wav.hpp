#pragma once

#include <string>
#include <vector>

namespace talkgen::data {

inline constexpr int kSampleRate = 16000;

// 16 kHz mono PCM16 WAV; samples normalized to [-1,1].
std::vector<float> read_wav(const std::string& path);
void write_wav(const std::string& path, const std::vector<float>& samples);

}  // namespace talkgen::data

#pragma once

#include <filesystem>

#include "aedkit/types.hpp"

namespace aed {

// 16-bit PCM RIFF/WAVE reader. Mono or stereo; stereo is downmixed by
// averaging the channels. Samples map to doubles as value / 32768, so
// 16384 reads as exactly 0.5. Anything else raises FormatError naming the
// offending chunk.
AudioClip load_wav(const std::filesystem::path& path);

// Mono 16-bit PCM writer; samples are rounded and clamped to [-32768, 32767].
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace aed

#include "aedkit/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "aedkit/errors.hpp"

namespace aed {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 24) & 0xff);
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

}  // namespace

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("wav: cannot open '" + path.string() + "'");
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw FormatError("wav: '" + path.string() + "' has no RIFF/WAVE header");

  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_values = 0;

  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    char id[5] = {0};
    std::memcpy(id, data.data() + pos, 4);
    const std::uint32_t size = read_u32(data.data() + pos + 4);
    pos += 8;
    if (pos + size > data.size())
      throw FormatError(std::string("wav: truncated '") + id + "' chunk");
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("wav: 'fmt ' chunk too small");
      format = read_u16(data.data() + pos);
      channels = read_u16(data.data() + pos + 2);
      sample_rate = read_u32(data.data() + pos + 4);
      bits = read_u16(data.data() + pos + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("wav: 'data' chunk precedes 'fmt '");
      pcm = data.data() + pos;
      pcm_values = size / 2;
    }
    pos += size + (size & 1);  // chunks are word-aligned
  }

  if (!have_fmt) throw FormatError("wav: missing 'fmt ' chunk");
  if (format != 1)
    throw FormatError("wav: 'fmt ' chunk declares a non-PCM codec");
  if (bits != 16)
    throw FormatError("wav: 'fmt ' chunk declares " + std::to_string(bits) +
                      "-bit samples; only 16-bit is supported");
  if (channels != 1 && channels != 2)
    throw FormatError("wav: 'fmt ' chunk declares " + std::to_string(channels) +
                      " channels; only mono/stereo are supported");
  if (!pcm) throw FormatError("wav: missing 'data' chunk");

  AudioClip clip;
  clip.sample_rate = sample_rate;
  const std::size_t n_frames = pcm_values / channels;
  clip.samples.resize(n_frames);
  auto sample_at = [pcm](std::size_t i) {
    std::int16_t v;
    std::memcpy(&v, pcm + 2 * i, 2);
    return v / 32768.0;
  };
  for (std::size_t i = 0; i < n_frames; ++i) {
    clip.samples[i] = channels == 1
                          ? sample_at(i)
                          : (sample_at(2 * i) + sample_at(2 * i + 1)) / 2.0;
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_bytes = n * 2;
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);

  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);   // block align
  put_u16(out, 16);  // bits
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (double s : clip.samples) {
    const auto q = static_cast<std::int16_t>(
        std::clamp(std::lround(s * 32768.0), -32768L, 32767L));
    put_u16(out, static_cast<std::uint16_t>(q));
  }

  std::ofstream f(path, std::ios::binary);
  if (!f) throw FormatError("wav: cannot write '" + path.string() + "'");
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

}  // namespace aed

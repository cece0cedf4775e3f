#include "absement/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "absement/error.hpp"
#include "absement/feature_io.hpp"

namespace absement {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xFF));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

std::int16_t quantize(double x) {
  const double q = std::nearbyint(x * 32768.0);
  return static_cast<std::int16_t>(std::clamp(q, -32768.0, 32767.0));
}

}  // namespace

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFoundError("cannot open audio file: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  const std::string where = " in " + path.string();

  if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 ||
      std::memcmp(data + 8, "WAVE", 4) != 0) {
    throw MalformedFileError("not a RIFF/WAVE file" + where);
  }

  std::optional<FmtChunk> fmt;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* id = data + pos;
    const std::uint32_t len = read_u32(data + pos + 4);
    const std::size_t body = pos + 8;
    if (len > size - body) {
      throw MalformedFileError("chunk extends past end of file" + where);
    }
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (len < 16) throw MalformedFileError("fmt chunk too short" + where);
      FmtChunk f;
      f.format = read_u16(data + body);
      f.channels = read_u16(data + body + 2);
      f.sample_rate = read_u32(data + body + 4);
      f.block_align = read_u16(data + body + 12);
      f.bits = read_u16(data + body + 14);
      if (f.format == kFormatExtensible) {
        // cbSize(2) validBits(2) channelMask(4) then the GUID whose first two
        // bytes carry the real format tag.
        if (len < 40) throw MalformedFileError("extensible fmt chunk too short" + where);
        f.format = read_u16(data + body + 24);
      }
      fmt = f;
    } else if (std::memcmp(id, "data", 4) == 0) {
      pcm = data + body;
      pcm_bytes = len;
    }
    pos = body + len + (len & 1);
  }

  if (!fmt) throw MalformedFileError("missing fmt chunk" + where);
  if (pcm == nullptr) throw MalformedFileError("missing data chunk" + where);
  if (fmt->format != kFormatPcm) {
    throw UnsupportedFormatError("unsupported WAV encoding (format tag " +
                                 std::to_string(fmt->format) + ")" + where);
  }
  if (fmt->bits != 16) {
    throw UnsupportedFormatError("only 16-bit PCM is supported, got " +
                                 std::to_string(fmt->bits) + "-bit" + where);
  }
  if (fmt->channels == 0 || fmt->sample_rate == 0 ||
      fmt->block_align != 2 * fmt->channels) {
    throw MalformedFileError("inconsistent fmt chunk" + where);
  }

  const std::size_t channels = fmt->channels;
  const std::size_t n = pcm_bytes / fmt->block_align;
  Waveform w;
  w.sample_rate = static_cast<int>(fmt->sample_rate);
  w.samples.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    std::int32_t sum = 0;
    for (std::size_t c = 0; c < channels; ++c) {
      sum += static_cast<std::int16_t>(read_u16(pcm + 2 * (t * channels + c)));
    }
    w.samples[t] = static_cast<double>(sum) / (32768.0 * static_cast<double>(channels));
  }
  return w;
}

void write_wav(const std::filesystem::path& path,
               const std::vector<std::vector<double>>& channels,
               int sample_rate) {
  if (channels.empty() || sample_rate <= 0) {
    throw InvalidArgumentError("write_wav needs at least one channel and a positive rate");
  }
  const std::size_t n = channels.front().size();
  for (const auto& ch : channels) {
    if (ch.size() != n) throw InvalidArgumentError("write_wav: channel lengths differ");
  }
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * nch * 2);

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, nch);
  put_u32(out, static_cast<std::uint32_t>(sample_rate));
  put_u32(out, static_cast<std::uint32_t>(sample_rate) * nch * 2);
  put_u16(out, static_cast<std::uint16_t>(nch * 2));
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_bytes);
  for (std::size_t t = 0; t < n; ++t) {
    for (const auto& ch : channels) {
      put_u16(out, static_cast<std::uint16_t>(quantize(ch[t])));
    }
  }
  write_file_atomic(path, out);
}

void write_wav(const std::filesystem::path& path, const Waveform& wave) {
  write_wav(path, std::vector<std::vector<double>>{wave.samples}, wave.sample_rate);
}

}  // namespace absement

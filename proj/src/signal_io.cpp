#include "dlaw/signal_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include "dlaw/error.hpp"

namespace dlaw {

NoiseGenerator::NoiseGenerator(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ULL) {
  next();
}

std::uint64_t NoiseGenerator::next() {
  state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
  return state_;
}

double NoiseGenerator::uniform01() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double NoiseGenerator::uniform_pm1() { return 2.0 * uniform01() - 1.0; }

namespace {

double entry_or(const std::vector<double>& v, std::size_t i, double fallback) {
  return i < v.size() ? v[i] : fallback;
}

void check_frequencies(const SynthSpec& spec) {
  if (spec.frequencies.empty())
    throw Error(ErrorCode::InvalidArgument, "tone synthesis needs at least one frequency");
  for (double f : spec.frequencies)
    if (!(f < 0.5 * spec.sample_rate) || f < 0.0)
      throw Error(ErrorCode::AliasedFrequency,
                  "frequency " + std::to_string(f) + " Hz is not below Nyquist (" +
                      std::to_string(0.5 * spec.sample_rate) + " Hz)");
}

}  // namespace

TimeSeries synthesize(const SynthSpec& spec) {
  if (spec.length < 1) throw Error(ErrorCode::InvalidArgument, "length must be >= 1");
  if (!(spec.sample_rate > 0.0))
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");

  const double two_pi = 2.0 * std::numbers::pi;
  const double dt = 1.0 / spec.sample_rate;
  std::vector<double> y(spec.length, 0.0);

  switch (spec.kind) {
    case SynthKind::Sine:
    case SynthKind::MultiSine: {
      check_frequencies(spec);
      const std::size_t tones = spec.kind == SynthKind::Sine ? 1 : spec.frequencies.size();
      for (std::size_t k = 0; k < spec.length; ++k) {
        const double t = static_cast<double>(k) * dt;
        double s = 0.0;
        for (std::size_t j = 0; j < tones; ++j)
          s += entry_or(spec.amplitudes, j, 1.0) *
               std::sin(two_pi * spec.frequencies[j] * t + entry_or(spec.phases, j, 0.0));
        y[k] = s;
      }
      break;
    }
    case SynthKind::DampedSine: {
      check_frequencies(spec);
      const double a = entry_or(spec.amplitudes, 0, 1.0);
      const double phase = entry_or(spec.phases, 0, 0.0);
      for (std::size_t k = 0; k < spec.length; ++k) {
        const double t = static_cast<double>(k) * dt;
        y[k] = a * std::exp(-spec.decay * t) * std::sin(two_pi * spec.frequencies[0] * t + phase);
      }
      break;
    }
    case SynthKind::PolyExp: {
      if (spec.degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be >= 0");
      const double a = entry_or(spec.amplitudes, 0, 1.0);
      for (std::size_t k = 0; k < spec.length; ++k) {
        const double t = static_cast<double>(k) * dt;
        y[k] = a * std::pow(t, spec.degree) * std::exp(-spec.decay * t);
      }
      break;
    }
    case SynthKind::UniformNoise: {
      NoiseGenerator gen(spec.seed);
      const double a = entry_or(spec.amplitudes, 0, 1.0);
      for (auto& v : y) v = a * gen.uniform_pm1();
      break;
    }
    case SynthKind::Constant:
      std::fill(y.begin(), y.end(), spec.value);
      break;
  }

  if (spec.noise_amplitude != 0.0) {
    // Distinct stream from the UniformNoise kind so the two can be combined.
    NoiseGenerator gen(spec.seed + 0x5851F42D4C957F2DULL);
    for (auto& v : y) v += spec.noise_amplitude * gen.uniform_pm1();
  }
  return TimeSeries(std::move(y), spec.sample_rate);
}

namespace {

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) |
         (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::equal(tag, tag + 4, b.begin() + static_cast<std::ptrdiff_t>(at));
}

}  // namespace

TimeSeries read_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE"))
    throw Error(ErrorCode::MalformedHeader, "not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body)
      throw Error(ErrorCode::MalformedHeader, "chunk extends past end of file");

    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16) throw Error(ErrorCode::MalformedHeader, "fmt chunk too short");
      const std::uint16_t format = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      block_align = read_u16(bytes, body + 12);
      bits = read_u16(bytes, body + 14);
      if (format != 1)
        throw Error(ErrorCode::UnsupportedFormat,
                    "audio format " + std::to_string(format) + " (only PCM is supported)");
      if (bits != 16)
        throw Error(ErrorCode::UnsupportedFormat,
                    std::to_string(bits) + "-bit samples (only 16-bit is supported)");
      if (channels != 1 && channels != 2)
        throw Error(ErrorCode::UnsupportedFormat,
                    std::to_string(channels) + " channels (mono or stereo only)");
      if (block_align != 2 * channels)
        throw Error(ErrorCode::MalformedHeader, "block align inconsistent with channels");
      if (rate == 0) throw Error(ErrorCode::MalformedHeader, "sample rate is zero");
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      if (!have_fmt) throw Error(ErrorCode::MalformedHeader, "data chunk before fmt chunk");
      const std::size_t frames = size / block_align;
      if (frames == 0) throw Error(ErrorCode::MalformedHeader, "data chunk holds no frames");
      std::vector<double> samples(frames);
      for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t at = body + f * block_align;
        double acc = 0.0;
        for (std::size_t c = 0; c < channels; ++c)
          acc += static_cast<std::int16_t>(read_u16(bytes, at + 2 * c));
        samples[f] = acc / static_cast<double>(channels) / 32768.0;
      }
      return TimeSeries(std::move(samples), static_cast<double>(rate));
    }
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorCode::MalformedHeader, have_fmt ? "missing data chunk" : "missing fmt chunk");
}

std::vector<std::uint8_t> write_wav(std::span<const double> samples, std::uint32_t sample_rate) {
  const auto data_bytes = static_cast<std::uint32_t>(2 * samples.size());
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, sample_rate);
  put_u32(out, sample_rate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double v : samples) {
    const double clamped = std::clamp(v, -1.0, 1.0);
    const long q = std::lround(clamped * 32768.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(q, -32768L, 32767L))));
  }
  return out;
}

std::vector<std::uint8_t> write_wav(const TimeSeries& series) {
  return write_wav(series.samples(), static_cast<std::uint32_t>(std::lround(series.sample_rate())));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace dlaw

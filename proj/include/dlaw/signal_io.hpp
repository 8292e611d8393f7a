#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dlaw/embedding.hpp"

namespace dlaw {

/// 64-bit linear congruential generator (Knuth's MMIX constants,
/// x <- 6364136223846793005 x + 1442695040888963407 mod 2^64). Uniform
/// variates use the top 53 bits so sequences are identical on every platform.
class NoiseGenerator {
 public:
  explicit NoiseGenerator(std::uint64_t seed);

  std::uint64_t next();
  double uniform01();    // [0, 1)
  double uniform_pm1();  // [-1, 1)

 private:
  std::uint64_t state_;
};

enum class SynthKind { Sine, MultiSine, DampedSine, PolyExp, UniformNoise, Constant };

struct SynthSpec {
  SynthKind kind = SynthKind::Sine;
  std::vector<double> amplitudes{1.0};
  std::vector<double> frequencies{};  // Hz
  std::vector<double> phases{};       // rad; missing entries are 0
  double decay = 0.0;                 // 1/s, damped_sine and poly_exp
  int degree = 0;                     // poly_exp: A t^degree e^{-decay t}
  double value = 0.0;                 // constant
  std::uint64_t seed = 0;             // uniform_noise and additive noise
  double noise_amplitude = 0.0;       // optional additive uniform noise
  std::size_t length = 0;
  double sample_rate = 8000.0;
};

TimeSeries synthesize(const SynthSpec& spec);

/// 16-bit PCM mono or stereo (averaged to mono), scaled by 1/32768.
TimeSeries read_wav(std::span<const std::uint8_t> bytes);

/// 16-bit PCM mono; values outside [-1, 1] are clamped.
std::vector<std::uint8_t> write_wav(std::span<const double> samples, std::uint32_t sample_rate);
std::vector<std::uint8_t> write_wav(const TimeSeries& series);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace dlaw

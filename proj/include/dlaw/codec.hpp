#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dlaw/embedding.hpp"
#include "dlaw/spectral.hpp"

namespace dlaw {

enum class FitMode : std::uint8_t { Amplitudes = 0, InitialConditions = 1 };

struct CodecParams {
  std::size_t order_n = 8;
  std::size_t stride = 1;
  std::size_t block_size = 1024;
  FitMode fit_mode = FitMode::Amplitudes;
  bool symmetric = false;
  std::size_t eigen_index = 0;

  /// R = block_size / (2 n).
  double compression_rate() const;
  /// Stored weights per block: n+1, or ceil((n+1)/2) for symmetric laws.
  std::size_t stored_weight_count() const;
  void validate() const;
};

struct BlockRecord {
  std::vector<float> weights;
  std::vector<float> payload;  // n values; unused trailing entries are zero
  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

struct CompressionArtifact {
  std::uint32_t sample_rate = 0;
  CodecParams params;
  std::vector<BlockRecord> blocks;
  std::vector<float> tail;

  std::size_t decompressed_length() const;
  /// Throws InvariantViolation describing the first broken invariant.
  void validate() const;
};

bool operator==(const CodecParams& a, const CodecParams& b);
bool operator==(const CompressionArtifact& a, const CompressionArtifact& b);

/// Result of running the law pipeline on one block.
struct BlockAnalysis {
  LinearLaw law;
  std::vector<double> payload;         // length n
  std::vector<double> reconstruction;  // length block_size
  double trace = 0.0;                  // trace of the block's correlation matrix
};

/// embed -> correlation -> law -> fit -> reconstruct. With `quantize`, the
/// weights and payload are rounded to f32 exactly as they are stored.
BlockAnalysis analyze_block(std::span<const double> block, const CodecParams& params,
                            double sample_rate, bool quantize);

/// Rebuilds the unit-norm law stored in a block record.
LinearLaw decode_law(const BlockRecord& record, const CodecParams& params);

std::vector<double> decode_block(const BlockRecord& record, const CodecParams& params);

CompressionArtifact compress(const TimeSeries& series, const CodecParams& params);
TimeSeries decompress(const CompressionArtifact& artifact);

inline constexpr std::size_t kHeaderSize = 32;
inline constexpr std::uint16_t kFormatVersion = 1;

std::vector<std::uint8_t> serialize(const CompressionArtifact& artifact);
CompressionArtifact deserialize(std::span<const std::uint8_t> bytes);

struct SweepRow {
  std::size_t n = 0;
  std::size_t stride = 0;
  double rate = 0.0;        // R
  double accuracy = 0.0;    // A
  double lambda_min = 0.0;  // mean over blocks of the law eigenvalue
  bool ok = true;
  std::string reason;       // why the point is missing when !ok
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::string signal_id;
  std::uint64_t seed = 0;

  /// Header `n,stride,R,A,lambda_min`; missing points are omitted.
  std::string to_csv() const;
  std::string to_json() const;
  const SweepRow* best_at_rate(double min_rate) const;
};

struct SweepOptions {
  FitMode fit_mode = FitMode::Amplitudes;
  bool symmetric = false;
};

/// Accuracy over all full blocks, for every (n, stride) grid point. A is the
/// Euclidean accuracy of the concatenated blocks (energy-weighted).
SweepReport sweep(const TimeSeries& series, std::span<const std::size_t> n_grid,
                  std::span<const std::size_t> stride_grid, std::size_t block_size,
                  const SweepOptions& options = {});

/// Least-squares slope of log A against log R over ok rows with
/// min_rate <= R <= max_rate and A > 0. NaN with fewer than two points.
double log_log_slope(const SweepReport& report, double min_rate, double max_rate);

struct BaselineResult {
  SweepReport report;
  double slope = 0.0;
};

/// Uniform [-1, 1) noise from the seeded generator, swept over n_grid at
/// stride 1; slope fitted over R >= 2.
BaselineResult random_baseline(std::size_t length, std::uint64_t seed,
                               std::span<const std::size_t> n_grid, std::size_t block_size,
                               FitMode fit_mode = FitMode::Amplitudes);

}  // namespace dlaw

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dlaw/matrix.hpp"

namespace dlaw {

/// Uniformly sampled, finite, non-empty real signal.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double sample_rate);

  const std::vector<double>& samples() const noexcept { return samples_; }
  double sample_rate() const noexcept { return sample_rate_; }
  std::size_t size() const noexcept { return samples_.size(); }

 private:
  std::vector<double> samples_;
  double sample_rate_;
};

/// Window geometry for the delay embedding. Window length is order_n + 1;
/// lag i corresponds to i * stride samples into the past.
struct EmbeddingConfig {
  std::size_t order_n = 1;
  std::size_t stride = 1;
  std::vector<std::uint8_t> mask;  // n+1 entries, each 0 or 1
  std::size_t start_offset = 0;

  /// All lags active.
  static EmbeddingConfig dense(std::size_t order_n, std::size_t stride = 1);

  std::size_t width() const noexcept { return order_n + 1; }
  bool active(std::size_t lag) const { return mask[lag] != 0; }
  std::vector<std::size_t> active_lags() const;

  /// Throws InvalidArgument / InvalidMask when the invariants are broken.
  void validate() const;
};

/// Number of windows that fit, or 0 if not even one does.
std::size_t window_count(std::size_t length, const EmbeddingConfig& config);

struct EmbeddedDataset {
  Matrix rows;  // K x (n+1); column 0 is the most recent sample
  EmbeddingConfig config;

  std::size_t sample_count() const noexcept { return rows.rows(); }
};

EmbeddedDataset embed(std::span<const double> samples, const EmbeddingConfig& config);
EmbeddedDataset embed(const TimeSeries& series, const EmbeddingConfig& config);

}  // namespace dlaw

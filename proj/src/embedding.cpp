#include "dlaw/embedding.hpp"

#include <cmath>
#include <string>

#include "dlaw/error.hpp"

namespace dlaw {

TimeSeries::TimeSeries(std::vector<double> samples, double sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (samples_.empty()) throw Error(ErrorCode::InvalidArgument, "time series is empty");
  if (!(sample_rate_ > 0.0) || !std::isfinite(sample_rate_))
    throw Error(ErrorCode::InvalidArgument, "sample rate must be positive");
  for (std::size_t i = 0; i < samples_.size(); ++i)
    if (!std::isfinite(samples_[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "non-finite sample at index " + std::to_string(i));
}

EmbeddingConfig EmbeddingConfig::dense(std::size_t order_n, std::size_t stride) {
  EmbeddingConfig c;
  c.order_n = order_n;
  c.stride = stride;
  c.mask.assign(order_n + 1, 1);
  return c;
}

std::vector<std::size_t> EmbeddingConfig::active_lags() const {
  std::vector<std::size_t> lags;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) lags.push_back(i);
  return lags;
}

void EmbeddingConfig::validate() const {
  if (order_n < 1) throw Error(ErrorCode::InvalidArgument, "order n must be >= 1");
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (mask.size() != order_n + 1)
    throw Error(ErrorCode::InvalidMask, "mask length " + std::to_string(mask.size()) +
                                            " != n+1 = " + std::to_string(order_n + 1));
  std::size_t on = 0;
  for (auto bit : mask) {
    if (bit > 1) throw Error(ErrorCode::InvalidMask, "mask entries must be 0 or 1");
    on += bit;
  }
  if (mask[0] == 0) throw Error(ErrorCode::InvalidMask, "mask[0] must be 1");
  if (on < 2) throw Error(ErrorCode::InvalidMask, "at least two lags must be active");
}

std::size_t window_count(std::size_t length, const EmbeddingConfig& config) {
  const std::size_t span = config.stride * config.order_n;
  if (length < config.start_offset + span + 1) return 0;
  return (length - 1 - config.start_offset - span) / config.stride + 1;
}

EmbeddedDataset embed(std::span<const double> samples, const EmbeddingConfig& config) {
  config.validate();
  const std::size_t k_rows = window_count(samples.size(), config);
  if (k_rows == 0)
    throw Error(ErrorCode::SeriesTooShort,
                "need at least " +
                    std::to_string(config.start_offset + config.stride * config.order_n + 1) +
                    " samples, got " + std::to_string(samples.size()));

  const std::size_t width = config.width();
  Matrix y(k_rows, width);
  for (std::size_t k = 0; k < k_rows; ++k) {
    const std::size_t newest = config.start_offset + config.stride * (config.order_n + k);
    for (std::size_t i = 0; i < width; ++i)
      y(k, i) = config.mask[i] ? samples[newest - config.stride * i] : 0.0;
  }
  return {std::move(y), config};
}

EmbeddedDataset embed(const TimeSeries& series, const EmbeddingConfig& config) {
  return embed(std::span<const double>(series.samples()), config);
}

}  // namespace dlaw

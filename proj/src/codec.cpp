#include "dlaw/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "dlaw/error.hpp"
#include "dlaw/fitting.hpp"
#include "dlaw/lawforms.hpp"
#include "dlaw/signal_io.hpp"

namespace dlaw {

double CodecParams::compression_rate() const {
  return static_cast<double>(block_size) / (2.0 * static_cast<double>(order_n));
}

std::size_t CodecParams::stored_weight_count() const {
  return symmetric ? (order_n + 2) / 2 : order_n + 1;
}

void CodecParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (order_n < 1) fail("order n must be >= 1");
  if (stride < 1) fail("stride must be >= 1");
  // block_size == 2n is the R = 1 point; anything smaller leaves no window.
  if (block_size < 2 * order_n)
    fail("block size " + std::to_string(block_size) + " < 2n = " + std::to_string(2 * order_n));
  if (stride * order_n >= block_size) fail("stride * n must be smaller than the block size");
  if (fit_mode == FitMode::InitialConditions && stride != 1)
    fail("initial-condition fitting requires stride 1 (use amplitude mode for larger strides)");
  if (eigen_index != 0) fail("compression always uses the smallest eigenvalue (index 0)");
}

bool operator==(const CodecParams& a, const CodecParams& b) {
  return a.order_n == b.order_n && a.stride == b.stride && a.block_size == b.block_size &&
         a.fit_mode == b.fit_mode && a.symmetric == b.symmetric && a.eigen_index == b.eigen_index;
}

bool operator==(const CompressionArtifact& a, const CompressionArtifact& b) {
  if (a.sample_rate != b.sample_rate || !(a.params == b.params) || a.blocks != b.blocks)
    return false;
  if (a.tail.size() != b.tail.size()) return false;
  for (std::size_t i = 0; i < a.tail.size(); ++i)
    if (std::bit_cast<std::uint32_t>(a.tail[i]) != std::bit_cast<std::uint32_t>(b.tail[i]))
      return false;
  return true;
}

std::size_t CompressionArtifact::decompressed_length() const {
  return blocks.size() * params.block_size + tail.size();
}

namespace {

std::vector<double> expand_weights(std::span<const float> stored, const CodecParams& params) {
  const std::size_t n = params.order_n;
  std::vector<double> w(n + 1);
  if (params.symmetric) {
    for (std::size_t i = 0; i < stored.size(); ++i) {
      w[i] = static_cast<double>(stored[i]);
      w[n - i] = w[i];
    }
  } else {
    for (std::size_t i = 0; i <= n; ++i) w[i] = static_cast<double>(stored[i]);
  }
  return w;
}

}  // namespace

void CompressionArtifact::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvariantViolation, what); };
  try {
    params.validate();
  } catch (const Error& e) {
    fail(e.message());
  }
  if (sample_rate == 0) fail("sample rate is zero");
  if (tail.size() >= params.block_size) fail("tail is not shorter than one block");
  if (decompressed_length() == 0) fail("artifact holds no samples");
  for (float v : tail)
    if (!std::isfinite(v)) fail("non-finite tail sample");
  const std::size_t wc = params.stored_weight_count();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& rec = blocks[b];
    const std::string where = "block " + std::to_string(b) + ": ";
    if (rec.weights.size() != wc) fail(where + "wrong weight count");
    if (rec.payload.size() != params.order_n) fail(where + "wrong payload length");
    for (float v : rec.weights)
      if (!std::isfinite(v)) fail(where + "non-finite weight");
    for (float v : rec.payload)
      if (!std::isfinite(v)) fail(where + "non-finite payload value");
    const auto w = expand_weights(rec.weights, params);
    if (std::abs(norm2(w) - 1.0) > 1e-6) fail(where + "stored weights are not unit norm");
  }
}

LinearLaw decode_law(const BlockRecord& record, const CodecParams& params) {
  LinearLaw law;
  law.weights = expand_weights(record.weights, params);
  law.stride = params.stride;
  law.mask.assign(params.order_n + 1, 1);
  law.symmetric = params.symmetric;
  return law;
}

std::vector<double> decode_block(const BlockRecord& record, const CodecParams& params) {
  const LinearLaw law = decode_law(record, params);
  const std::size_t count = params.block_size;
  std::vector<double> payload(record.payload.begin(), record.payload.end());

  if (params.fit_mode == FitMode::InitialConditions) return run_recursion(law, payload, count);

  const RootSet roots = weights_to_roots(law);
  payload.resize(roots.size());
  // Modes are sampled in law steps, so the sample rate does not enter here.
  return mode_basis(roots, count, params.stride) * std::span<const double>(payload);
}

namespace {

BlockRecord make_record(const LinearLaw& law, std::span<const double> payload,
                        const CodecParams& params) {
  BlockRecord rec;
  const std::size_t wc = params.stored_weight_count();
  rec.weights.resize(wc);
  for (std::size_t i = 0; i < wc; ++i) rec.weights[i] = static_cast<float>(law.weights[i]);
  rec.payload.assign(params.order_n, 0.0f);
  for (std::size_t i = 0; i < payload.size(); ++i) rec.payload[i] = static_cast<float>(payload[i]);
  return rec;
}

LinearLaw block_law(std::span<const double> block, const CodecParams& params, double& trace) {
  const auto config = EmbeddingConfig::dense(params.order_n, params.stride);
  const auto dataset = embed(block, config);
  const auto c = correlation(dataset);
  trace = c.trace();
  if (params.symmetric) return extract_symmetric_law(c, config);
  return extract_law(masked_spectrum(c, config), config, params.eigen_index);
}

}  // namespace

BlockAnalysis analyze_block(std::span<const double> block, const CodecParams& params,
                            double sample_rate, bool quantize) {
  params.validate();
  if (block.size() != params.block_size)
    throw Error(ErrorCode::DimensionMismatch, "block length does not match block size");

  BlockAnalysis out;
  out.law = block_law(block, params, out.trace);
  if (quantize) {
    const double eigenvalue = out.law.eigenvalue;
    const bool symmetric = out.law.symmetric;
    out.law = decode_law(make_record(out.law, {}, params), params);
    out.law.eigenvalue = eigenvalue;
    out.law.symmetric = symmetric;
  }

  const std::size_t count = params.block_size;
  if (params.fit_mode == FitMode::InitialConditions) {
    out.payload = fit_initial_conditions(out.law, block).initial;
  } else {
    const RootSet roots = weights_to_roots(out.law);
    const double dt = static_cast<double>(params.stride) / sample_rate;
    out.payload = fit_amplitudes(roots, block, dt, params.stride).coefficients;
  }

  if (quantize) {
    const BlockRecord rec = make_record(out.law, out.payload, params);
    out.payload.assign(rec.payload.begin(), rec.payload.end());
    out.reconstruction = decode_block(rec, params);
  } else if (params.fit_mode == FitMode::InitialConditions) {
    out.reconstruction = run_recursion(out.law, out.payload, count);
    out.payload.resize(params.order_n, 0.0);
  } else {
    const RootSet roots = weights_to_roots(out.law);
    out.reconstruction = mode_basis(roots, count, params.stride) *
                         std::span<const double>(out.payload);
    out.payload.resize(params.order_n, 0.0);
  }
  return out;
}

namespace {

std::uint32_t checked_rate(double sample_rate) {
  const double r = std::round(sample_rate);
  if (std::abs(r - sample_rate) > 1e-9 * sample_rate || r < 1.0 ||
      r > static_cast<double>(std::numeric_limits<std::uint32_t>::max()))
    throw Error(ErrorCode::InvalidArgument, "sample rate must be a positive integer (u32)");
  return static_cast<std::uint32_t>(r);
}

}  // namespace

CompressionArtifact compress(const TimeSeries& series, const CodecParams& params) {
  params.validate();
  if (series.size() < params.block_size)
    throw Error(ErrorCode::SeriesTooShort, "series shorter than one block");

  CompressionArtifact art;
  art.sample_rate = checked_rate(series.sample_rate());
  art.params = params;
  const auto& x = series.samples();
  const std::size_t block_count = x.size() / params.block_size;
  art.blocks.reserve(block_count);
  for (std::size_t b = 0; b < block_count; ++b) {
    const std::span<const double> block(x.data() + b * params.block_size, params.block_size);
    try {
      const auto analysis = analyze_block(block, params, art.sample_rate, true);
      art.blocks.push_back(make_record(analysis.law, analysis.payload, params));
    } catch (const Error& e) {
      throw Error(e.code(), "block " + std::to_string(b) + ": " + e.message());
    }
  }
  for (std::size_t i = block_count * params.block_size; i < x.size(); ++i)
    art.tail.push_back(static_cast<float>(x[i]));
  return art;
}

TimeSeries decompress(const CompressionArtifact& artifact) {
  try {
    artifact.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::CorruptArtifact, e.message());
  }
  std::vector<double> out;
  out.reserve(artifact.decompressed_length());
  for (std::size_t b = 0; b < artifact.blocks.size(); ++b) {
    std::vector<double> y;
    try {
      y = decode_block(artifact.blocks[b], artifact.params);
    } catch (const Error& e) {
      throw Error(ErrorCode::CorruptArtifact, "block " + std::to_string(b) + ": " + e.what());
    }
    out.insert(out.end(), y.begin(), y.end());
  }
  for (float v : artifact.tail) out.push_back(static_cast<double>(v));
  return TimeSeries(std::move(out), static_cast<double>(artifact.sample_rate));
}

// ---------------------------------------------------------------------------
// DLAW binary format (little-endian)
//
//   0  "DLAW"          4  u16 version      6  u16 flags (bit0 symmetric,
//   8  u32 sample_rate 12 u32 block_size      bit1 initial-condition mode)
//  16  u16 n           18 u16 stride      20  u32 block_count
//  24  u32 tail_length 28 u16 eigen_index 30  u16 reserved (0)
//  32  per block: weights then payload as f32; then tail as f32

namespace {

constexpr std::uint16_t kFlagSymmetric = 1u << 0;
constexpr std::uint16_t kFlagInitialConditions = 1u << 1;

class Writer {
 public:
  void u16(std::uint16_t v) {
    for (int s = 0; s < 16; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint16_t u16() {
    need(2);
    const auto v = static_cast<std::uint16_t>(b_[pos_] | (b_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b_[pos_ + static_cast<std::size_t>(i)];
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::size_t remaining() const { return b_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (b_.size() - pos_ < n) throw Error(ErrorCode::TruncatedPayload, "unexpected end of data");
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const CompressionArtifact& artifact) {
  artifact.validate();
  const auto& p = artifact.params;
  if (p.order_n > 0xFFFF || p.stride > 0xFFFF || p.block_size > 0xFFFFFFFFu ||
      artifact.blocks.size() > 0xFFFFFFFFu)
    throw Error(ErrorCode::InvariantViolation, "parameters exceed the format's field widths");

  Writer w;
  w.bytes("DLAW", 4);
  w.u16(kFormatVersion);
  std::uint16_t flags = 0;
  if (p.symmetric) flags |= kFlagSymmetric;
  if (p.fit_mode == FitMode::InitialConditions) flags |= kFlagInitialConditions;
  w.u16(flags);
  w.u32(artifact.sample_rate);
  w.u32(static_cast<std::uint32_t>(p.block_size));
  w.u16(static_cast<std::uint16_t>(p.order_n));
  w.u16(static_cast<std::uint16_t>(p.stride));
  w.u32(static_cast<std::uint32_t>(artifact.blocks.size()));
  w.u32(static_cast<std::uint32_t>(artifact.tail.size()));
  w.u16(static_cast<std::uint16_t>(p.eigen_index));
  w.u16(0);
  for (const auto& rec : artifact.blocks) {
    for (float v : rec.weights) w.f32(v);
    for (float v : rec.payload) w.f32(v);
  }
  for (float v : artifact.tail) w.f32(v);
  return w.take();
}

CompressionArtifact deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw Error(ErrorCode::TruncatedPayload, "shorter than the magic");
  if (std::memcmp(bytes.data(), "DLAW", 4) != 0)
    throw Error(ErrorCode::BadMagic, "magic is not \"DLAW\"");
  Reader r(bytes.subspan(4));
  const std::uint16_t version = r.u16();
  if (version != kFormatVersion)
    throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(version));
  if (bytes.size() < kHeaderSize)
    throw Error(ErrorCode::TruncatedPayload, "header is truncated");

  const std::uint16_t flags = r.u16();
  CompressionArtifact art;
  art.sample_rate = r.u32();
  art.params.block_size = r.u32();
  art.params.order_n = r.u16();
  art.params.stride = r.u16();
  const std::uint32_t block_count = r.u32();
  const std::uint32_t tail_length = r.u32();
  art.params.eigen_index = r.u16();
  const std::uint16_t reserved = r.u16();

  if (flags & ~(kFlagSymmetric | kFlagInitialConditions))
    throw Error(ErrorCode::InvariantViolation, "unknown flag bits set");
  if (reserved != 0) throw Error(ErrorCode::InvariantViolation, "reserved header field is nonzero");
  art.params.symmetric = (flags & kFlagSymmetric) != 0;
  art.params.fit_mode = (flags & kFlagInitialConditions) ? FitMode::InitialConditions
                                                         : FitMode::Amplitudes;
  try {
    art.params.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InvariantViolation, e.message());
  }

  const std::uint64_t per_block = art.params.stored_weight_count() + art.params.order_n;
  const std::uint64_t expected =
      4ull * (static_cast<std::uint64_t>(block_count) * per_block + tail_length);
  if (r.remaining() < expected)
    throw Error(ErrorCode::TruncatedPayload, "payload holds " + std::to_string(r.remaining()) +
                                                 " bytes, header implies " +
                                                 std::to_string(expected));
  if (r.remaining() > expected)
    throw Error(ErrorCode::InvariantViolation, "trailing bytes after the tail");

  art.blocks.resize(block_count);
  for (auto& rec : art.blocks) {
    rec.weights.resize(art.params.stored_weight_count());
    rec.payload.resize(art.params.order_n);
    for (auto& v : rec.weights) v = r.f32();
    for (auto& v : rec.payload) v = r.f32();
  }
  art.tail.resize(tail_length);
  for (auto& v : art.tail) v = r.f32();
  art.validate();
  return art;
}

// ---------------------------------------------------------------------------

std::string SweepReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "n,stride,R,A,lambda_min\n";
  for (const auto& row : rows)
    if (row.ok)
      os << row.n << ',' << row.stride << ',' << row.rate << ',' << row.accuracy << ','
         << row.lambda_min << '\n';
  return os.str();
}

std::string SweepReport::to_json() const {
  nlohmann::json j;
  j["signal"] = signal_id;
  j["seed"] = seed;
  j["rows"] = nlohmann::json::array();
  j["missing"] = nlohmann::json::array();
  for (const auto& row : rows) {
    if (row.ok)
      j["rows"].push_back({{"n", row.n},
                           {"stride", row.stride},
                           {"R", row.rate},
                           {"A", row.accuracy},
                           {"lambda_min", row.lambda_min}});
    else
      j["missing"].push_back({{"n", row.n}, {"stride", row.stride}, {"reason", row.reason}});
  }
  return j.dump(2);
}

const SweepRow* SweepReport::best_at_rate(double min_rate) const {
  const SweepRow* best = nullptr;
  for (const auto& row : rows)
    if (row.ok && row.rate >= min_rate && (!best || row.accuracy > best->accuracy)) best = &row;
  return best;
}

namespace {

SweepRow sweep_point(const TimeSeries& series, std::size_t n, std::size_t stride,
                     std::size_t block_size, const SweepOptions& options) {
  SweepRow row;
  row.n = n;
  row.stride = stride;
  row.rate = static_cast<double>(block_size) / (2.0 * static_cast<double>(n));

  CodecParams params;
  params.order_n = n;
  params.stride = stride;
  params.block_size = block_size;
  params.fit_mode = options.fit_mode;
  params.symmetric = options.symmetric;

  const auto& x = series.samples();
  const std::size_t blocks = x.size() / block_size;
  double err2 = 0.0, energy = 0.0, lambda_sum = 0.0;
  std::size_t b = 0;
  try {
    params.validate();
    if (blocks == 0) throw Error(ErrorCode::SeriesTooShort, "series shorter than one block");
    for (; b < blocks; ++b) {
      const std::span<const double> block(x.data() + b * block_size, block_size);
      const auto analysis = analyze_block(block, params, series.sample_rate(), false);
      for (std::size_t k = 0; k < block_size; ++k) {
        const double d = block[k] - analysis.reconstruction[k];
        err2 += d * d;
        energy += block[k] * block[k];
      }
      lambda_sum += analysis.law.eigenvalue;
    }
    if (!(energy > 0.0)) throw Error(ErrorCode::ZeroSignal, "signal has zero energy");
  } catch (const Error& e) {
    row.ok = false;
    row.reason = (b < blocks ? "block " + std::to_string(b) + ": " : std::string()) + e.what();
    return row;
  }
  row.accuracy = 1.0 - std::sqrt(err2) / std::sqrt(energy);
  row.lambda_min = lambda_sum / static_cast<double>(blocks);
  return row;
}

}  // namespace

SweepReport sweep(const TimeSeries& series, std::span<const std::size_t> n_grid,
                  std::span<const std::size_t> stride_grid, std::size_t block_size,
                  const SweepOptions& options) {
  if (n_grid.empty() || stride_grid.empty())
    throw Error(ErrorCode::InvalidArgument, "sweep grids must be nonempty");
  SweepReport report;
  for (std::size_t n : n_grid)
    for (std::size_t s : stride_grid) report.rows.push_back(sweep_point(series, n, s, block_size, options));
  return report;
}

double log_log_slope(const SweepReport& report, double min_rate, double max_rate) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (const auto& row : report.rows) {
    if (!row.ok || row.rate < min_rate || row.rate > max_rate || !(row.accuracy > 0.0)) continue;
    const double x = std::log(row.rate);
    const double y = std::log(row.accuracy);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double md = static_cast<double>(m);
  const double denom = md * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (md * sxy - sx * sy) / denom;
}

BaselineResult random_baseline(std::size_t length, std::uint64_t seed,
                               std::span<const std::size_t> n_grid, std::size_t block_size,
                               FitMode fit_mode) {
  if (length < block_size)
    throw Error(ErrorCode::SeriesTooShort, "baseline length shorter than one block");
  SynthSpec spec;
  spec.kind = SynthKind::UniformNoise;
  spec.seed = seed;
  spec.length = length;
  spec.sample_rate = 8000.0;
  const TimeSeries noise = synthesize(spec);

  const std::size_t strides[] = {1};
  SweepOptions options;
  options.fit_mode = fit_mode;
  BaselineResult result;
  result.report = sweep(noise, n_grid, strides, block_size, options);
  result.report.signal_id = "uniform_noise";
  result.report.seed = seed;
  result.slope = log_log_slope(result.report, 2.0, std::numeric_limits<double>::infinity());
  return result;
}

}  // namespace dlaw

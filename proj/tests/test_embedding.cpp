#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dlaw/embedding.hpp"
#include "dlaw/error.hpp"
#include "oracles.hpp"

using namespace dlaw;

namespace {

std::vector<std::vector<double>> rows_of(const EmbeddedDataset& d) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < d.rows.rows(); ++k) {
    auto r = d.rows.row(k);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("time series validates its samples") {
  CHECK_NOTHROW(TimeSeries({1.0}, 8000.0));
  CHECK(code_of([] { TimeSeries({}, 8000.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { TimeSeries({1.0}, 0.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { TimeSeries({1.0, std::nan("")}, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          TimeSeries({std::numeric_limits<double>::infinity()}, 1.0);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("dense windows") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto d = embed(x, EmbeddingConfig::dense(2));
  CHECK(rows_of(d) == std::vector<std::vector<double>>{{3, 2, 1}, {4, 3, 2}, {5, 4, 3}});
}

TEST_CASE("masked column is zero") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  auto cfg = EmbeddingConfig::dense(2);
  cfg.mask = {1, 0, 1};
  const auto d = embed(x, cfg);
  CHECK(rows_of(d) == std::vector<std::vector<double>>{{3, 0, 1}, {4, 0, 2}, {5, 0, 3}});
  CHECK(cfg.active_lags() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("stride two windows") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
  const auto d = embed(x, EmbeddingConfig::dense(1, 2));
  CHECK(rows_of(d) == std::vector<std::vector<double>>{{3, 1}, {5, 3}, {7, 5}});
}

TEST_CASE("invalid configurations") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  auto cfg = EmbeddingConfig::dense(2);
  cfg.mask = {0, 1, 1};
  CHECK(code_of([&] { embed(x, cfg); }) == ErrorCode::InvalidMask);
  cfg.mask = {1, 0, 0};
  CHECK(code_of([&] { embed(x, cfg); }) == ErrorCode::InvalidMask);
  cfg.mask = {1, 1};
  CHECK(code_of([&] { embed(x, cfg); }) == ErrorCode::InvalidMask);
  cfg = EmbeddingConfig::dense(2);
  cfg.mask = {1, 2, 1};
  CHECK(code_of([&] { embed(x, cfg); }) == ErrorCode::InvalidMask);
  CHECK(code_of([&] { embed(x, EmbeddingConfig::dense(0)); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { embed(x, EmbeddingConfig::dense(1, 0)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("too short series") {
  const std::vector<double> x{1, 2, 3};
  CHECK(code_of([&] { embed(x, EmbeddingConfig::dense(3)); }) == ErrorCode::SeriesTooShort);
  auto cfg = EmbeddingConfig::dense(1, 2);
  CHECK(window_count(3, cfg) == 1);
  cfg.start_offset = 1;
  CHECK(window_count(3, cfg) == 0);
  CHECK(code_of([&] { embed(x, cfg); }) == ErrorCode::SeriesTooShort);
}

TEST_CASE("row count and contents match a brute-force enumerator") {
  const auto x = oracle::uniform(37, 7);
  for (std::size_t len = 1; len <= x.size(); ++len) {
    const std::vector<double> xs(x.begin(), x.begin() + static_cast<long>(len));
    for (std::size_t n = 1; n <= 6; ++n)
      for (std::size_t stride = 1; stride <= 4; ++stride)
        for (std::size_t offset = 0; offset <= 5; ++offset) {
          auto cfg = EmbeddingConfig::dense(n, stride);
          cfg.start_offset = offset;
          if (n >= 2) cfg.mask[1] = 0;
          const auto expected = oracle::brute_windows(xs, n, stride, offset, cfg.mask);
          CHECK(window_count(len, cfg) == expected.size());
          if (expected.empty()) continue;
          const auto d = embed(xs, cfg);
          CHECK(rows_of(d) == expected);
        }
  }
}

TEST_CASE("shift property") {
  const auto x = oracle::uniform(50, 3);
  for (std::size_t m : {1u, 4u, 9u}) {
    auto cfg = EmbeddingConfig::dense(3, 2);
    const std::vector<double> shifted(x.begin() + static_cast<long>(m), x.end());
    const auto a = embed(shifted, cfg);
    cfg.start_offset = m;
    const auto b = embed(x, cfg);
    CHECK(a.rows == b.rows);
  }
}

TEST_CASE("scaling") {
  const auto x = oracle::uniform(40, 5);
  std::vector<double> scaled(x);
  for (double& v : scaled) v *= -2.5;
  const auto cfg = EmbeddingConfig::dense(4, 3);
  const auto a = embed(x, cfg);
  const auto b = embed(scaled, cfg);
  for (std::size_t i = 0; i < a.rows.data().size(); ++i)
    CHECK(b.rows.data()[i] == -2.5 * a.rows.data()[i]);
}

TEST_CASE("time series overload") {
  const TimeSeries s({1, 2, 3, 4}, 10.0);
  const auto d = embed(s, EmbeddingConfig::dense(1));
  CHECK(d.sample_count() == 3);
  CHECK(d.rows(2, 0) == 4.0);
  CHECK(d.rows(2, 1) == 3.0);
}

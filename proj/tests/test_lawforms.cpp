#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "dlaw/error.hpp"
#include "dlaw/lawforms.hpp"
#include "oracles.hpp"

using namespace dlaw;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

bool contains_root(const RootSet& r, complex q, double tol) {
  for (const auto& z : r.roots)
    if (std::abs(z - q) < tol) return true;
  return false;
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

// Random conjugate-closed root set with moduli in [lo, hi].
RootSet random_roots(std::mt19937_64& rng, std::size_t pairs, std::size_t reals, double lo,
                     double hi) {
  std::uniform_real_distribution<double> mod(lo, hi), ang(0.1, kPi - 0.1);
  RootSet r;
  for (std::size_t i = 0; i < reals; ++i) r.roots.emplace_back((i % 2 ? -1.0 : 1.0) * mod(rng), 0.0);
  for (std::size_t i = 0; i < pairs; ++i) {
    const complex q = std::polar(mod(rng), ang(rng));
    r.roots.push_back(q);
    r.roots.push_back(std::conj(q));
  }
  return r;
}

std::vector<complex> mat_vec(const Matrix& m, const std::vector<complex>& v) {
  std::vector<complex> out(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

// |M v - mu v| / |v| with v = (mu^{n-1}, ..., mu, 1).
double eigen_defect(const Matrix& m, complex mu) {
  const std::size_t n = m.rows();
  std::vector<complex> v(n);
  complex p = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    v[i] = p;
    p *= mu;
  }
  const auto mv = mat_vec(m, v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += std::norm(mv[i] - mu * v[i]);
    den += std::norm(v[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("sine law roots lie on the unit circle at the tone frequency") {
  const auto r = weights_to_roots(std::vector<double>{1, -1, 1});
  REQUIRE(r.size() == 2);
  CHECK(std::abs(r.roots[0] - std::polar(1.0, kPi / 3)) < 1e-12);
  CHECK(r.roots[1] == std::conj(r.roots[0]));
  CHECK(r.residual_bound < 1e-8);
}

TEST_CASE("integer roots") {
  const auto r = weights_to_roots(std::vector<double>{6, -5, 1});
  REQUIRE(r.size() == 2);
  CHECK(r.roots[0].real() == Approx(2.0).epsilon(1e-12));
  CHECK(r.roots[1].real() == Approx(3.0).epsilon(1e-12));
  CHECK(r.roots[0].imag() == 0.0);
}

TEST_CASE("two-sine law roots") {
  const auto w = oracle::multi_tone_law({kPi / 3, kPi / 5});
  const auto r = weights_to_roots(w);
  REQUIRE(r.size() == 4);
  for (double th : {kPi / 3, kPi / 5}) {
    CHECK(contains_root(r, std::polar(1.0, th), 1e-8));
    CHECK(contains_root(r, std::polar(1.0, -th), 1e-8));
  }
}

TEST_CASE("trailing zero weights lower the degree") {
  const auto r = weights_to_roots(std::vector<double>{6, -5, 1, 0, 0});
  CHECK(r.size() == 2);
  CHECK(code_of([] { weights_to_roots(std::vector<double>{3, 0}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("root finding failure is reported") {
  RootFinderOptions opts;
  opts.max_iterations = 1;
  CHECK(code_of([&] { weights_to_roots(std::vector<double>{1, 0.3, -2, 0.7, 1.1, -0.4}, opts); }) ==
        ErrorCode::RootFindingDiverged);
}

TEST_CASE("roots to weights") {
  RootSet a{{complex(2, 0), complex(3, 0)}, 0.0};
  CHECK(roots_to_weights(a) == std::vector<double>{6, -5, 1});
  RootSet b{{complex(0, 1), complex(0, -1)}, 0.0};
  const auto w = roots_to_weights(b);
  CHECK(oracle::max_abs_diff(w, {1, 0, 1}) < 1e-15);
  const auto scaled = roots_to_weights(a, -2.0);
  CHECK(scaled == std::vector<double>{-12, 10, -2});
  RootSet bad{{complex(1, 1), complex(2, 0)}, 0.0};
  CHECK(code_of([&] { roots_to_weights(bad); }) == ErrorCode::NonRealCoefficients);
}

TEST_CASE("weights to roots to weights round trip for random palindromes") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    std::vector<double> w(n + 1);
    for (std::size_t i = 0; i <= n / 2; ++i) w[i] = w[n - i] = d(rng);
    if (std::abs(w[n]) < 0.05) w[0] = w[n] = 0.5;
    const auto r = weights_to_roots(w);
    CHECK(r.size() == n);
    const auto back = roots_to_weights(r, w[n]);
    double wmax = 0.0;
    for (double v : w) wmax = std::max(wmax, std::abs(v));
    CHECK(oracle::max_abs_diff(back, w) < 1e-8 * wmax);
  }
}

TEST_CASE("palindromic weights have inversion-closed roots") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 7;
    std::vector<double> w(n + 1);
    for (std::size_t i = 0; i <= n / 2; ++i) w[i] = w[n - i] = d(rng);
    w[0] = w[n] = 1.0;
    const auto r = weights_to_roots(w);
    for (const auto& q : r.roots) CHECK(contains_root(r, 1.0 / q, 1e-8 * (1.0 + std::abs(1.0 / q))));
  }
}

TEST_CASE("roots are conjugate closed and canonically ordered") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> w(7);
    for (double& v : w) v = d(rng);
    const auto r = weights_to_roots(w);
    const auto split = split_conjugates(r);
    CHECK(split.real.size() + 2 * split.pairs.size() == r.size());
    std::size_t i = 0;
    for (; i < split.real.size(); ++i) CHECK(r.roots[i].imag() == 0.0);
    for (; i < r.size(); i += 2) {
      CHECK(r.roots[i].imag() > 0.0);
      CHECK(r.roots[i + 1] == std::conj(r.roots[i]));
    }
    CHECK(r.residual_bound < 1e-8);
  }
}

TEST_CASE("root finder copes with widely spread moduli at high degree") {
  std::mt19937_64 rng(99);
  for (std::size_t deg : {40u, 80u, 120u}) {
    const auto w = oracle::uniform(deg + 1, rng());
    const auto r = weights_to_roots(w);
    CHECK(r.size() == deg);
    CHECK(r.residual_bound < 1e-8);
  }
}

TEST_CASE("continuous model exponents") {
  const std::vector<complex> one{1.0};
  CHECK(roots_to_model(RootSet{{complex(2, 0)}, 0}, one, 1.0).exponents[0].real() ==
        Approx(std::log(2.0)));
  const auto m = roots_to_model(RootSet{{std::polar(1.0, kPi / 3), std::polar(1.0, -kPi / 3)}, 0},
                                std::vector<complex>{1.0, 1.0}, 0.5);
  CHECK(std::abs(m.exponents[0] - complex(0, 2 * kPi / 3)) < 1e-12);
  CHECK(std::abs(m.exponents[1] - complex(0, -2 * kPi / 3)) < 1e-12);
  CHECK(roots_to_model(RootSet{{complex(1, 0)}, 0}, one, 1.0).exponents[0] == complex(0, 0));
  CHECK(code_of([&] { roots_to_model(RootSet{{complex(0, 0)}, 0}, one, 1.0); }) ==
        ErrorCode::ZeroRoot);
  CHECK(code_of([&] { roots_to_model(RootSet{{complex(2, 0)}, 0}, one, 0.0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { roots_to_model(RootSet{{complex(2, 0)}, 0}, {}, 1.0); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("conjugate amplitudes are paired by averaging") {
  const RootSet r{{std::polar(0.9, 0.5), std::polar(0.9, -0.5)}, 0};
  const std::vector<complex> amps{complex(1.0, 2.0), complex(3.0, 1.0)};
  const auto m = roots_to_model(r, amps, 1.0);
  CHECK(m.amplitudes[1] == std::conj(m.amplitudes[0]));
  CHECK(std::abs(m.amplitudes[0] - complex(2.0, 0.5)) < 1e-15);
}

TEST_CASE("evaluate model") {
  const auto m1 = roots_to_model(RootSet{{complex(2, 0)}, 0}, std::vector<complex>{3.0}, 1.0);
  CHECK(evaluate_model(m1, 2.0) == Approx(0.75).epsilon(1e-14));
  const auto m2 = roots_to_model(RootSet{{complex(0, 1), complex(0, -1)}, 0},
                                 std::vector<complex>{0.5, 0.5}, 1.0);
  CHECK(evaluate_model(m2, 0.0) == Approx(1.0));
  CHECK(std::abs(evaluate_model(m2, 1.0)) < 1e-15);
  CHECK(evaluate_model(m2, 2.0) == Approx(-1.0));
}

TEST_CASE("negative real roots match the discrete series on the grid") {
  const auto m = roots_to_model(RootSet{{complex(-2, 0)}, 0}, std::vector<complex>{1.0}, 1.0);
  CHECK(m.self_conjugate[0]);
  for (int k = 0; k < 6; ++k) CHECK(evaluate_model(m, k) == Approx(std::pow(-0.5, k)));
}

TEST_CASE("recursions") {
  const auto constant = LinearLaw::from_weights({1, -1});
  CHECK(run_recursion(constant, std::vector<double>{5}, 4) == std::vector<double>{5, 5, 5, 5});
  const auto fib = LinearLaw::from_weights({1, -1, -1});
  const auto f = run_recursion(fib, std::vector<double>{1, 1}, 6);
  CHECK(oracle::max_abs_diff(f, {1, 1, 2, 3, 5, 8}) < 1e-12);

  const auto sine = LinearLaw::from_weights({1, -1, 1});
  const auto s = run_recursion(sine, std::vector<double>{0, std::sin(kPi / 3)}, 100);
  CHECK(oracle::max_abs_diff(s, oracle::sine(100, kPi / 3)) < 1e-9);
  CHECK(recursion_coefficients(sine).size() == 2);
}

TEST_CASE("recursion errors") {
  const auto grow = LinearLaw::from_weights({1, -10});
  CHECK(code_of([&] { run_recursion(grow, std::vector<double>{1}, 200); }) ==
        ErrorCode::UnstableOverflow);
  const auto lead0 = LinearLaw::from_weights({0, 1, 1});
  CHECK(code_of([&] { run_recursion(lead0, std::vector<double>{1, 1}, 5); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([&] { companion_matrix(lead0); }) == ErrorCode::InvalidArgument);
  const auto fib = LinearLaw::from_weights({1, -1, -1});
  CHECK(code_of([&] { run_recursion(fib, std::vector<double>{1}, 5); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("unit-circle roots keep the recursion bounded") {
  const auto w = oracle::multi_tone_law({0.4, 1.3, 2.2});
  const auto law = LinearLaw::from_weights(w);
  auto init = oracle::uniform(6, 3);
  const double nrm = norm2(init);
  for (double& v : init) v /= nrm;
  const auto y = run_recursion(law, init, 10000);
  double m = 0.0;
  for (double v : y) m = std::max(m, std::abs(v));
  CHECK(m < 100.0);
}

TEST_CASE("backward recursion reverses a palindromic law exactly") {
  const auto law = LinearLaw::from_weights(oracle::multi_tone_law({0.7, 1.9}));
  const auto fwd = run_recursion(law, std::vector<double>{0.3, -0.2, 0.9, 0.1}, 60);
  const std::vector<double> last(fwd.end() - 4, fwd.end());
  const auto back = run_recursion_backward(law, last, 60);
  CHECK(oracle::max_abs_diff(back, fwd) < 1e-9);
}

TEST_CASE("companion matrix layout") {
  const auto m = companion_matrix(LinearLaw::from_weights({1, -1, -1}));
  CHECK(oracle::max_abs_diff(m.entries.data(), {1, 1, 1, 0}) < 1e-15);
}

TEST_CASE("companion eigenvectors for palindromic laws") {
  for (const auto& omegas : std::vector<std::vector<double>>{{kPi / 3}, {0.5, 2.0}, {0.2, 1.1, 2.5}}) {
    const auto law = LinearLaw::from_weights(oracle::multi_tone_law(omegas));
    const auto m = companion_matrix(law);
    for (const auto& q : weights_to_roots(law).roots) CHECK(eigen_defect(m.entries, q) < 1e-8);
  }
}

TEST_CASE("companion eigenvalues are the reciprocal roots for a general law") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto roots = random_roots(rng, 2, 2, 0.6, 1.6);
    const auto law = LinearLaw::from_weights(roots_to_weights(roots));
    const auto m = companion_matrix(law);
    for (const auto& q : weights_to_roots(law).roots) CHECK(eigen_defect(m.entries, 1.0 / q) < 1e-8);
  }
}

TEST_CASE("one recursion step equals the companion product exactly") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto law = LinearLaw::from_weights(oracle::uniform(6, rng(), 0.2, 1.0));
    const std::size_t n = law.order();
    const auto init = oracle::uniform(n, rng());
    const auto y = run_recursion(law, init, n + 1);
    std::vector<double> state(n);
    for (std::size_t i = 0; i < n; ++i) state[i] = y[n - 1 - i];
    const auto next = companion_matrix(law).entries * std::span<const double>(state);
    for (std::size_t i = 0; i < n; ++i) CHECK(next[i] == y[n - i]);
  }
}

TEST_CASE("four representations agree") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const auto roots = random_roots(rng, 1 + trial % 3, trial % 3, 0.85, 1.3);
    const auto law = LinearLaw::from_weights(roots_to_weights(roots));
    const std::size_t n = law.order();
    std::vector<complex> amps(n);
    std::uniform_real_distribution<double> d(-1, 1);
    for (auto& c : amps) c = complex(d(rng), d(rng));
    const auto model = roots_to_model(roots, amps, 1.0);
    std::vector<double> sampled(50);
    for (std::size_t k = 0; k < sampled.size(); ++k)
      sampled[k] = evaluate_model(model, static_cast<double>(k));
    const std::vector<double> init(sampled.begin(), sampled.begin() + static_cast<long>(n));
    const auto rec = run_recursion(law, init, 50);
    double scale = 0.0;
    for (double v : sampled) scale = std::max(scale, std::abs(v));
    CHECK(oracle::max_abs_diff(rec, sampled) < 1e-8 * std::max(1.0, scale));
  }
}

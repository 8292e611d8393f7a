#include "dlaw/lawforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dlaw/error.hpp"

namespace dlaw {

namespace {

constexpr double kOverflowLimit = 1e100;

// Roots with |Im| at or below this (relative to max(1,|q|)) are taken as real.
constexpr double kRealTolerance = 1e-9;

std::size_t effective_degree(std::span<const double> w) {
  std::size_t d = w.size();
  while (d > 0 && w[d - 1] == 0.0) --d;
  return d == 0 ? 0 : d - 1;
}

complex evaluate_poly(std::span<const double> w, complex x) {
  complex acc = 0.0;
  for (std::size_t i = w.size(); i-- > 0;) acc = acc * x + w[i];
  return acc;
}

double largest_term(std::span<const double> w, double modulus) {
  double m = 0.0;
  double p = 1.0;
  for (double x : w) {
    m = std::max(m, std::abs(x) * p);
    p *= modulus;
  }
  return m;
}

// Complex product kept as mantissa * 2^exponent so long products of small or
// large factors neither underflow nor overflow.
struct ScaledProduct {
  complex mantissa = 1.0;
  long exponent = 0;

  void multiply(const complex& f) {
    mantissa *= f;
    const double m = std::max(std::abs(mantissa.real()), std::abs(mantissa.imag()));
    if (m == 0.0 || !std::isfinite(m)) return;
    int e = 0;
    std::frexp(m, &e);
    mantissa = complex(std::ldexp(mantissa.real(), -e), std::ldexp(mantissa.imag(), -e));
    exponent += e;
  }
};

// Weierstrass correction P(z_a) / prod_{b != a} (z_a - z_b) for a monic P.
// For |z_a| > 1 the reversed polynomial in 1/z_a is used so Horner stays bounded.
complex weierstrass_step(std::span<const complex> monic, std::span<const complex> z,
                         std::size_t a) {
  const std::size_t degree = monic.size() - 1;
  const complex x = z[a];
  ScaledProduct denom;
  complex value = 0.0;
  if (std::abs(x) <= 1.0) {
    for (std::size_t i = degree + 1; i-- > 0;) value = value * x + monic[i];
    for (std::size_t b = 0; b < z.size(); ++b)
      if (b != a) denom.multiply(x - z[b]);
  } else {
    const complex u = 1.0 / x;
    for (std::size_t i = 0; i <= degree; ++i) value = value * u + monic[i];
    value *= x;
    for (std::size_t b = 0; b < z.size(); ++b)
      if (b != a) denom.multiply(1.0 - z[b] * u);
  }
  if (denom.mantissa == complex(0.0)) denom.mantissa = 1e-300;
  const complex q = value / denom.mantissa;
  const long e = std::clamp<long>(-denom.exponent, -4000, 4000);
  return complex(std::ldexp(q.real(), static_cast<int>(e)), std::ldexp(q.imag(), static_cast<int>(e)));
}

// |P(q)| relative to the largest term |w_i| |q|^i, evaluated in 1/q for |q| > 1.
double relative_residual(std::span<const double> w, complex q) {
  const double r = std::abs(q);
  if (r <= 1.0) {
    const double scale = largest_term(w, r);
    return scale > 0.0 ? std::abs(evaluate_poly(w, q)) / scale : 0.0;
  }
  const complex u = 1.0 / q;
  complex acc = 0.0;
  for (double x : w) acc = acc * u + x;
  double scale = 0.0;
  double p = 1.0;
  for (std::size_t i = w.size(); i-- > 0;) {
    scale = std::max(scale, std::abs(w[i]) * p);
    p /= r;
  }
  return scale > 0.0 ? std::abs(acc) / scale : 0.0;
}

bool less_complex(const complex& a, const complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Makes a root multiset of a real polynomial exactly conjugate-closed and
// puts it in canonical order.
std::vector<complex> canonicalize(std::vector<complex> z) {
  std::vector<double> reals;
  std::vector<complex> upper, lower;
  for (const auto& q : z) {
    if (std::abs(q.imag()) <= kRealTolerance * std::max(1.0, std::abs(q)))
      reals.push_back(q.real());
    else if (q.imag() > 0.0)
      upper.push_back(q);
    else
      lower.push_back(q);
  }
  std::sort(upper.begin(), upper.end(), less_complex);

  std::vector<bool> used(lower.size(), false);
  std::vector<complex> pairs;
  for (const auto& q : upper) {
    std::size_t best = lower.size();
    double best_dist = 0.0;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(std::conj(lower[j]) - q);
      if (best == lower.size() || d < best_dist) {
        best = j;
        best_dist = d;
      }
    }
    if (best == lower.size()) {
      reals.push_back(q.real());
      continue;
    }
    used[best] = true;
    pairs.push_back(0.5 * (q + std::conj(lower[best])));
  }
  for (std::size_t j = 0; j < lower.size(); ++j)
    if (!used[j]) reals.push_back(lower[j].real());

  std::sort(reals.begin(), reals.end());
  std::sort(pairs.begin(), pairs.end(), less_complex);
  std::vector<complex> out;
  out.reserve(z.size());
  for (double r : reals) out.emplace_back(r, 0.0);
  for (const auto& q : pairs) {
    out.push_back(q);
    out.push_back(std::conj(q));
  }
  return out;
}

}  // namespace

complex evaluate_polynomial(std::span<const double> weights, complex x) {
  return evaluate_poly(weights, x);
}

RootSet weights_to_roots(std::span<const double> weights, const RootFinderOptions& options) {
  for (double w : weights)
    if (!std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "non-finite weight");
  const std::size_t degree = effective_degree(weights);
  if (degree < 1)
    throw Error(ErrorCode::InvalidArgument, "polynomial degree must be at least 1");

  const double lead = weights[degree];
  std::vector<complex> monic(degree + 1);
  for (std::size_t i = 0; i <= degree; ++i) monic[i] = weights[i] / lead;

  std::vector<complex> z(degree);
  const complex seed(0.4, 0.9);
  complex power = 1.0;
  for (std::size_t a = 0; a < degree; ++a) {
    z[a] = power;
    power *= seed;
  }

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double max_step = 0.0;
    for (std::size_t a = 0; a < degree; ++a) {
      const complex step = weierstrass_step(monic, z, a);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[a] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[a])));
    }
    if (max_step <= options.step_tolerance) break;
  }

  const auto trimmed = weights.first(degree + 1);
  RootSet out;
  out.roots = canonicalize(std::move(z));
  for (const auto& q : out.roots) {
    const double residual = relative_residual(trimmed, q);
    out.residual_bound = std::max(out.residual_bound, residual);
    if (!(residual <= options.residual_tolerance))
      throw Error(ErrorCode::RootFindingDiverged,
                  "root residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return out;
}

RootSet weights_to_roots(const LinearLaw& law, const RootFinderOptions& options) {
  return weights_to_roots(std::span<const double>(law.weights), options);
}

ConjugateSplit split_conjugates(const RootSet& roots) {
  ConjugateSplit split;
  for (const auto& q : roots.roots) {
    if (q.imag() == 0.0)
      split.real.push_back(q.real());
    else if (q.imag() > 0.0)
      split.pairs.push_back(q);
  }
  return split;
}

std::vector<double> roots_to_weights(const RootSet& roots, double scale) {
  std::vector<complex> poly{complex(1.0)};
  for (const auto& q : roots.roots) {
    std::vector<complex> next(poly.size() + 1, complex(0.0));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= q * poly[i];
    }
    poly = std::move(next);
  }
  double max_re = 1.0;
  double max_im = 0.0;
  for (const auto& c : poly) {
    max_re = std::max(max_re, std::abs(c.real()));
    max_im = std::max(max_im, std::abs(c.imag()));
  }
  if (max_im > 1e-6 * max_re)
    throw Error(ErrorCode::NonRealCoefficients,
                "roots are not conjugate-closed (imaginary residue " + std::to_string(max_im) +
                    ")");
  std::vector<double> w(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i) w[i] = scale * poly[i].real();
  return w;
}

ContinuousModel roots_to_model(const RootSet& roots, std::span<const complex> amplitudes,
                               double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  const std::size_t n = roots.size();
  if (amplitudes.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "amplitude count does not match root count");

  ContinuousModel model;
  model.dt = dt;
  model.exponents.resize(n);
  model.amplitudes.assign(amplitudes.begin(), amplitudes.end());
  model.self_conjugate.assign(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    const complex q = roots.roots[a];
    if (std::abs(q) < 1e-300)
      throw Error(ErrorCode::ZeroRoot, "root " + std::to_string(a) + " is zero");
    model.exponents[a] = std::log(q) / dt;
  }

  std::vector<bool> done(n, false);
  for (std::size_t a = 0; a < n; ++a) {
    if (done[a]) continue;
    const complex q = roots.roots[a];
    if (q.imag() == 0.0) {
      model.self_conjugate[a] = true;
      model.amplitudes[a] = complex(model.amplitudes[a].real(), 0.0);
      done[a] = true;
      continue;
    }
    std::size_t partner = n;
    double best = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a || done[b]) continue;
      const double d = std::abs(roots.roots[b] - std::conj(q));
      if (partner == n || d < best) {
        partner = b;
        best = d;
      }
    }
    if (partner == n || best > 1e-8 * std::max(1.0, std::abs(q)))
      throw Error(ErrorCode::InvalidArgument,
                  "root " + std::to_string(a) + " has no conjugate partner");
    const complex c = 0.5 * (model.amplitudes[a] + std::conj(model.amplitudes[partner]));
    model.amplitudes[a] = c;
    model.amplitudes[partner] = std::conj(c);
    model.exponents[partner] = std::conj(model.exponents[a]);
    done[a] = done[partner] = true;
  }
  return model;
}

double evaluate_model(const ContinuousModel& model, double t) {
  complex sum = 0.0;
  double real_part = 0.0;
  for (std::size_t a = 0; a < model.exponents.size(); ++a) {
    const complex term = model.amplitudes[a] * std::exp(-model.exponents[a] * t);
    if (model.self_conjugate[a])
      real_part += term.real();
    else
      sum += term;
  }
  const double y = real_part + sum.real();
  if (!(std::abs(sum.imag()) < 1e-9 * (1.0 + std::abs(y))))
    throw Error(ErrorCode::InvariantViolation,
                "model is not real at t=" + std::to_string(t) +
                    " (imaginary part " + std::to_string(sum.imag()) + ")");
  return y;
}

std::vector<double> recursion_coefficients(const LinearLaw& law) {
  const std::size_t n = law.order();
  const double w0 = law.weights[0];
  if (!(std::abs(w0) > 1e-12))
    throw Error(ErrorCode::InvalidArgument, "leading weight w0 is (near) zero");
  std::vector<double> c(n);
  for (std::size_t k = 1; k <= n; ++k) c[k - 1] = -law.weights[k] / w0;
  return c;
}

namespace {

std::vector<double> iterate(std::span<const double> coeffs, std::span<const double> initial,
                            std::size_t count) {
  const std::size_t n = coeffs.size();
  if (initial.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "recursion needs " + std::to_string(n) +
                                                  " initial values, got " +
                                                  std::to_string(initial.size()));
  std::vector<double> y(initial.begin(), initial.end());
  y.resize(std::max(count, n));
  for (std::size_t k = n; k < count; ++k) {
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) s += coeffs[i - 1] * y[k - i];
    if (!(std::abs(s) <= kOverflowLimit))
      throw Error(ErrorCode::UnstableOverflow,
                  "recursion exceeded 1e100 at step " + std::to_string(k));
    y[k] = s;
  }
  y.resize(count);
  return y;
}

}  // namespace

std::vector<double> run_recursion(const LinearLaw& law, std::span<const double> initial,
                                  std::size_t count) {
  return iterate(recursion_coefficients(law), initial, count);
}

std::vector<double> run_recursion_backward(const LinearLaw& law, std::span<const double> final,
                                           std::size_t count) {
  const std::size_t n = law.order();
  const double wn = law.weights[n];
  if (!(std::abs(wn) > 1e-12))
    throw Error(ErrorCode::InvalidArgument, "trailing weight w_n is (near) zero");
  std::vector<double> b(n);
  for (std::size_t j = 1; j <= n; ++j) b[j - 1] = -law.weights[n - j] / wn;

  std::vector<double> reversed(final.rbegin(), final.rend());
  auto out = iterate(b, reversed, count);
  std::reverse(out.begin(), out.end());
  return out;
}

CompanionMatrix companion_matrix(const LinearLaw& law) {
  const auto c = recursion_coefficients(law);
  const std::size_t n = c.size();
  CompanionMatrix m{Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) m.entries(0, j) = c[j];
  for (std::size_t i = 1; i < n; ++i) m.entries(i, i - 1) = 1.0;
  return m;
}

}  // namespace dlaw

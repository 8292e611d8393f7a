#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dlaw/matrix.hpp"
#include "dlaw/spectral.hpp"

namespace dlaw {

using complex = std::complex<double>;

/// Roots q_a of P(x) = sum_i w_i x^i. Real roots come first (ascending),
/// then conjugate pairs as adjacent (q, conj q) entries with Im q > 0.
struct RootSet {
  std::vector<complex> roots;
  double residual_bound = 0.0;  // max_a |P(q_a)| / max_i |w_i| |q_a|^i

  std::size_t size() const noexcept { return roots.size(); }
};

/// Real roots and upper-half-plane representatives of conjugate pairs.
struct ConjugateSplit {
  std::vector<double> real;
  std::vector<complex> pairs;  // Im > 0; each stands for itself and its conjugate
};

ConjugateSplit split_conjugates(const RootSet& roots);

/// y(t) = sum_a c_a exp(-alpha_a t), alpha_a = ln(q_a) / dt (principal branch).
/// A negative real root has no real continuous extension on its own; its term
/// is evaluated as Re(c exp(-alpha t)), which coincides with the discrete
/// series on the sample grid.
struct ContinuousModel {
  std::vector<complex> exponents;   // 1/second
  std::vector<complex> amplitudes;
  std::vector<bool> self_conjugate;  // mode comes from a real root
  double dt = 1.0;                   // seconds per law step
};

/// Appendix layout: first row (c_1..c_n) with c_k = -w_k / w_0, ones on the
/// subdiagonal. Advances the state (y_{N-1}, ..., y_{N-n}) by one step.
struct CompanionMatrix {
  Matrix entries;
};

struct RootFinderOptions {
  double step_tolerance = 1e-12;
  int max_iterations = 1000;
  double residual_tolerance = 1e-8;
};

/// Durand-Kerner simultaneous iteration on the weight polynomial. Trailing
/// zero weights lower the degree.
RootSet weights_to_roots(std::span<const double> weights, const RootFinderOptions& options = {});
RootSet weights_to_roots(const LinearLaw& law, const RootFinderOptions& options = {});

/// Expands scale * prod_a (x - q_a); coefficient of x^n equals scale.
std::vector<double> roots_to_weights(const RootSet& roots, double scale = 1.0);

ContinuousModel roots_to_model(const RootSet& roots, std::span<const complex> amplitudes,
                               double dt);
double evaluate_model(const ContinuousModel& model, double t);

/// Recursion coefficients c_k = -w_k / w_0 for k = 1..n.
std::vector<double> recursion_coefficients(const LinearLaw& law);

/// Forward recursion from n initial values (oldest first). Output has `count`
/// entries and begins with the initial values.
std::vector<double> run_recursion(const LinearLaw& law, std::span<const double> initial,
                                  std::size_t count);

/// Backward recursion: given the n newest values (oldest first), produces the
/// `count` values ending with them, in chronological order.
std::vector<double> run_recursion_backward(const LinearLaw& law, std::span<const double> final,
                                           std::size_t count);

CompanionMatrix companion_matrix(const LinearLaw& law);

/// Polynomial value sum_i w_i x^i (Horner).
complex evaluate_polynomial(std::span<const double> weights, complex x);

}  // namespace dlaw

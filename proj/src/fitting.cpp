#include "dlaw/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "dlaw/error.hpp"

namespace dlaw {

namespace {

// Cholesky factorization in place (lower triangle). Fails when a pivot drops
// below `relative_pivot` times the largest diagonal entry.
bool cholesky(Matrix& a, double relative_pivot) {
  const std::size_t m = a.rows();
  double max_diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, a(i, i));
  if (!(max_diag > 0.0)) return false;
  for (std::size_t j = 0; j < m; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > relative_pivot * max_diag)) return false;
    const double l = std::sqrt(d);
    a(j, j) = l;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / l;
    }
  }
  return true;
}

std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> rhs) {
  const std::size_t m = l.rows();
  for (std::size_t i = 0; i < m; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * rhs[k];
    rhs[i] = s / l(i, i);
  }
  for (std::size_t i = m; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < m; ++k) s -= l(k, i) * rhs[k];
    rhs[i] = s / l(i, i);
  }
  return rhs;
}

std::vector<double> transpose_times(const Matrix& b, std::span<const double> y) {
  std::vector<double> out(b.cols(), 0.0);
  for (std::size_t k = 0; k < b.rows(); ++k) {
    const auto row = b.row(k);
    for (std::size_t j = 0; j < b.cols(); ++j) out[j] += row[j] * y[k];
  }
  return out;
}

double rms(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

std::vector<double> solve_least_squares(const Matrix& b, std::span<const double> y) {
  const std::size_t rows = b.rows();
  const std::size_t m = b.cols();
  if (y.size() != rows)
    throw Error(ErrorCode::DimensionMismatch, "least squares: rhs length mismatch");
  if (m == 0) return {};

  std::vector<double> scale(m, 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += b(k, j) * b(k, j);
    if (!std::isfinite(s))
      throw Error(ErrorCode::SingularNormalMatrix, "basis column is not finite");
    if (s > 0.0) scale[j] = 1.0 / std::sqrt(s);
  }
  Matrix bs(rows, m);
  for (std::size_t k = 0; k < rows; ++k)
    for (std::size_t j = 0; j < m; ++j) bs(k, j) = b(k, j) * scale[j];

  Matrix normal(m, m);
  for (std::size_t k = 0; k < rows; ++k) {
    const auto row = bs.row(k);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j <= i; ++j) normal(i, j) += row[i] * row[j];
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) normal(j, i) = normal(i, j);

  Matrix factor = normal;
  if (!cholesky(factor, 1e-12)) {
    const double ridge = 1e-10 * normal.trace();
    factor = normal;
    for (std::size_t i = 0; i < m; ++i) factor(i, i) += ridge;
    if (!cholesky(factor, 0.0))
      throw Error(ErrorCode::SingularNormalMatrix,
                  "normal matrix is singular even with ridge regularization");
  }

  auto x = cholesky_solve(factor, transpose_times(bs, y));
  // One refinement step against the original least-squares problem.
  std::vector<double> residual(y.begin(), y.end());
  for (std::size_t k = 0; k < rows; ++k) residual[k] -= dot(bs.row(k), x);
  const auto delta = cholesky_solve(factor, transpose_times(bs, residual));
  for (std::size_t j = 0; j < m; ++j) x[j] = (x[j] + delta[j]) * scale[j];
  return x;
}

static double mode_anchor(double modulus, double t_end) { return modulus < 1.0 ? t_end : 0.0; }

Matrix mode_basis(const RootSet& roots, std::size_t count, std::size_t samples_per_step) {
  if (samples_per_step < 1)
    throw Error(ErrorCode::InvalidArgument, "samples_per_step must be >= 1");
  const auto split = split_conjugates(roots);
  const std::size_t m = split.real.size() + 2 * split.pairs.size();
  if (m != roots.size())
    throw Error(ErrorCode::InvalidArgument, "root set is not conjugate-closed");

  Matrix basis(count, m);
  const double h = 1.0 / static_cast<double>(samples_per_step);
  const double t_end = count > 0 ? static_cast<double>(count - 1) * h : 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * h;
    std::size_t col = 0;
    for (double r : split.real) {
      if (r == 0.0) throw Error(ErrorCode::ZeroRoot, "cannot build a mode for a zero root");
      const double lr = std::log(std::abs(r));
      const double mag = std::exp(-(t - mode_anchor(std::abs(r), t_end)) * lr);
      basis(k, col++) = r > 0.0 ? mag : mag * std::cos(std::numbers::pi * t);
    }
    for (const auto& q : split.pairs) {
      const double rho = std::abs(q);
      const double mag = std::exp(-(t - mode_anchor(rho, t_end)) * std::log(rho));
      const double theta = std::arg(q);
      basis(k, col++) = mag * std::cos(theta * t);
      basis(k, col++) = mag * std::sin(theta * t);
    }
  }
  for (double v : basis.data())
    if (!std::isfinite(v))
      throw Error(ErrorCode::UnstableOverflow, "mode basis overflows over the segment");
  return basis;
}

AmplitudeFit fit_amplitudes(const RootSet& roots, std::span<const double> segment, double dt,
                            std::size_t samples_per_step) {
  const std::size_t n = roots.size();
  if (segment.size() < n)
    throw Error(ErrorCode::SeriesTooShort, "segment shorter than the number of modes");
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");

  const Matrix basis = mode_basis(roots, segment.size(), samples_per_step);
  const auto coeffs = solve_least_squares(basis, segment);

  const auto split = split_conjugates(roots);
  std::vector<complex> amplitudes;
  amplitudes.reserve(n);
  std::size_t col = 0;
  const double t_end =
      static_cast<double>(segment.size() - 1) / static_cast<double>(samples_per_step);
  // Growing modes are anchored at the segment end; move them back to t = 0.
  auto shift = [&](double modulus) {
    return std::exp(mode_anchor(modulus, t_end) * std::log(modulus));
  };
  for (double r : split.real) amplitudes.emplace_back(coeffs[col++] * shift(std::abs(r)), 0.0);
  for (const auto& q : split.pairs) {
    const double s = 0.5 * shift(std::abs(q));
    const complex c(s * coeffs[col], s * coeffs[col + 1]);
    col += 2;
    amplitudes.push_back(c);
    amplitudes.push_back(std::conj(c));
  }

  AmplitudeFit fit;
  fit.roots = roots;
  fit.coefficients = coeffs;
  fit.model = roots_to_model(roots, amplitudes, dt);
  fit.sample_dt = dt / static_cast<double>(samples_per_step);
  fit.rms_error = rms(segment, basis * std::span<const double>(coeffs));
  return fit;
}

InitialConditionFit fit_initial_conditions(const LinearLaw& law,
                                           std::span<const double> segment) {
  const std::size_t n = law.order();
  const std::size_t count = segment.size();
  if (count < n)
    throw Error(ErrorCode::SeriesTooShort, "segment shorter than the law order");
  if (!(std::abs(law.weights[0]) > 1e-12))
    throw Error(ErrorCode::InvalidArgument, "leading weight w0 is (near) zero");

  Matrix basis(count, n);
  std::vector<double> impulse(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    impulse[l] = 1.0;
    std::vector<double> series;
    try {
      series = run_recursion(law, impulse, count);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnstableOverflow) throw;
      throw Error(ErrorCode::UnstableBasis,
                  "impulse response " + std::to_string(l) + " overflows");
    }
    impulse[l] = 0.0;
    for (std::size_t k = 0; k < count; ++k) basis(k, l) = series[k];
  }

  InitialConditionFit fit;
  fit.law = law;
  fit.initial = solve_least_squares(basis, segment);
  fit.rms_error = rms(segment, basis * std::span<const double>(fit.initial));
  return fit;
}

std::vector<double> reconstruct(const AmplitudeFit& fit, std::size_t count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k)
    out[k] = evaluate_model(fit.model, static_cast<double>(k) * fit.sample_dt);
  return out;
}

std::vector<double> reconstruct(const InitialConditionFit& fit, std::size_t count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  return run_recursion(fit.law, fit.initial, count);
}

double accuracy(std::span<const double> original, std::span<const double> simulated) {
  if (original.size() != simulated.size())
    throw Error(ErrorCode::DimensionMismatch, "accuracy: sequences differ in length");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double d = original[i] - simulated[i];
    num += d * d;
    den += original[i] * original[i];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::ZeroSignal, "accuracy: reference signal is zero");
  return 1.0 - std::sqrt(num) / std::sqrt(den);
}

}  // namespace dlaw

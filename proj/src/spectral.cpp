#include "dlaw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dlaw/error.hpp"

namespace dlaw {

namespace {

// Components below this magnitude (on a unit vector) are treated as zero when
// choosing the sign of an eigenvector.
constexpr double kSignThreshold = 1e-10;

void normalize_sign(std::span<double> v) {
  for (double x : v) {
    if (std::abs(x) > kSignThreshold) {
      if (x < 0.0)
        for (double& y : v) y = -y;
      return;
    }
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = a(p, k) = c * akp - s * akq;
    a(k, q) = a(q, k) = s * akp + c * akq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

void check_symmetric(const Matrix& m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, "eigendecompose needs a square matrix");
  const double scale = std::max(1.0, m.frobenius_norm());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * scale)
        throw Error(ErrorCode::InvalidArgument, "matrix is not symmetric");
}

}  // namespace

LinearLaw LinearLaw::from_weights(std::vector<double> weights, std::size_t stride) {
  if (weights.size() < 2)
    throw Error(ErrorCode::InvalidArgument, "a law needs at least two weights");
  const double norm = norm2(weights);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw Error(ErrorCode::InvalidArgument, "weights must be finite and nonzero");
  LinearLaw law;
  for (double& w : weights) w /= norm;
  law.mask.assign(weights.size(), 1);
  law.weights = std::move(weights);
  law.stride = stride;
  return law;
}

CorrelationMatrix correlation(const EmbeddedDataset& dataset) {
  const Matrix& y = dataset.rows;
  const std::size_t k_rows = y.rows();
  const std::size_t width = y.cols();
  if (k_rows == 0) throw Error(ErrorCode::SeriesTooShort, "dataset has no rows");

  Matrix c(width, width);
  for (std::size_t k = 0; k < k_rows; ++k) {
    const auto row = y.row(k);
    for (std::size_t i = 0; i < width; ++i) {
      const double yi = row[i];
      if (yi == 0.0) continue;
      for (std::size_t j = i; j < width; ++j) c(i, j) += yi * row[j];
    }
  }
  const double inv_k = 1.0 / static_cast<double>(k_rows);
  for (std::size_t i = 0; i < width; ++i)
    for (std::size_t j = i; j < width; ++j) {
      const double v = c(i, j) * inv_k;
      c(i, j) = c(j, i) = v;
    }
  return {std::move(c), k_rows};
}

Spectrum eigendecompose(const Matrix& symmetric, const JacobiOptions& options) {
  check_symmetric(symmetric);
  const std::size_t n = symmetric.rows();

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (symmetric(i, j) + symmetric(j, i));
  Matrix v = Matrix::identity(n);

  const double threshold = options.tolerance * a.frobenius_norm();
  bool converged = false;
  for (int sweep = 0; sweep <= options.max_sweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off < threshold) {
      converged = true;
      break;
    }
    if (sweep == options.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible against both diagonal entries: rotating would not change them.
        const double g = 100.0 * std::abs(apq);
        if (std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotate(a, v, p, q);
      }
  }
  if (!converged)
    throw Error(ErrorCode::NoConvergence,
                "Jacobi off-diagonal norm did not fall below tolerance in " +
                    std::to_string(options.max_sweeps) + " sweeps");

  std::vector<std::vector<double>> vecs(n);
  for (std::size_t j = 0; j < n; ++j) {
    vecs[j] = v.column(j);
    normalize_sign(vecs[j]);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Exactly equal eigenvalues are ordered by eigenvector, lexicographically
  // descending, so identical input always produces identical output.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (a(x, x) != a(y, y)) return a(x, x) < a(y, y);
    return std::lexicographical_compare(vecs[y].begin(), vecs[y].end(), vecs[x].begin(),
                                        vecs[x].end());
  });

  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = vecs[order[j]][i];
  }
  return out;
}

Spectrum eigendecompose(const CorrelationMatrix& c, const JacobiOptions& options) {
  return eigendecompose(c.entries, options);
}

Spectrum masked_spectrum(const CorrelationMatrix& c, const EmbeddingConfig& config) {
  config.validate();
  if (c.dimension() != config.width())
    throw Error(ErrorCode::DimensionMismatch, "correlation matrix does not match config");
  const auto lags = config.active_lags();
  if (lags.size() == config.width()) return eigendecompose(c);

  const std::size_t m = lags.size();
  Matrix sub(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) sub(i, j) = c.entries(lags[i], lags[j]);
  Spectrum reduced = eigendecompose(sub);

  Spectrum out;
  out.eigenvalues = reduced.eigenvalues;
  out.eigenvectors = Matrix(config.width(), m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) out.eigenvectors(lags[i], j) = reduced.eigenvectors(i, j);
  return out;
}

LinearLaw extract_law(const Spectrum& spectrum, const EmbeddingConfig& config,
                      std::size_t index) {
  if (index >= spectrum.size())
    throw Error(ErrorCode::InvalidArgument, "eigen index " + std::to_string(index) +
                                                " out of range (" +
                                                std::to_string(spectrum.size()) + " pairs)");
  if (spectrum.eigenvectors.rows() != config.width())
    throw Error(ErrorCode::DimensionMismatch, "spectrum does not match config");

  LinearLaw law;
  law.weights = spectrum.eigenvector(index);
  for (std::size_t i = 0; i < law.weights.size(); ++i)
    if (!config.active(i)) law.weights[i] = 0.0;
  const double norm = norm2(law.weights);
  for (double& w : law.weights) w /= norm;
  normalize_sign(law.weights);
  law.eigenvalue = std::max(0.0, spectrum.eigenvalues[index]);
  law.stride = config.stride;
  law.mask = config.mask;
  law.symmetric = false;
  return law;
}

LinearLaw extract_symmetric_law(const CorrelationMatrix& c, const EmbeddingConfig& config) {
  config.validate();
  const std::size_t n = config.order_n;
  if (c.dimension() != n + 1)
    throw Error(ErrorCode::DimensionMismatch, "correlation matrix does not match config");
  for (std::size_t i = 0; i <= n; ++i)
    if (config.mask[i] != config.mask[n - i])
      throw Error(ErrorCode::InvalidMask, "symmetric extraction needs a palindromic mask");

  // Orthonormal basis of the palindromic subspace: (e_j + e_{n-j})/sqrt2 for
  // j < n-j, plus e_{n/2} for even n.
  std::vector<std::size_t> heads;
  for (std::size_t j = 0; 2 * j <= n; ++j)
    if (config.mask[j]) heads.push_back(j);
  const std::size_t m = heads.size();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  Matrix basis(n + 1, m);
  for (std::size_t b = 0; b < m; ++b) {
    const std::size_t j = heads[b];
    if (2 * j == n) {
      basis(j, b) = 1.0;
    } else {
      basis(j, b) = inv_sqrt2;
      basis(n - j, b) = inv_sqrt2;
    }
  }
  const Matrix reduced = basis.transposed() * c.entries * basis;
  Spectrum rs = eigendecompose(reduced);

  std::vector<double> w(n + 1, 0.0);
  for (std::size_t b = 0; b < m; ++b) {
    const std::size_t j = heads[b];
    const double z = rs.eigenvectors(b, 0);
    if (2 * j == n) {
      w[j] = z;
    } else {
      w[j] = z * inv_sqrt2;
      w[n - j] = w[j];
    }
  }
  const double norm = norm2(w);
  for (double& x : w) x /= norm;
  normalize_sign(w);

  LinearLaw law;
  law.weights = std::move(w);
  law.eigenvalue = std::max(0.0, rs.eigenvalues[0]);
  law.stride = config.stride;
  law.mask = config.mask;
  law.symmetric = true;
  return law;
}

std::vector<double> law_residuals(const EmbeddedDataset& dataset, const LinearLaw& law) {
  if (law.weights.size() != dataset.rows.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "law has " + std::to_string(law.weights.size()) + " weights, dataset width " +
                    std::to_string(dataset.rows.cols()));
  return dataset.rows * std::span<const double>(law.weights);
}

double rayleigh_quotient(const Matrix& c, std::span<const double> w) {
  const auto cw = c * w;
  return dot(w, cw) / dot(w, w);
}

}  // namespace dlaw

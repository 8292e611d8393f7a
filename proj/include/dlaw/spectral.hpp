#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dlaw/embedding.hpp"
#include "dlaw/matrix.hpp"

namespace dlaw {

/// Uncentered second-moment matrix Y^T Y / K of an embedded dataset.
struct CorrelationMatrix {
  Matrix entries;
  std::size_t sample_count = 0;

  std::size_t dimension() const noexcept { return entries.rows(); }
  double trace() const { return entries.trace(); }
};

/// Eigenpairs in ascending eigenvalue order; eigenvectors are the columns.
struct Spectrum {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;

  std::size_t size() const noexcept { return eigenvalues.size(); }
  std::vector<double> eigenvector(std::size_t j) const { return eigenvectors.column(j); }
};

/// A weight vector w with Yw ~ 0. Unit norm, zero on masked lags.
struct LinearLaw {
  std::vector<double> weights;
  double eigenvalue = 0.0;
  std::size_t stride = 1;
  std::vector<std::uint8_t> mask;
  bool symmetric = false;

  std::size_t order() const noexcept { return weights.size() - 1; }

  /// Builds a dense, unmasked law from raw weights, normalizing to unit norm.
  static LinearLaw from_weights(std::vector<double> weights, std::size_t stride = 1);
};

CorrelationMatrix correlation(const EmbeddedDataset& dataset);

struct JacobiOptions {
  double tolerance = 1e-12;  // off-diagonal threshold relative to ||C||_F
  int max_sweeps = 100;
};

/// Cyclic Jacobi eigensolver for a symmetric matrix. Eigenvectors are sign
/// normalized (first component above 1e-10 in magnitude positive); exactly
/// equal eigenvalues are ordered by descending eigenvector, lexicographically.
Spectrum eigendecompose(const Matrix& symmetric, const JacobiOptions& options = {});
Spectrum eigendecompose(const CorrelationMatrix& c, const JacobiOptions& options = {});

/// Spectrum restricted to the active lags of the config; masked lags carry
/// zeros in every eigenvector. size() equals the number of active lags.
Spectrum masked_spectrum(const CorrelationMatrix& c, const EmbeddingConfig& config);

/// Law from the index-th smallest eigenpair.
LinearLaw extract_law(const Spectrum& spectrum, const EmbeddingConfig& config,
                      std::size_t index = 0);

/// Minimizes w^T C w over unit vectors with w[n-i] == w[i].
LinearLaw extract_symmetric_law(const CorrelationMatrix& c, const EmbeddingConfig& config);

/// xi_k = (Y w)_k.
std::vector<double> law_residuals(const EmbeddedDataset& dataset, const LinearLaw& law);

double rayleigh_quotient(const Matrix& c, std::span<const double> w);

}  // namespace dlaw

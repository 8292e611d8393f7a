#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dlaw/lawforms.hpp"
#include "dlaw/matrix.hpp"
#include "dlaw/spectral.hpp"

namespace dlaw {

/// Amplitudes of the exponential modes of a root set, fitted to a segment.
/// `coefficients` is the real-basis solution: one entry per real root, then
/// (cos, sin) per conjugate pair, in RootSet order.
struct AmplitudeFit {
  ContinuousModel model;
  RootSet roots;
  std::vector<double> coefficients;
  double sample_dt = 1.0;  // seconds between segment samples
  double rms_error = 0.0;
};

/// Optimal starting values for the recursion of a law.
struct InitialConditionFit {
  LinearLaw law;
  std::vector<double> initial;  // oldest first, length n
  double rms_error = 0.0;
};

/// Real basis for the modes of `roots`, sampled at t_k = k / samples_per_step
/// law steps: q^{-t} for real positive q, |q|^{-t} cos(pi t) for real negative
/// q, and rho^{-t} cos(theta t), rho^{-t} sin(theta t) for q = rho e^{i theta}.
/// Growing modes (|q| < 1) have their magnitude referenced to the last sample
/// so every column stays bounded by 1.
Matrix mode_basis(const RootSet& roots, std::size_t count, std::size_t samples_per_step = 1);

/// Least-squares solution of B x ~ y via column-equilibrated normal equations,
/// with a ridge retry when the Cholesky pivots collapse and one step of
/// iterative refinement.
std::vector<double> solve_least_squares(const Matrix& b, std::span<const double> y);

/// `dt` is the law step in seconds; the segment is sampled
/// `samples_per_step` times per law step (the embedding stride).
AmplitudeFit fit_amplitudes(const RootSet& roots, std::span<const double> segment,
                            double dt = 1.0, std::size_t samples_per_step = 1);

InitialConditionFit fit_initial_conditions(const LinearLaw& law,
                                           std::span<const double> segment);

std::vector<double> reconstruct(const AmplitudeFit& fit, std::size_t count);
std::vector<double> reconstruct(const InitialConditionFit& fit, std::size_t count);

/// A = 1 - |X - X_sym| / |X| with the Euclidean norm.
double accuracy(std::span<const double> original, std::span<const double> simulated);

}  // namespace dlaw

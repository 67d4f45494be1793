// spectral_ops.hpp
// Deterministic Fourier-multiplier operators on the torus: Sobolev norms,
// gradient/Laplacian/divergence, Biot-Savart and its fractional variants,
// the mean-free inverse gradient, heat semigroup, and dealiasing.

#pragma once

#include <numbers>

#include "tspde/fourier_grid.hpp"

namespace tspde {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double four_pi_sq = two_pi * two_pi;

// ||f||_{H^s}^2 = |f_0|^2 + sum_{k != 0} |k|^{2s} |f_k|^2, all components.
double sobolev_norm(const SpectralField& f, double s);
double l2_norm(const SpectralField& f);

// H^{-s} distance between two fields of identical shape, without forming
// the difference field.
double sobolev_distance(const SpectralField& f, const SpectralField& g, double s);

// Real L^2 pairing <f, g> = sum_k f_k conj(g_k) (components summed).
double inner_product(const SpectralField& f, const SpectralField& g);

SpectralField gradient(const SpectralField& f);            // scalar -> vector
SpectralField laplacian(const SpectralField& f);           // any shape
SpectralField divergence(const SpectralField& v);          // vector -> scalar
SpectralField partial_derivative(const SpectralField& f, int axis);
SpectralField curl_2d(const SpectralField& v);             // d1 v2 - d2 v1

// Spectral divergence residual max_k |k . v_k| (0 for divergence-free).
double divergence_defect(const SpectralField& v);

// u = K * omega with K the Biot-Savart kernel: u_k = i k^perp/(2 pi |k|^2),
// k^perp = (k2, -k1); the mean mode is projected out. d = 2 only.
SpectralField biot_savart(const SpectralField& omega);

// Fractional kernel u_k = 2 pi i k^perp (4 pi^2 |k|^2)^{-(1+beta)/2} w_k,
// beta in (0, 1]; beta = 1 coincides with biot_savart. d = 2 only.
SpectralField k_beta_convolve(const SpectralField& omega, double beta);

// Mean-free inverse gradient: grad (-Lap)^{-1} (f - mean f); satisfies
// div(inv_gradient f) = -f + mean f.
SpectralField inv_gradient(const SpectralField& f);

// Heat semigroup exp(t * delta * Lap): multiply mode k by
// exp(-4 pi^2 delta |k|^2 t). Requires t >= 0, delta > 0.
SpectralField heat_multiplier(const SpectralField& f, double t, double delta);

// Cached per-mode heat factors for repeated stepping with fixed t * delta.
std::vector<double> make_heat_factors(const FourierGrid& grid, double t_times_delta);
void apply_mode_factors(SpectralField& f, const std::vector<double>& factors);

// Two-thirds rule: zero every mode with any |k_i| > N/3.
void dealias_inplace(SpectralField& f);
SpectralField dealias(const SpectralField& f);

// Quadrature norms of the physical samples (mean quadrature on the grid).
double physical_l2(const SpectralField& f);
double physical_max_abs(const SpectralField& f);

}  // namespace tspde

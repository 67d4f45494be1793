// fft.hpp
// FFTW-backed transforms between full complex spectra and real physical
// samples, plus exact (zero-padded) pseudospectral products.
//
// Forward transform: coeff_k = N^{-d} sum_x f(x) exp(-2*pi*i k.x/N); inverse
// is the plain synthesis sum, so the pair is an exact round trip. Physical
// data is kept real (r2c/c2r), which makes conjugate symmetry structural on
// every product output.

#pragma once

#include <span>
#include <vector>

#include "tspde/fourier_grid.hpp"

namespace tspde {

// Transform one component of a spectrum to N_phys^d real samples.
// n_phys >= grid.n embeds the spectrum in a finer grid (zero padding).
void spectrum_to_physical(const SpectralField& f, int comp, int n_phys, std::vector<double>& out);

// Inverse of the above: forward-transform samples on an n_phys^d grid and
// keep the modes representable on `out.grid()` (coefficients at the target
// Nyquist index receive the fold of the +/-Nyquist pair).
void physical_to_spectrum(std::span<const double> phys, int dim, int n_phys, SpectralField& out, int comp);

// Real samples of every component on the field's own grid.
std::vector<double> to_physical(const SpectralField& f, int comp = 0);

// Build a scalar field from N^d real samples.
SpectralField from_physical(const FourierGrid& grid, std::span<const double> samples);

// Largest |k_i| carrying a nonzero coefficient (0 for the zero field).
int max_support_component(const SpectralField& f, double tol = 0.0);

// Pointwise product of two scalar fields, computed on a grid fine enough
// that no aliasing occurs (padding to 2N when the supports require it).
// The result is truncated back to the common grid; callers dealias as
// appropriate for their band discipline.
SpectralField pseudospectral_product(const SpectralField& f, const SpectralField& g);

// Test-only reference: direct O(points^2) convolution of full spectra.
// fold_all = true reproduces grid-sampling semantics (every product mode is
// folded onto the grid); false keeps only representable modes, folding just
// the +/-Nyquist pair, which is the truncation the padded product performs.
SpectralField direct_convolution(const SpectralField& f, const SpectralField& g, bool fold_all = true);

}  // namespace tspde

// theta_spectrum.hpp
// The noise weights theta_k on the punctured lattice: symmetric across
// shells (theta_k = theta_l whenever |k| = |l|) and normalized to unit l2
// norm. Factories cover annulus, ball and Kraichnan-type spectra.

#pragma once

#include <string>
#include <vector>

#include "tspde/fourier_grid.hpp"

namespace tspde {

struct ThetaEntry {
    Wavevector k{0, 0, 0};
    double weight = 0.0;  // nonnegative
};

class ThetaSpectrum {
  public:
    ThetaSpectrum() = default;

    // Normalizes to unit l2 norm and verifies shell symmetry.
    static ThetaSpectrum from_weights(int dim, std::vector<ThetaEntry> entries);

    // Test/diagnostic hook: skips the symmetry check (still normalizes).
    static ThetaSpectrum from_weights_unchecked(int dim, std::vector<ThetaEntry> entries);

    int dim() const { return dim_; }
    const std::vector<ThetaEntry>& entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }

    double l2_norm() const;
    double linf_norm() const;
    int max_component() const;  // largest |k_i| over the support

    // Largest weight discrepancy within any |k|^2 shell (0 when symmetric).
    double symmetry_defect() const;
    bool is_symmetric(double tol = 1e-12) const { return symmetry_defect() <= tol; }

    std::string to_json() const;
    static ThetaSpectrum from_json(const std::string& text);

  private:
    int dim_ = 2;
    std::vector<ThetaEntry> entries_;  // sorted lexicographically by k
};

// Annulus family: weights |k|^{-a} on {n <= |k| <= 2n}, then normalized.
ThetaSpectrum make_theta_band(int n, double a, int dim = 2);

// Ball family: weights |k|^{-a} on {1 <= |k| <= n}, then normalized.
ThetaSpectrum make_theta_ball(int n, double a, int dim = 2);

// Kraichnan-type spectrum: theta_k^2 = k0^zeta |k|^{-(d+zeta)} on
// {k0 <= |k| <= k_max}, then normalized. zeta in (0,2), k_max > k0.
ThetaSpectrum make_theta_kraichnan(double k0, double zeta, double k_max, int dim = 2);

// Pre-normalization sup weight of the Kraichnan family (k0^{-d/2} when the
// lattice attains |k| = k0); exposed for tests.
double kraichnan_raw_linf(double k0, double zeta, double k_max, int dim = 2);

}  // namespace tspde

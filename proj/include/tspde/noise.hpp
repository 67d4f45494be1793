// noise.hpp
// Divergence-free Fourier transport noise W built from (kappa, theta): the
// unit frame a_{k,i} orthogonal to k, complex Brownian increments with the
// conjugation constraint, assembly of real vector-field increments on a
// grid, the transport application (dW . grad) f, and the Stratonovich-Ito
// corrector whose eigenvalues realize the enhanced viscosity kappa * Lap.

#pragma once

#include <array>
#include <vector>

#include "tspde/fourier_grid.hpp"
#include "tspde/rng.hpp"
#include "tspde/theta_spectrum.hpp"

namespace tspde {

using FrameVector = std::array<double, 3>;

struct NoiseConfig {
    double kappa = 1.0;
    ThetaSpectrum theta;

    NoiseConfig() = default;
    NoiseConfig(double kappa_, ThetaSpectrum theta_);

    int dim() const { return theta.dim(); }
    // sqrt(2 kappa) in 2D, sqrt(kappa d/(d-1)) in higher dimension
    double amplitude() const;
};

// Orthonormal frame of k^perp, constant on {k, -k} pairs. In 2D the single
// vector is k^perp/|k| evaluated on the positive half-lattice; in 3D a
// deterministic Gram-Schmidt frame from a fixed reference direction.
std::vector<FrameVector> frame_vectors(const Wavevector& k, int dim);

// True on the canonical half-lattice (first nonzero component positive).
bool positive_half_lattice(const Wavevector& k, int dim);

// theta support bound to a grid: half-lattice representatives with their
// frames and grid positions. Throws when some support mode is not
// representable (any |k_i| > N/2); the remedy is a finer grid.
struct BoundNoise {
    struct PairEntry {
        Wavevector k{0, 0, 0};
        double theta = 0.0;
        std::array<FrameVector, 2> frame{};  // (dim-1) vectors used
        std::size_t flat_pos = 0;            // grid slot of +k
        std::size_t flat_neg = 0;            // grid slot of -k
        bool self_conjugate = false;         // -k == k on the grid
    };
    FourierGrid grid;
    double kappa = 0.0;
    double amplitude = 0.0;
    int dim = 2;
    int max_component = 0;
    std::vector<PairEntry> pairs;

    std::size_t draws_per_step() const { return pairs.size() * std::size_t(dim - 1); }
};

BoundNoise bind_noise(const NoiseConfig& cfg, const FourierGrid& grid);

// One Euler-Maruyama increment of W over dt, as the full vector spectrum on
// the bound grid. Real in physical space and spectrally divergence free.
// Draw j of step `step` uses counter step * draws_per_step + j, so samples
// are reproducible and order-independent.
SpectralField sample_increment(const BoundNoise& noise, double dt, const rng::GaussianStream& stream,
                               std::uint64_t step);

// (dW . grad) f computed as div(dW f) with alias-free products, then
// dealiased. Transport by a divergence-free field: output has zero mean.
SpectralField transport_apply(const SpectralField& dw, const SpectralField& f);

// Applies one increment to many fields: the increment's physical samples
// are synthesized once and shared across apply() calls.
class TransportApplier {
  public:
    // state_band: largest |k_i| the applied fields may carry (their dealias
    // band); fixes the product grid once.
    TransportApplier(const SpectralField& dw, int state_band);
    SpectralField apply(const SpectralField& f) const;

  private:
    FourierGrid grid_;
    int n_phys_;
    std::vector<std::vector<double>> dw_phys_;
};

// Eigenvalue of the Stratonovich-Ito corrector on mode l (a lattice sum
// over the theta support). Under symmetry and unit l2 norm this equals
// -4 pi^2 kappa |l|^2.
double ito_corrector_eigenvalue(const NoiseConfig& cfg, const Wavevector& l);

// Works on arbitrary (possibly asymmetric) weights; used by the invariant
// detector tests.
double ito_corrector_eigenvalue_raw(double kappa, int dim, const std::vector<ThetaEntry>& entries,
                                    const Wavevector& l);

// Closed-form covariance E[W(1, x+z) (x) W(1, x)] as a dim x dim matrix.
std::array<std::array<double, 3>, 3> noise_covariance(const NoiseConfig& cfg,
                                                      const std::array<double, 3>& z);

}  // namespace tspde

// models.hpp
// The simulated PDE family. Every model evolves one or two real scalar
// fields by d(state) = delta * Lap(state) + F(state) - dW.grad(state), with
// per-field diffusivity delta and drift F as below (kappa is the noise
// intensity; the deterministic limits use the same deltas):
//
//   NavierStokesVorticity: F = -u.grad(w), u = K*w;          delta = kappa + nu
//   Boussinesq:            gamma: F = -u.grad(gamma);        delta = kappa + nu
//                          w:     F = -u.grad(w) + d1 gamma; delta = kappa
//   MSQG:                  F = -(K_beta*w).grad(w);          delta = kappa
//   KellerSegel (state u = rho - rho_bar):
//                          F = rho_bar u - g div(u invgrad u); delta = 1 + kappa
//   LinearTransport:       F = 0;                            delta = kappa
//   TransportDiffusion:    F = 0;                            delta = kappa + nu

#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tspde/fourier_grid.hpp"

namespace tspde {

struct NavierStokesSpec {
    double nu = 0.0;  // >= 0
};

struct BoussinesqSpec {
    double nu = 0.0;  // >= 0, acts on the transported scalar only
};

struct MsqgSpec {
    double beta = 0.5;  // in (0, 1]
};

struct KellerSegelSpec {
    double rho_bar = 1.0;        // > 0, conserved mean of rho
    double cutoff_alpha = 0.9;   // in (0, 1)
    double cutoff_radius = 1.0;  // R > 0
    bool cutoff_enabled = false;
};

struct LinearTransportSpec {};

struct TransportDiffusionSpec {
    double nu = 0.01;  // > 0
};

using ModelSpec = std::variant<NavierStokesSpec, BoussinesqSpec, MsqgSpec, KellerSegelSpec,
                               LinearTransportSpec, TransportDiffusionSpec>;

void validate_model(const ModelSpec& model);
std::string model_name(const ModelSpec& model);

// Number of evolved scalar fields (2 for Boussinesq: gamma then omega).
int field_count(const ModelSpec& model);

struct State {
    std::vector<SpectralField> fields;
};

State make_state(const ModelSpec& model, const FourierGrid& grid);

// Per-field diffusivity of the Ito form; identical for the stochastic
// equation and its deterministic limit.
std::vector<double> effective_diffusivities(const ModelSpec& model, double kappa);

// Drift F(state) (everything except the diffusive part and the noise).
// Outputs are dealiased; divergence-form terms have exactly zero mean.
State nonlinearity(const ModelSpec& model, const State& state);

// Piecewise-linear cutoff: 1 on [0,R], 1-(x-R) on [R,R+1], 0 beyond.
double cutoff_profile(double x, double radius);

// g_R(||u||_{H^{-alpha}}) for the Keller-Segel cutoff.
double keller_segel_cutoff(const KellerSegelSpec& spec, const SpectralField& u);

// --- deterministic initial data library ---

// Band-limited shear-like vorticity profile (modes within |k_i| <= 2).
SpectralField shear_layer(const FourierGrid& grid, double amplitude = 1.0);

// Periodic bump with Gaussian-like spectrum exp(-2 pi^2 sigma^2 |k|^2),
// scaled so the total mass is `mass`; mean included (mode 0 = mass).
SpectralField gaussian_bump(const FourierGrid& grid, double mass, double sigma);

// Mean-zero random field with unit L2 norm, modes within |k| <= band.
SpectralField random_band_limited(const FourierGrid& grid, int band, std::uint64_t seed);

// Two-mode bounded field used by the mixing probes.
SpectralField two_mode_field(const FourierGrid& grid);

}  // namespace tspde

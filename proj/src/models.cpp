#include "tspde/models.hpp"

#include <cmath>

#include "tspde/fft.hpp"
#include "tspde/noise.hpp"
#include "tspde/rng.hpp"
#include "tspde/spectral_ops.hpp"

namespace tspde {

namespace {

template <class... Ts>
struct Overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

// Advection term -u.grad(f) in conservative form -div(u f) for
// divergence-free u; exact zero mean, dealiased.
SpectralField advection(const SpectralField& u, const SpectralField& f) {
    const FourierGrid& grid = f.grid();
    SpectralField flux = SpectralField::vector(grid);
    std::vector<double> pf, pu;
    spectrum_to_physical(f, 0, grid.n, pf);
    for (int a = 0; a < grid.dim; ++a) {
        spectrum_to_physical(u, a, grid.n, pu);
        for (std::size_t i = 0; i < pu.size(); ++i) pu[i] *= pf[i];
        physical_to_spectrum(pu, grid.dim, grid.n, flux, a);
    }
    SpectralField out = divergence(flux);
    out *= -1.0;
    dealias_inplace(out);
    return out;
}

}  // namespace

void validate_model(const ModelSpec& model) {
    std::visit(Overload{
                   [](const NavierStokesSpec& m) {
                       if (m.nu < 0.0) throw std::invalid_argument("NavierStokes: nu must be >= 0");
                   },
                   [](const BoussinesqSpec& m) {
                       if (m.nu < 0.0) throw std::invalid_argument("Boussinesq: nu must be >= 0");
                   },
                   [](const MsqgSpec& m) {
                       if (!(m.beta > 0.0 && m.beta <= 1.0))
                           throw std::invalid_argument("MSQG: beta must be in (0,1]");
                   },
                   [](const KellerSegelSpec& m) {
                       if (!(m.rho_bar > 0.0)) throw std::invalid_argument("KellerSegel: rho_bar must be > 0");
                       if (!(m.cutoff_alpha > 0.0 && m.cutoff_alpha < 1.0))
                           throw std::invalid_argument("KellerSegel: cutoff_alpha must be in (0,1)");
                       if (!(m.cutoff_radius > 0.0))
                           throw std::invalid_argument("KellerSegel: cutoff_radius must be > 0");
                   },
                   [](const LinearTransportSpec&) {},
                   [](const TransportDiffusionSpec& m) {
                       if (!(m.nu > 0.0)) throw std::invalid_argument("TransportDiffusion: nu must be > 0");
                   },
               },
               model);
}

std::string model_name(const ModelSpec& model) {
    return std::visit(Overload{[](const NavierStokesSpec&) { return std::string("navier-stokes"); },
                               [](const BoussinesqSpec&) { return std::string("boussinesq"); },
                               [](const MsqgSpec&) { return std::string("msqg"); },
                               [](const KellerSegelSpec&) { return std::string("keller-segel"); },
                               [](const LinearTransportSpec&) { return std::string("transport"); },
                               [](const TransportDiffusionSpec&) { return std::string("transport-diffusion"); }},
                      model);
}

int field_count(const ModelSpec& model) {
    return std::holds_alternative<BoussinesqSpec>(model) ? 2 : 1;
}

State make_state(const ModelSpec& model, const FourierGrid& grid) {
    State s;
    for (int i = 0; i < field_count(model); ++i) s.fields.push_back(SpectralField::scalar(grid));
    return s;
}

std::vector<double> effective_diffusivities(const ModelSpec& model, double kappa) {
    return std::visit(
        Overload{[&](const NavierStokesSpec& m) { return std::vector<double>{kappa + m.nu}; },
                 [&](const BoussinesqSpec& m) { return std::vector<double>{kappa + m.nu, kappa}; },
                 [&](const MsqgSpec&) { return std::vector<double>{kappa}; },
                 [&](const KellerSegelSpec&) { return std::vector<double>{1.0 + kappa}; },
                 [&](const LinearTransportSpec&) { return std::vector<double>{kappa}; },
                 [&](const TransportDiffusionSpec& m) { return std::vector<double>{kappa + m.nu}; }},
        model);
}

double cutoff_profile(double x, double radius) {
    if (x <= radius) return 1.0;
    if (x >= radius + 1.0) return 0.0;
    return 1.0 - (x - radius);
}

double keller_segel_cutoff(const KellerSegelSpec& spec, const SpectralField& u) {
    return cutoff_profile(sobolev_norm(u, -spec.cutoff_alpha), spec.cutoff_radius);
}

State nonlinearity(const ModelSpec& model, const State& state) {
    State out;
    std::visit(Overload{
                   [&](const NavierStokesSpec&) {
                       const SpectralField& w = state.fields[0];
                       out.fields.push_back(advection(biot_savart(w), w));
                   },
                   [&](const BoussinesqSpec&) {
                       const SpectralField& gamma = state.fields[0];
                       const SpectralField& w = state.fields[1];
                       SpectralField u = biot_savart(w);
                       out.fields.push_back(advection(u, gamma));
                       SpectralField fw = advection(u, w);
                       fw += partial_derivative(gamma, 0);
                       out.fields.push_back(std::move(fw));
                   },
                   [&](const MsqgSpec& m) {
                       const SpectralField& w = state.fields[0];
                       out.fields.push_back(advection(k_beta_convolve(w, m.beta), w));
                   },
                   [&](const KellerSegelSpec& m) {
                       const SpectralField& u = state.fields[0];
                       SpectralField f = u;
                       f *= m.rho_bar;
                       const double g = m.cutoff_enabled ? keller_segel_cutoff(m, u) : 1.0;
                       if (g > 0.0) {
                           // -g * div(u invgrad(u)); invgrad(u) is not
                           // divergence free, so form the flux directly.
                           const FourierGrid& grid = u.grid();
                           SpectralField chemo = inv_gradient(u);
                           SpectralField flux = SpectralField::vector(grid);
                           std::vector<double> puf, pc;
                           spectrum_to_physical(u, 0, grid.n, puf);
                           for (int a = 0; a < grid.dim; ++a) {
                               spectrum_to_physical(chemo, a, grid.n, pc);
                               for (std::size_t i = 0; i < pc.size(); ++i) pc[i] *= puf[i];
                               physical_to_spectrum(pc, grid.dim, grid.n, flux, a);
                           }
                           f.add_scaled(-g, divergence(flux));
                       }
                       dealias_inplace(f);
                       out.fields.push_back(std::move(f));
                   },
                   [&](const LinearTransportSpec&) {
                       out.fields.push_back(SpectralField::scalar(state.fields[0].grid()));
                   },
                   [&](const TransportDiffusionSpec&) {
                       out.fields.push_back(SpectralField::scalar(state.fields[0].grid()));
                   },
               },
               model);
    return out;
}

SpectralField shear_layer(const FourierGrid& grid, double amplitude) {
    SpectralField w = SpectralField::scalar(grid);
    auto set_pair = [&](int kx, int ky, Complex v) {
        w.set_mode(0, {kx, ky, 0}, v);
        w.set_mode(0, {-kx, -ky, 0}, std::conj(v));
    };
    // cos(2 pi y) + 0.5 cos(4 pi y) + 0.25 sin(2 pi x) + 0.2 cos(2 pi (x+y))
    set_pair(0, 1, Complex(0.5, 0.0));
    set_pair(0, 2, Complex(0.25, 0.0));
    set_pair(1, 0, Complex(0.0, -0.125));
    set_pair(1, 1, Complex(0.1, 0.0));
    w *= amplitude;
    return w;
}

SpectralField gaussian_bump(const FourierGrid& grid, double mass, double sigma) {
    SpectralField f = SpectralField::scalar(grid);
    const std::size_t np = grid.num_points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        const double k2 = grid.wavevector_norm_sq(flat);
        f.at(0, flat) = mass * std::exp(-2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma * k2);
    }
    dealias_inplace(f);
    return f;
}

SpectralField random_band_limited(const FourierGrid& grid, int band, std::uint64_t seed) {
    SpectralField f = SpectralField::scalar(grid);
    rng::GaussianStream stream{rng::derive_key(seed, 0x1d5fa11ULL)};
    std::uint64_t counter = 0;
    const std::size_t np = grid.num_points();
    for (std::size_t flat = 1; flat < np; ++flat) {
        Wavevector k = grid.wavevector(flat);
        if (!positive_half_lattice(k, grid.dim)) continue;
        if (grid.wavevector_norm_sq(flat) > double(band) * band) {
            ++counter;
            continue;
        }
        const auto [x, y] = stream.normal_pair(counter++);
        Wavevector mk{-k[0], -k[1], -k[2]};
        f.set_mode(0, k, Complex(x, y));
        f.set_mode(0, mk, Complex(x, -y));
    }
    const double nrm = l2_norm(f);
    if (nrm > 0.0) f *= 1.0 / nrm;
    return f;
}

SpectralField two_mode_field(const FourierGrid& grid) {
    SpectralField f = SpectralField::scalar(grid);
    // cos(2 pi (x+y)) - cos(2 pi (x-y)); bounded by 2, mean zero
    f.set_mode(0, {1, 1, 0}, Complex(0.5, 0.0));
    f.set_mode(0, {-1, -1, 0}, Complex(0.5, 0.0));
    f.set_mode(0, {1, -1, 0}, Complex(-0.5, 0.0));
    f.set_mode(0, {-1, 1, 0}, Complex(-0.5, 0.0));
    return f;
}

}  // namespace tspde

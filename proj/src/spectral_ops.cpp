#include "tspde/spectral_ops.hpp"

#include <cmath>
#include <stdexcept>

#include "tspde/fft.hpp"

namespace tspde {

double sobolev_norm(const SpectralField& f, double s) {
    const FourierGrid& g = f.grid();
    const std::size_t np = f.points();
    double sum = 0.0;
    for (std::size_t flat = 0; flat < np; ++flat) {
        const double k2 = g.wavevector_norm_sq(flat);
        const double w = (flat == 0) ? 1.0 : std::pow(k2, s);
        for (int c = 0; c < f.components(); ++c) sum += w * std::norm(f.at(c, flat));
    }
    return std::sqrt(sum);
}

double l2_norm(const SpectralField& f) { return sobolev_norm(f, 0.0); }

double sobolev_distance(const SpectralField& f, const SpectralField& g, double s) {
    if (f.grid() != g.grid() || f.components() != g.components())
        throw std::invalid_argument("sobolev_distance: shape mismatch");
    const FourierGrid& gr = f.grid();
    const std::size_t np = f.points();
    double sum = 0.0;
    for (std::size_t flat = 0; flat < np; ++flat) {
        const double k2 = gr.wavevector_norm_sq(flat);
        const double w = (flat == 0) ? 1.0 : std::pow(k2, s);
        for (int c = 0; c < f.components(); ++c) sum += w * std::norm(f.at(c, flat) - g.at(c, flat));
    }
    return std::sqrt(sum);
}

double inner_product(const SpectralField& f, const SpectralField& g) {
    if (f.grid() != g.grid() || f.components() != g.components())
        throw std::invalid_argument("inner_product: shape mismatch");
    double sum = 0.0;
    const std::size_t np = f.points();
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t flat = 0; flat < np; ++flat)
            sum += (f.at(c, flat) * std::conj(g.at(c, flat))).real();
    return sum;
}

SpectralField partial_derivative(const SpectralField& f, int axis) {
    SpectralField out(f.grid(), f.components());
    const FourierGrid& g = f.grid();
    const std::size_t np = f.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        const Complex m(0.0, two_pi * g.wavevector(flat)[axis]);
        for (int c = 0; c < f.components(); ++c) out.at(c, flat) = m * f.at(c, flat);
    }
    return out;
}

SpectralField gradient(const SpectralField& f) {
    if (f.components() != 1) throw std::invalid_argument("gradient: scalar field expected");
    const FourierGrid& g = f.grid();
    SpectralField out = SpectralField::vector(g);
    const std::size_t np = f.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        const Complex v = f.at(0, flat);
        for (int a = 0; a < g.dim; ++a) out.at(a, flat) = Complex(0.0, two_pi * k[a]) * v;
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out(f.grid(), f.components());
    const FourierGrid& g = f.grid();
    const std::size_t np = f.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        const double m = -four_pi_sq * g.wavevector_norm_sq(flat);
        for (int c = 0; c < f.components(); ++c) out.at(c, flat) = m * f.at(c, flat);
    }
    return out;
}

SpectralField divergence(const SpectralField& v) {
    const FourierGrid& g = v.grid();
    if (v.components() != g.dim) throw std::invalid_argument("divergence: vector field expected");
    SpectralField out = SpectralField::scalar(g);
    const std::size_t np = v.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        Complex s(0.0);
        for (int a = 0; a < g.dim; ++a) s += Complex(0.0, two_pi * k[a]) * v.at(a, flat);
        out.at(0, flat) = s;
    }
    return out;
}

SpectralField curl_2d(const SpectralField& v) {
    const FourierGrid& g = v.grid();
    if (g.dim != 2 || v.components() != 2) throw std::invalid_argument("curl_2d: 2D vector field expected");
    SpectralField out = SpectralField::scalar(g);
    const std::size_t np = v.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        out.at(0, flat) = Complex(0.0, two_pi) * (double(k[0]) * v.at(1, flat) - double(k[1]) * v.at(0, flat));
    }
    return out;
}

double divergence_defect(const SpectralField& v) {
    const FourierGrid& g = v.grid();
    if (v.components() != g.dim) throw std::invalid_argument("divergence_defect: vector field expected");
    double worst = 0.0;
    const std::size_t np = v.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        Complex s(0.0);
        for (int a = 0; a < g.dim; ++a) s += double(k[a]) * v.at(a, flat);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

SpectralField biot_savart(const SpectralField& omega) {
    const FourierGrid& g = omega.grid();
    if (g.dim != 2 || omega.components() != 1) throw std::invalid_argument("biot_savart: 2D scalar expected");
    SpectralField u = SpectralField::vector(g);
    const std::size_t np = omega.points();
    for (std::size_t flat = 1; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        const Complex m = Complex(0.0, 1.0) / (two_pi * k2) * omega.at(0, flat);
        u.at(0, flat) = double(k[1]) * m;   // k^perp = (k2, -k1)
        u.at(1, flat) = -double(k[0]) * m;
    }
    return u;
}

SpectralField k_beta_convolve(const SpectralField& omega, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("k_beta_convolve: beta must be in (0,1]");
    const FourierGrid& g = omega.grid();
    if (g.dim != 2 || omega.components() != 1) throw std::invalid_argument("k_beta_convolve: 2D scalar expected");
    SpectralField u = SpectralField::vector(g);
    const std::size_t np = omega.points();
    for (std::size_t flat = 1; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        const double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
        const Complex m =
            Complex(0.0, two_pi) * std::pow(four_pi_sq * k2, -0.5 * (1.0 + beta)) * omega.at(0, flat);
        u.at(0, flat) = double(k[1]) * m;
        u.at(1, flat) = -double(k[0]) * m;
    }
    return u;
}

SpectralField inv_gradient(const SpectralField& f) {
    const FourierGrid& g = f.grid();
    if (f.components() != 1) throw std::invalid_argument("inv_gradient: scalar field expected");
    SpectralField out = SpectralField::vector(g);
    const std::size_t np = f.points();
    for (std::size_t flat = 1; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        const double k2 = g.wavevector_norm_sq(flat);
        const Complex m = Complex(0.0, 1.0) / (two_pi * k2) * f.at(0, flat);
        for (int a = 0; a < g.dim; ++a) out.at(a, flat) = double(k[a]) * m;
    }
    return out;
}

SpectralField heat_multiplier(const SpectralField& f, double t, double delta) {
    if (t < 0.0) throw std::invalid_argument("heat_multiplier: t must be >= 0");
    if (delta <= 0.0) throw std::invalid_argument("heat_multiplier: delta must be > 0");
    SpectralField out = f;
    auto factors = make_heat_factors(f.grid(), t * delta);
    apply_mode_factors(out, factors);
    return out;
}

std::vector<double> make_heat_factors(const FourierGrid& grid, double t_times_delta) {
    std::vector<double> factors(grid.num_points());
    for (std::size_t flat = 0; flat < factors.size(); ++flat)
        factors[flat] = std::exp(-four_pi_sq * t_times_delta * grid.wavevector_norm_sq(flat));
    return factors;
}

void apply_mode_factors(SpectralField& f, const std::vector<double>& factors) {
    if (factors.size() != f.points()) throw std::invalid_argument("apply_mode_factors: size mismatch");
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t flat = 0; flat < factors.size(); ++flat) f.at(c, flat) *= factors[flat];
}

void dealias_inplace(SpectralField& f) {
    const FourierGrid& g = f.grid();
    const int limit = g.dealias_limit();
    const std::size_t np = f.points();
    for (std::size_t flat = 0; flat < np; ++flat) {
        Wavevector k = g.wavevector(flat);
        bool kill = false;
        for (int a = 0; a < g.dim; ++a)
            if (std::abs(k[a]) > limit) kill = true;
        if (kill)
            for (int c = 0; c < f.components(); ++c) f.at(c, flat) = Complex(0.0);
    }
}

SpectralField dealias(const SpectralField& f) {
    SpectralField out = f;
    dealias_inplace(out);
    return out;
}

double physical_l2(const SpectralField& f) {
    double sum = 0.0;
    std::vector<double> phys;
    for (int c = 0; c < f.components(); ++c) {
        spectrum_to_physical(f, c, f.grid().n, phys);
        for (double v : phys) sum += v * v;
    }
    return std::sqrt(sum / double(f.points()));
}

double physical_max_abs(const SpectralField& f) {
    double worst = 0.0;
    std::vector<double> phys;
    for (int c = 0; c < f.components(); ++c) {
        spectrum_to_physical(f, c, f.grid().n, phys);
        for (double v : phys) worst = std::max(worst, std::abs(v));
    }
    return worst;
}

}  // namespace tspde

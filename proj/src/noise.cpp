#include "tspde/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "tspde/fft.hpp"
#include "tspde/spectral_ops.hpp"

namespace tspde {

NoiseConfig::NoiseConfig(double kappa_, ThetaSpectrum theta_) : kappa(kappa_), theta(std::move(theta_)) {
    if (kappa < 0.0) throw std::invalid_argument("NoiseConfig: kappa must be >= 0");
}

double NoiseConfig::amplitude() const {
    const int d = dim();
    const double c = d == 2 ? 2.0 : double(d) / double(d - 1);
    return std::sqrt(c * kappa);
}

bool positive_half_lattice(const Wavevector& k, int dim) {
    for (int a = 0; a < dim; ++a) {
        if (k[a] > 0) return true;
        if (k[a] < 0) return false;
    }
    return false;  // zero vector
}

std::vector<FrameVector> frame_vectors(const Wavevector& k, int dim) {
    Wavevector r = k;
    if (!positive_half_lattice(r, dim))
        for (int a = 0; a < dim; ++a) r[a] = -r[a];  // frame is even: a_{-k} = a_k
    double nrm = 0.0;
    for (int a = 0; a < dim; ++a) nrm += double(r[a]) * r[a];
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) throw std::invalid_argument("frame_vectors: zero wavevector");
    if (dim == 2) {
        return {FrameVector{r[1] / nrm, -r[0] / nrm, 0.0}};
    }
    // 3D: Gram-Schmidt from e1, falling back to e2 when k is parallel to e1.
    const double kh[3] = {r[0] / nrm, r[1] / nrm, r[2] / nrm};
    double ref[3] = {1.0, 0.0, 0.0};
    if (r[1] == 0 && r[2] == 0) ref[0] = 0.0, ref[1] = 1.0;
    const double proj = ref[0] * kh[0] + ref[1] * kh[1] + ref[2] * kh[2];
    double a1[3];
    double a1n = 0.0;
    for (int a = 0; a < 3; ++a) {
        a1[a] = ref[a] - proj * kh[a];
        a1n += a1[a] * a1[a];
    }
    a1n = std::sqrt(a1n);
    FrameVector v1{a1[0] / a1n, a1[1] / a1n, a1[2] / a1n};
    FrameVector v2{kh[1] * v1[2] - kh[2] * v1[1], kh[2] * v1[0] - kh[0] * v1[2],
                   kh[0] * v1[1] - kh[1] * v1[0]};
    return {v1, v2};
}

BoundNoise bind_noise(const NoiseConfig& cfg, const FourierGrid& grid) {
    if (cfg.dim() != grid.dim) throw std::invalid_argument("bind_noise: dimension mismatch");
    const int half = grid.n / 2;
    if (cfg.theta.max_component() > half)
        throw std::invalid_argument(
            "bind_noise: theta support exceeds the representable band |k_i| <= N/2; increase the grid "
            "resolution N");
    BoundNoise b{grid, cfg.kappa, cfg.amplitude(), grid.dim, cfg.theta.max_component(), {}};
    for (const auto& e : cfg.theta.entries()) {
        // Self-paired grid slots (every component 0 or N/2) are visited once;
        // regular pairs once via their positive-half representative.
        bool self = true;
        for (int a = 0; a < grid.dim; ++a)
            if (e.k[a] != 0 && std::abs(e.k[a]) != half) self = false;
        if (self) {
            // the +N/2 and -N/2 labels address the same slot; keep the
            // canonical representative only
            if (!positive_half_lattice(e.k, grid.dim)) continue;
            BoundNoise::PairEntry p;
            p.k = e.k;
            p.theta = e.weight;
            auto f = frame_vectors(e.k, grid.dim);
            for (std::size_t i = 0; i < f.size(); ++i) p.frame[i] = f[i];
            p.flat_pos = p.flat_neg = grid.flat_index(e.k);
            p.self_conjugate = true;
            b.pairs.push_back(p);
            continue;
        }
        if (!positive_half_lattice(e.k, grid.dim)) continue;
        BoundNoise::PairEntry p;
        p.k = e.k;
        p.theta = e.weight;
        auto f = frame_vectors(e.k, grid.dim);
        for (std::size_t i = 0; i < f.size(); ++i) p.frame[i] = f[i];
        Wavevector mk{-e.k[0], -e.k[1], -e.k[2]};
        for (int a = 0; a < grid.dim; ++a)
            if (mk[a] == -half) mk[a] = half;
        p.flat_pos = grid.flat_index(e.k);
        p.flat_neg = grid.flat_index(mk);
        p.self_conjugate = p.flat_pos == p.flat_neg;
        b.pairs.push_back(p);
    }
    return b;
}

SpectralField sample_increment(const BoundNoise& noise, double dt, const rng::GaussianStream& stream,
                               std::uint64_t step) {
    if (dt <= 0.0) throw std::invalid_argument("sample_increment: dt must be > 0");
    SpectralField dw = SpectralField::vector(noise.grid);
    const double sq_dt = std::sqrt(dt);
    const int nframes = noise.dim - 1;
    const std::uint64_t base = step * noise.draws_per_step();
    for (std::size_t j = 0; j < noise.pairs.size(); ++j) {
        const auto& p = noise.pairs[j];
        const double amp = noise.amplitude * p.theta;
        for (int i = 0; i < nframes; ++i) {
            const auto [xi, eta] = stream.normal_pair(base + j * nframes + i);
            if (p.self_conjugate) {
                // grid projection of the +/-k continuum pair: a real draw
                // carrying the full pair variance
                const double c = amp * 2.0 * xi * sq_dt;
                for (int a = 0; a < noise.dim; ++a) dw.at(a, p.flat_pos) += c * p.frame[i][a];
            } else {
                const Complex inc = amp * Complex(xi, eta) * sq_dt;
                for (int a = 0; a < noise.dim; ++a) {
                    dw.at(a, p.flat_pos) += p.frame[i][a] * inc;
                    dw.at(a, p.flat_neg) += p.frame[i][a] * std::conj(inc);
                }
            }
        }
    }
    return dw;
}

SpectralField transport_apply(const SpectralField& dw, const SpectralField& f) {
    TransportApplier applier(dw, max_support_component(f));
    return applier.apply(f);
}

TransportApplier::TransportApplier(const SpectralField& dw, int state_band) : grid_(dw.grid()) {
    if (dw.components() != grid_.dim)
        throw std::invalid_argument("TransportApplier: vector increment expected");
    const int sup = max_support_component(dw) + state_band;
    n_phys_ = 3 * sup <= 2 * grid_.n ? grid_.n : 2 * grid_.n;
    dw_phys_.resize(grid_.dim);
    for (int a = 0; a < grid_.dim; ++a) spectrum_to_physical(dw, a, n_phys_, dw_phys_[a]);
}

SpectralField TransportApplier::apply(const SpectralField& f) const {
    if (f.grid() != grid_ || f.components() != 1)
        throw std::invalid_argument("TransportApplier: scalar field on the increment grid expected");
    std::vector<double> pf, prod;
    spectrum_to_physical(f, 0, n_phys_, pf);
    SpectralField flux = SpectralField::vector(grid_);
    for (int a = 0; a < grid_.dim; ++a) {
        prod = dw_phys_[a];
        for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= pf[i];
        physical_to_spectrum(prod, grid_.dim, n_phys_, flux, a);
    }
    SpectralField out = divergence(flux);
    dealias_inplace(out);
    return out;
}

double ito_corrector_eigenvalue_raw(double kappa, int dim, const std::vector<ThetaEntry>& entries,
                                    const Wavevector& l) {
    const double c = dim == 2 ? 2.0 : double(dim) / double(dim - 1);
    double sum = 0.0;
    for (const auto& e : entries) {
        for (const auto& a : frame_vectors(e.k, dim)) {
            double dot = 0.0;
            for (int ax = 0; ax < dim; ++ax) dot += a[ax] * l[ax];
            sum += e.weight * e.weight * dot * dot;
        }
    }
    return -four_pi_sq * c * kappa * sum;
}

double ito_corrector_eigenvalue(const NoiseConfig& cfg, const Wavevector& l) {
    return ito_corrector_eigenvalue_raw(cfg.kappa, cfg.dim(), cfg.theta.entries(), l);
}

std::array<std::array<double, 3>, 3> noise_covariance(const NoiseConfig& cfg,
                                                      const std::array<double, 3>& z) {
    const int d = cfg.dim();
    const double c = d == 2 ? 2.0 : double(d) / double(d - 1);
    std::array<std::array<double, 3>, 3> q{};
    for (const auto& e : cfg.theta.entries()) {
        double phase = 0.0;
        for (int a = 0; a < d; ++a) phase += e.k[a] * z[a];
        const double w = 2.0 * c * cfg.kappa * e.weight * e.weight * std::cos(two_pi * phase);
        for (const auto& av : frame_vectors(e.k, d))
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) q[a][b] += w * av[a] * av[b];
    }
    return q;
}

}  // namespace tspde

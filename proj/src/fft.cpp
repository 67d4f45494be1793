#include "tspde/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tspde {

namespace {

// FFTW plan creation is not thread-safe; executions on distinct plans are.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// One r2c/c2r plan pair with buffers for a given (dim, n). Each thread owns
// its workspaces, so execution needs no locking.
class FftWorkspace {
  public:
    FftWorkspace(int dim, int n) : dim_(dim), n_(n) {
        std::size_t np = num_points();
        nhalf_ = np / n * (n / 2 + 1);
        phys_ = static_cast<double*>(fftw_malloc(sizeof(double) * np));
        half_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * nhalf_));
        if (!phys_ || !half_) throw std::bad_alloc();
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (dim == 2) {
            fwd_ = fftw_plan_dft_r2c_2d(n, n, phys_, half_, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_2d(n, n, half_, phys_, FFTW_ESTIMATE);
        } else {
            fwd_ = fftw_plan_dft_r2c_3d(n, n, n, phys_, half_, FFTW_ESTIMATE);
            bwd_ = fftw_plan_dft_c2r_3d(n, n, n, half_, phys_, FFTW_ESTIMATE);
        }
        if (!fwd_ || !bwd_) throw std::runtime_error("FFTW plan creation failed");
    }

    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(phys_);
        fftw_free(half_);
    }

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;

    std::size_t num_points() const {
        std::size_t np = 1;
        for (int a = 0; a < dim_; ++a) np *= static_cast<std::size_t>(n_);
        return np;
    }

    // Scatter the full spectrum of (f, comp) into this grid's half-complex
    // layout and synthesize real samples. When padding (n_ > source n), a
    // source coefficient with Nyquist components is split evenly over the
    // sign choices that collapse onto it under coarse sampling; this is the
    // canonical real lift of the coarse field.
    void synthesize(const SpectralField& f, int comp, std::vector<double>& out) {
        const FourierGrid& g = f.grid();
        const int src_n = g.n;
        const bool padded = n_ > src_n;
        std::memset(half_, 0, sizeof(fftw_complex) * nhalf_);
        const std::size_t src_np = g.num_points();
        for (std::size_t flat = 0; flat < src_np; ++flat) {
            Complex v = f.at(comp, flat);
            if (v == Complex(0.0)) continue;
            Wavevector k = g.wavevector(flat);
            if (k[dim_ - 1] < 0) continue;  // conjugate half, implied by r2c
            if (!padded) {
                accumulate(k, v);
                continue;
            }
            int nyq_axes[3];
            int n_nyq = 0;
            for (int a = 0; a < dim_; ++a)
                if (k[a] == src_n / 2) nyq_axes[n_nyq++] = a;
            if (n_nyq == 0) {
                accumulate(k, v);
                continue;
            }
            const Complex split = v / double(1 << n_nyq);
            // Enumerate sign patterns over Nyquist axes; patterns whose last
            // component is negative are the implied conjugate partners.
            for (int bits = 0; bits < (1 << n_nyq); ++bits) {
                Wavevector kk = k;
                for (int b = 0; b < n_nyq; ++b)
                    if (bits & (1 << b)) kk[nyq_axes[b]] = -src_n / 2;
                if (kk[dim_ - 1] < 0) continue;
                accumulate(kk, split);
            }
        }
        fftw_execute(bwd_);
        out.assign(phys_, phys_ + num_points());
    }

    // Forward-transform samples and gather the modes representable on
    // `out.grid()`; when this grid is finer, mode pairs that alias onto a
    // coarse Nyquist slot are folded (summed) into it.
    void analyze(std::span<const double> phys, SpectralField& out, int comp) {
        if (phys.size() != num_points()) throw std::invalid_argument("analyze: sample count mismatch");
        std::memcpy(phys_, phys.data(), sizeof(double) * phys.size());
        fftw_execute(fwd_);
        const FourierGrid& g = out.grid();
        const bool padded = n_ > g.n;
        const double scale = 1.0 / static_cast<double>(num_points());
        const std::size_t dst_np = g.num_points();
        for (std::size_t flat = 0; flat < dst_np; ++flat) {
            Wavevector k = g.wavevector(flat);
            if (!padded) {
                out.at(comp, flat) = fetch(k) * scale;
                continue;
            }
            int nyq_axes[3];
            int n_nyq = 0;
            for (int a = 0; a < dim_; ++a)
                if (k[a] == g.n / 2) nyq_axes[n_nyq++] = a;
            Complex v(0.0);
            for (int bits = 0; bits < (1 << n_nyq); ++bits) {
                Wavevector kk = k;
                for (int b = 0; b < n_nyq; ++b)
                    if (bits & (1 << b)) kk[nyq_axes[b]] = -g.n / 2;
                v += fetch(kk);
            }
            out.at(comp, flat) = v * scale;
        }
    }

  private:
    std::size_t half_flat(Wavevector k) const {
        std::size_t f = 0;
        for (int a = 0; a < dim_ - 1; ++a) {
            int idx = k[a] >= 0 ? k[a] : k[a] + n_;
            f = f * n_ + static_cast<std::size_t>(idx);
        }
        return f * (n_ / 2 + 1) + static_cast<std::size_t>(k[dim_ - 1]);
    }

    void accumulate(const Wavevector& k, Complex v) {
        fftw_complex& c = half_[half_flat(k)];
        c[0] += v.real();
        c[1] += v.imag();
    }

    // Logical mode k (any sign of the last component) from the half-complex
    // array, using conjugate symmetry for k_last < 0.
    Complex fetch(Wavevector k) const {
        bool conj = false;
        if (k[dim_ - 1] < 0) {
            conj = true;
            for (int a = 0; a < dim_; ++a) {
                k[a] = -k[a];
                if (k[a] == -n_ / 2) k[a] = n_ / 2;
            }
        }
        Complex v(half_[half_flat(k)][0], half_[half_flat(k)][1]);
        return conj ? std::conj(v) : v;
    }

    int dim_;
    int n_;
    std::size_t nhalf_ = 0;
    double* phys_ = nullptr;
    fftw_complex* half_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

FftWorkspace& workspace(int dim, int n) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<FftWorkspace>> pool;
    auto& slot = pool[{dim, n}];
    if (!slot) slot = std::make_unique<FftWorkspace>(dim, n);
    return *slot;
}

}  // namespace

void spectrum_to_physical(const SpectralField& f, int comp, int n_phys, std::vector<double>& out) {
    if (n_phys < f.grid().n) throw std::invalid_argument("spectrum_to_physical: n_phys < grid n");
    workspace(f.grid().dim, n_phys).synthesize(f, comp, out);
}

void physical_to_spectrum(std::span<const double> phys, int dim, int n_phys, SpectralField& out, int comp) {
    if (n_phys < out.grid().n) throw std::invalid_argument("physical_to_spectrum: n_phys < grid n");
    workspace(dim, n_phys).analyze(phys, out, comp);
}

std::vector<double> to_physical(const SpectralField& f, int comp) {
    std::vector<double> out;
    spectrum_to_physical(f, comp, f.grid().n, out);
    return out;
}

SpectralField from_physical(const FourierGrid& grid, std::span<const double> samples) {
    SpectralField f = SpectralField::scalar(grid);
    physical_to_spectrum(samples, grid.dim, grid.n, f, 0);
    return f;
}

int max_support_component(const SpectralField& f, double tol) {
    int sup = 0;
    const std::size_t np = f.points();
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t flat = 0; flat < np; ++flat) {
            if (std::abs(f.at(c, flat)) <= tol) continue;
            Wavevector k = f.grid().wavevector(flat);
            for (int a = 0; a < f.grid().dim; ++a) sup = std::max(sup, std::abs(k[a]));
        }
    return sup;
}

SpectralField pseudospectral_product(const SpectralField& f, const SpectralField& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("pseudospectral_product: grid mismatch");
    if (f.components() != 1 || g.components() != 1)
        throw std::invalid_argument("pseudospectral_product: scalar fields expected");
    const FourierGrid& grid = f.grid();
    // Unpadded products alias only onto modes outside the dealias band as
    // long as the supports sum to at most 2N/3; wider supports (transport by
    // noise near the Nyquist band) go through a doubled grid, on which the
    // product is exact for every representable mode.
    const int sup = max_support_component(f) + max_support_component(g);
    const int n_phys = 3 * sup <= 2 * grid.n ? grid.n : 2 * grid.n;
    std::vector<double> pf, pg;
    spectrum_to_physical(f, 0, n_phys, pf);
    spectrum_to_physical(g, 0, n_phys, pg);
    for (std::size_t i = 0; i < pf.size(); ++i) pf[i] *= pg[i];
    SpectralField out = SpectralField::scalar(grid);
    physical_to_spectrum(pf, grid.dim, n_phys, out, 0);
    return out;
}

SpectralField direct_convolution(const SpectralField& f, const SpectralField& g, bool fold_all) {
    if (f.grid() != g.grid()) throw std::invalid_argument("direct_convolution: grid mismatch");
    const FourierGrid& grid = f.grid();
    const int n = grid.n;
    SpectralField out = SpectralField::scalar(grid);
    const std::size_t np = grid.num_points();
    for (std::size_t fa = 0; fa < np; ++fa) {
        Complex va = f.at(0, fa);
        if (va == Complex(0.0)) continue;
        Wavevector ka = grid.wavevector(fa);
        for (std::size_t fb = 0; fb < np; ++fb) {
            Complex vb = g.at(0, fb);
            if (vb == Complex(0.0)) continue;
            Wavevector kb = grid.wavevector(fb);
            Wavevector ks{0, 0, 0};
            bool keep = true;
            for (int a = 0; a < grid.dim; ++a) {
                int s = ka[a] + kb[a];
                if (fold_all) {
                    // fold onto (-n/2, n/2] exactly as grid sampling does
                    while (s > n / 2) s -= n;
                    while (s <= -n / 2) s += n;
                } else {
                    if (s == -n / 2) s = n / 2;  // self-paired Nyquist slot
                    if (s > n / 2 || s < -n / 2) keep = false;
                }
                ks[a] = s;
            }
            if (keep) out.at(0, grid.flat_index(ks)) += va * vb;
        }
    }
    return out;
}

}  // namespace tspde

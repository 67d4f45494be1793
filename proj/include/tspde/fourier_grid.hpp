// fourier_grid.hpp
// Fourier-space representation of real fields on the periodic box [0,1)^d.
// Basis convention: e_k(x) = exp(2*pi*i k.x), wavevector components in
// (-N/2, N/2]. A SpectralField stores the full complex spectrum per
// component; real fields satisfy coeff(-k) = conj(coeff(k)).

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tspde {

using Complex = std::complex<double>;
using Wavevector = std::array<int, 3>;  // trailing components 0 when dim < 3

struct FourierGrid {
    int dim = 2;  // 2 or 3
    int n = 0;    // modes (= samples) per axis, even

    FourierGrid() = default;
    FourierGrid(int dim_, int n_) : dim(dim_), n(n_) {
        if (dim < 2 || dim > 3) throw std::invalid_argument("FourierGrid: dim must be 2 or 3");
        if (n < 4 || n % 2 != 0) throw std::invalid_argument("FourierGrid: n must be even and >= 4");
    }

    std::size_t num_points() const {
        std::size_t p = 1;
        for (int a = 0; a < dim; ++a) p *= static_cast<std::size_t>(n);
        return p;
    }

    // Largest |k_i| kept by the two-thirds dealiasing rule.
    int dealias_limit() const { return n / 3; }

    // Array index along one axis <-> signed wavenumber in (-N/2, N/2].
    int index_to_wavenumber(int idx) const { return idx <= n / 2 ? idx : idx - n; }
    int wavenumber_to_index(int k) const { return k >= 0 ? k : k + n; }

    std::size_t flat_index(const Wavevector& k) const {
        std::size_t f = 0;
        for (int a = 0; a < dim; ++a) f = f * n + static_cast<std::size_t>(wavenumber_to_index(k[a]));
        return f;
    }

    Wavevector wavevector(std::size_t flat) const {
        Wavevector k{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            k[a] = index_to_wavenumber(static_cast<int>(flat % n));
            flat /= n;
        }
        return k;
    }

    double wavevector_norm_sq(std::size_t flat) const {
        Wavevector k = wavevector(flat);
        double s = 0;
        for (int a = 0; a < dim; ++a) s += double(k[a]) * k[a];
        return s;
    }

    bool operator==(const FourierGrid& o) const { return dim == o.dim && n == o.n; }
    bool operator!=(const FourierGrid& o) const { return !(*this == o); }
};

// Complex Fourier coefficients of a real scalar or vector field.
class SpectralField {
  public:
    SpectralField() = default;
    SpectralField(const FourierGrid& grid, int components)
        : grid_(grid), comps_(components), c_(static_cast<std::size_t>(components) * grid.num_points()) {}

    static SpectralField scalar(const FourierGrid& g) { return SpectralField(g, 1); }
    static SpectralField vector(const FourierGrid& g) { return SpectralField(g, g.dim); }

    const FourierGrid& grid() const { return grid_; }
    int components() const { return comps_; }
    std::size_t points() const { return grid_.num_points(); }

    Complex& at(int comp, std::size_t flat) { return c_[comp * points() + flat]; }
    Complex at(int comp, std::size_t flat) const { return c_[comp * points() + flat]; }

    Complex mode(int comp, const Wavevector& k) const { return at(comp, grid_.flat_index(k)); }
    void set_mode(int comp, const Wavevector& k, Complex v) { at(comp, grid_.flat_index(k)) = v; }

    std::complex<double>* data(int comp) { return c_.data() + comp * points(); }
    const std::complex<double>* data(int comp) const { return c_.data() + comp * points(); }

    Complex mean_mode(int comp = 0) const { return at(comp, 0); }

    SpectralField& operator+=(const SpectralField& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    SpectralField& operator-=(const SpectralField& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    SpectralField& operator*=(double s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

    // axpy: this += s * o
    void add_scaled(double s, const SpectralField& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += s * o.c_[i];
    }

    bool all_finite() const {
        for (const auto& v : c_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    // Largest |coeff(-k) - conj(coeff(k))| over all modes and components.
    double conjugate_symmetry_defect() const {
        double worst = 0.0;
        const std::size_t np = points();
        for (int c = 0; c < comps_; ++c) {
            for (std::size_t f = 0; f < np; ++f) {
                Wavevector k = grid_.wavevector(f);
                Wavevector mk{-k[0], -k[1], -k[2]};
                for (int a = 0; a < grid_.dim; ++a)
                    if (mk[a] == -grid_.n / 2) mk[a] = grid_.n / 2;  // Nyquist is self-paired
                Complex d = at(c, grid_.flat_index(mk)) - std::conj(at(c, f));
                worst = std::max(worst, std::abs(d));
            }
        }
        return worst;
    }

  private:
    void check_same_shape(const SpectralField& o) const {
        if (grid_ != o.grid_ || comps_ != o.comps_)
            throw std::invalid_argument("SpectralField: shape mismatch");
    }

    FourierGrid grid_;
    int comps_ = 0;
    std::vector<Complex> c_;
};

}  // namespace tspde

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tspde/fft.hpp"
#include "tspde/models.hpp"
#include "tspde/spectral_ops.hpp"

using namespace tspde;

namespace {

// Real field from a single +/-k pair: 2 Re(c e_k).
SpectralField mode_pair(const FourierGrid& g, Wavevector k, Complex c) {
    SpectralField f = SpectralField::scalar(g);
    f.set_mode(0, k, c);
    Wavevector mk{-k[0], -k[1], -k[2]};
    f.set_mode(0, mk, std::conj(c));
    return f;
}

double max_mode_diff(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0;
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t i = 0; i < a.points(); ++i)
            worst = std::max(worst, std::abs(a.at(c, i) - b.at(c, i)));
    return worst;
}

}  // namespace

TEST_CASE("transforms: constant field, single cosine, random round trip") {
    FourierGrid g(2, 8);
    std::vector<double> ones(g.num_points(), 1.0);
    SpectralField c = from_physical(g, ones);
    CHECK(std::abs(c.mode(0, {0, 0, 0}) - Complex(1.0)) < 1e-14);
    double off = 0.0;
    for (std::size_t i = 1; i < c.points(); ++i) off = std::max(off, std::abs(c.at(0, i)));
    CHECK(off < 1e-14);

    // samples of cos(2 pi x1) -> coefficients 1/2 at +/-(1,0)
    std::vector<double> cosx(g.num_points());
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < g.n; ++j) cosx[i * g.n + j] = std::cos(two_pi * i / g.n);
    SpectralField fc = from_physical(g, cosx);
    CHECK(std::abs(fc.mode(0, {1, 0, 0}) - Complex(0.5)) < 1e-14);
    CHECK(std::abs(fc.mode(0, {-1, 0, 0}) - Complex(0.5)) < 1e-14);

    FourierGrid g64(2, 64);
    SpectralField r = random_band_limited(g64, 20, 77);
    std::vector<double> phys = to_physical(r);
    SpectralField back = from_physical(g64, phys);
    CHECK(max_mode_diff(r, back) < 1e-12);
}

TEST_CASE("transforms: 3D round trip") {
    FourierGrid g(3, 8);
    SpectralField f = SpectralField::scalar(g);
    f.set_mode(0, {1, 2, -1}, Complex(0.3, -0.2));
    f.set_mode(0, {-1, -2, 1}, Complex(0.3, 0.2));
    f.set_mode(0, {0, 0, 2}, Complex(0.0, 0.5));
    f.set_mode(0, {0, 0, -2}, Complex(0.0, -0.5));
    SpectralField back = from_physical(g, to_physical(f));
    CHECK(max_mode_diff(f, back) < 1e-13);
}

TEST_CASE("sobolev norm: single modes and brute-force oracle") {
    FourierGrid g(2, 16);
    SpectralField f = SpectralField::scalar(g);
    f.set_mode(0, {3, -2, 0}, Complex(1.0));
    CHECK(sobolev_norm(f, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    SpectralField e10 = SpectralField::scalar(g);
    e10.set_mode(0, {1, 0, 0}, Complex(1.0));
    CHECK(sobolev_norm(e10, -1.0) == doctest::Approx(1.0).epsilon(1e-14));

    SpectralField e20 = SpectralField::scalar(g);
    e20.set_mode(0, {2, 0, 0}, Complex(1.0));
    // |k|^{-1} = 1/2, cross-checked below by an independent sum over modes
    CHECK(sobolev_norm(e20, -1.0) == doctest::Approx(0.5).epsilon(1e-14));

    SpectralField r = random_band_limited(g, 5, 3);
    for (double s : {-0.9, -0.5, 0.0, 1.0, 2.0}) {
        double brute = 0.0;
        for (std::size_t i = 0; i < r.points(); ++i) {
            Wavevector k = g.wavevector(i);
            double k2 = double(k[0]) * k[0] + double(k[1]) * k[1];
            brute += (i == 0 ? 1.0 : std::pow(std::sqrt(k2), 2.0 * s)) * std::norm(r.at(0, i));
        }
        CHECK(sobolev_norm(r, s) == doctest::Approx(std::sqrt(brute)).epsilon(1e-12));
    }
}

TEST_CASE("parseval: physical quadrature matches spectral L2") {
    FourierGrid g(2, 32);
    SpectralField r = random_band_limited(g, 10, 11);
    CHECK(std::abs(physical_l2(r) - sobolev_norm(r, 0.0)) < 1e-10);
}

TEST_CASE("biot-savart: zero, single-mode multiplier, curl oracles") {
    FourierGrid g(2, 64);
    SpectralField zero = SpectralField::scalar(g);
    CHECK(l2_norm(biot_savart(zero)) == 0.0);

    // omega = 2 Re(e_k): u_k should be i k^perp / (2 pi |k|^2)
    Wavevector k{3, 1, 0};
    SpectralField w = mode_pair(g, k, Complex(1.0));
    SpectralField u = biot_savart(w);
    const double k2 = 10.0;
    Complex expect0 = Complex(0.0, k[1] / (two_pi * k2));
    Complex expect1 = Complex(0.0, -k[0] / (two_pi * k2));
    CHECK(std::abs(u.mode(0, k) - expect0) < 1e-14);
    CHECK(std::abs(u.mode(1, k) - expect1) < 1e-14);

    // spectral curl oracle: curl(biot_savart(w)) = w - mean
    SpectralField r = random_band_limited(g, 15, 5);
    SpectralField ur = biot_savart(r);
    CHECK(divergence_defect(ur) < 1e-12);
    CHECK(max_mode_diff(curl_2d(ur), r) < 1e-10);

    // finite-difference curl oracle (6th order central differences)
    SpectralField w1 = mode_pair(g, {1, 0, 0}, Complex(0.5));
    SpectralField u1 = biot_savart(w1);
    auto ux = to_physical(u1, 0);
    auto uy = to_physical(u1, 1);
    auto wphys = to_physical(w1, 0);
    const int n = g.n;
    const double h = 1.0 / n;
    auto idx = [n](int i, int j) { return ((i % n + n) % n) * n + ((j % n + n) % n); };
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            auto d6 = [&](const std::vector<double>& v, int di, int dj) {
                return (45.0 * (v[idx(i + di, j + dj)] - v[idx(i - di, j - dj)]) -
                        9.0 * (v[idx(i + 2 * di, j + 2 * dj)] - v[idx(i - 2 * di, j - 2 * dj)]) +
                        (v[idx(i + 3 * di, j + 3 * dj)] - v[idx(i - 3 * di, j - 3 * dj)])) /
                       (60.0 * h);
            };
            const double curl = d6(uy, 1, 0) - d6(ux, 0, 1);
            worst = std::max(worst, std::abs(curl - wphys[idx(i, j)]));
        }
    CHECK(worst < 1e-6);
}

TEST_CASE("k_beta kernel: beta=1 is biot-savart, multiplier magnitude, rejections") {
    FourierGrid g(2, 32);
    SpectralField r = random_band_limited(g, 8, 21);
    CHECK(max_mode_diff(k_beta_convolve(r, 1.0), biot_savart(r)) < 1e-12);
    CHECK(l2_norm(k_beta_convolve(SpectralField::scalar(g), 0.5)) == 0.0);

    Wavevector k{2, -1, 0};
    const double beta = 0.4;
    SpectralField w = mode_pair(g, k, Complex(1.0));
    SpectralField u = k_beta_convolve(w, beta);
    const double kn2 = 5.0;
    // independent scalar computation of the multiplier magnitude
    const double expect_mag = two_pi * std::sqrt(kn2) * std::pow(four_pi_sq * kn2, -0.5 * (1.0 + beta));
    const double got = std::hypot(std::abs(u.mode(0, k)), std::abs(u.mode(1, k)));
    CHECK(got == doctest::Approx(expect_mag).epsilon(1e-12));
    CHECK(divergence_defect(u) < 1e-13);

    CHECK_THROWS(k_beta_convolve(w, 0.0));
    CHECK_THROWS(k_beta_convolve(w, 1.5));
}

TEST_CASE("inverse gradient: divergence identity and mean-zero output") {
    FourierGrid g(2, 32);
    std::vector<double> ones(g.num_points(), 2.5);
    SpectralField cst = from_physical(g, ones);
    CHECK(l2_norm(inv_gradient(cst)) == 0.0);

    // div(inv_gradient e_k) = -e_k
    SpectralField f = mode_pair(g, {4, 1, 0}, Complex(0.3, 0.7));
    SpectralField d = divergence(inv_gradient(f));
    SpectralField minus_f = f;
    minus_f *= -1.0;
    CHECK(max_mode_diff(d, minus_f) < 1e-13);

    SpectralField r = random_band_limited(g, 10, 9);
    SpectralField gradinv = inv_gradient(r);
    CHECK(std::abs(gradinv.mean_mode(0)) == 0.0);
    CHECK(std::abs(gradinv.mean_mode(1)) == 0.0);
    SpectralField resid = divergence(gradinv);
    resid += r;  // should cancel to the mean (here zero)
    CHECK(l2_norm(resid) < 1e-10);
}

TEST_CASE("heat semigroup: identity, per-mode factor, semigroup property") {
    FourierGrid g(2, 32);
    SpectralField r = random_band_limited(g, 10, 13);
    CHECK(max_mode_diff(heat_multiplier(r, 0.0, 1.0), r) == 0.0);

    Wavevector k{3, 2, 0};
    SpectralField f = mode_pair(g, k, Complex(1.0));
    SpectralField ft = heat_multiplier(f, 0.25, 0.7);
    const double factor = std::exp(-four_pi_sq * 0.7 * 13.0 * 0.25);
    CHECK(std::abs(ft.mode(0, k) - Complex(factor)) < 1e-14);

    SpectralField ab = heat_multiplier(heat_multiplier(r, 0.1, 1.3), 0.2, 1.3);
    SpectralField c = heat_multiplier(r, 0.3, 1.3);
    CHECK(max_mode_diff(ab, c) < 1e-12);

    CHECK_THROWS(heat_multiplier(r, -0.1, 1.0));
    CHECK_THROWS(heat_multiplier(r, 0.1, 0.0));
}

TEST_CASE("heat smoothing: mode-wise bound with explicit constant") {
    FourierGrid g(2, 64);
    const double delta = 1.0;
    for (double rho : {0.5, 1.0, 2.0}) {
        const double bound = std::pow(rho / (2.0 * std::exp(1.0) * four_pi_sq * delta), rho / 2.0);
        for (int kk : {1, 2, 4, 8}) {
            SpectralField f = mode_pair(g, {kk, 0, 0}, Complex(1.0));
            const double alpha = -0.3;
            const double h_alpha = sobolev_norm(f, alpha);
            for (double t : {1e-3, 1e-2, 0.1, 1.0}) {
                const double lhs = sobolev_norm(heat_multiplier(f, t, delta), alpha + rho) * std::pow(t, rho / 2.0);
                CHECK(lhs <= bound * h_alpha * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("heat convolution regularization: 1/delta gain uniform over delta") {
    // y_T = int_0^T exp(delta (T-s) Lap) f_s ds for piecewise-constant
    // band-limited mean-zero f; ||y_T||_{H^{a+1}}^2 <= C/delta int ||f||_{H^a}^2
    FourierGrid g(2, 16);
    const double T = 1.0;
    const int pieces = 8;
    const double dt = T / pieces;
    std::vector<SpectralField> f;
    for (int j = 0; j < pieces; ++j) f.push_back(random_band_limited(g, 5, 100 + j));
    const double alpha = 0.0;
    double rhs_integral = 0.0;
    for (const auto& fj : f) rhs_integral += dt * std::pow(sobolev_norm(fj, alpha), 2);

    const double c_pin = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);  // from the smallest grid
    for (double delta : {0.5, 1.0, 2.0, 4.0}) {
        SpectralField y = SpectralField::scalar(g);
        for (std::size_t flat = 1; flat < y.points(); ++flat) {
            const double lam = four_pi_sq * g.wavevector_norm_sq(flat);
            Complex acc(0.0);
            for (int j = 0; j < pieces; ++j) {
                const double a = T - (j + 1) * dt, b = T - j * dt;
                acc += f[j].at(0, flat) * (std::exp(-delta * lam * a) - std::exp(-delta * lam * b)) / (delta * lam);
            }
            y.at(0, flat) = acc;
        }
        const double lhs = std::pow(sobolev_norm(y, alpha + 1.0), 2);
        CHECK(lhs * delta <= c_pin * rhs_integral * (1.0 + 1e-9));
    }
}

TEST_CASE("gradient, laplacian, divergence, dealias identities") {
    FourierGrid g(2, 32);
    Wavevector k{2, 3, 0};
    SpectralField f = mode_pair(g, k, Complex(0.4, -0.1));
    SpectralField lap = laplacian(f);
    SpectralField expect = f;
    expect *= -four_pi_sq * 13.0;
    CHECK(max_mode_diff(lap, expect) < 1e-13);

    SpectralField r = random_band_limited(g, 10, 17);
    CHECK(max_mode_diff(divergence(gradient(r)), laplacian(r)) < 1e-12);

    SpectralField wide = SpectralField::scalar(g);
    wide.set_mode(0, {11, 0, 0}, Complex(1.0));
    wide.set_mode(0, {-11, 0, 0}, Complex(1.0));
    wide.set_mode(0, {3, 0, 0}, Complex(2.0));
    wide.set_mode(0, {-3, 0, 0}, Complex(2.0));
    SpectralField once = dealias(wide);
    CHECK(std::abs(once.mode(0, {11, 0, 0})) == 0.0);  // 11 > 32/3
    CHECK(std::abs(once.mode(0, {3, 0, 0}) - Complex(2.0)) == 0.0);
    CHECK(max_mode_diff(dealias(once), once) == 0.0);  // idempotent
}

TEST_CASE("pseudospectral product: single modes, identity, brute-force oracle") {
    FourierGrid g(2, 16);
    // e_k-pair times e_l-pair lands on the sum/difference modes
    SpectralField a = mode_pair(g, {1, 0, 0}, Complex(0.5));
    SpectralField b = mode_pair(g, {2, 1, 0}, Complex(0.5));
    SpectralField p = pseudospectral_product(a, b);
    CHECK(std::abs(p.mode(0, {3, 1, 0}) - Complex(0.25)) < 1e-14);
    CHECK(std::abs(p.mode(0, {1, 1, 0}) - Complex(0.25)) < 1e-14);

    std::vector<double> ones(g.num_points(), 1.0);
    SpectralField one = from_physical(g, ones);
    SpectralField r = random_band_limited(g, 5, 31);
    CHECK(max_mode_diff(pseudospectral_product(r, one), r) < 1e-13);

    // random band-limited fields vs direct convolution (grid semantics)
    SpectralField f1 = random_band_limited(g, 5, 41);
    SpectralField f2 = random_band_limited(g, 5, 42);
    SpectralField prod = pseudospectral_product(f1, f2);
    SpectralField oracle = direct_convolution(f1, f2, /*fold_all=*/true);
    CHECK(max_mode_diff(prod, oracle) < 1e-10);

    // wide supports trigger the padded (alias-free) path
    SpectralField w1 = random_band_limited(g, 7, 43);
    SpectralField w2 = random_band_limited(g, 7, 44);
    SpectralField wide = pseudospectral_product(w1, w2);
    SpectralField truth = direct_convolution(w1, w2, /*fold_all=*/false);
    CHECK(max_mode_diff(wide, truth) < 1e-10);

    FourierGrid g2(2, 32);
    SpectralField other = random_band_limited(g2, 5, 45);
    CHECK_THROWS(pseudospectral_product(f1, other));
}

TEST_CASE("conjugate symmetry preserved by the operator suite") {
    FourierGrid g(2, 32);
    SpectralField r = random_band_limited(g, 10, 55);
    CHECK(r.conjugate_symmetry_defect() < 1e-13);
    CHECK(biot_savart(r).conjugate_symmetry_defect() < 1e-13);
    CHECK(k_beta_convolve(r, 0.6).conjugate_symmetry_defect() < 1e-13);
    CHECK(inv_gradient(r).conjugate_symmetry_defect() < 1e-13);
    CHECK(heat_multiplier(r, 0.1, 1.0).conjugate_symmetry_defect() < 1e-13);
    CHECK(gradient(r).conjugate_symmetry_defect() < 1e-13);
    SpectralField r2 = random_band_limited(g, 10, 56);
    CHECK(pseudospectral_product(r, r2).conjugate_symmetry_defect() < 1e-12);
    CHECK(dealias(r).conjugate_symmetry_defect() < 1e-13);
}

TEST_CASE("grid rejects invalid parameters") {
    CHECK_THROWS(FourierGrid(1, 16));
    CHECK_THROWS(FourierGrid(2, 15));
    CHECK_THROWS(FourierGrid(4, 16));
}

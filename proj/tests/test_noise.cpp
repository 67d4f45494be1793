#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tspde/fft.hpp"
#include "tspde/models.hpp"
#include "tspde/noise.hpp"
#include "tspde/spectral_ops.hpp"

using namespace tspde;

namespace {

ThetaSpectrum unit_shell_2d() {
    return ThetaSpectrum::from_weights(2, {{{1, 0, 0}, 1.0}, {{-1, 0, 0}, 1.0}, {{0, 1, 0}, 1.0}, {{0, -1, 0}, 1.0}});
}

double max_mode_diff(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0;
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t i = 0; i < a.points(); ++i)
            worst = std::max(worst, std::abs(a.at(c, i) - b.at(c, i)));
    return worst;
}

}  // namespace

TEST_CASE("frame vectors: unit, orthogonal to k, even in k") {
    for (Wavevector k : {Wavevector{1, 0, 0}, Wavevector{0, 3, 0}, Wavevector{2, -5, 0}}) {
        auto f = frame_vectors(k, 2);
        REQUIRE(f.size() == 1);
        CHECK(std::abs(f[0][0] * f[0][0] + f[0][1] * f[0][1] - 1.0) < 1e-14);
        CHECK(std::abs(f[0][0] * k[0] + f[0][1] * k[1]) < 1e-14);
        Wavevector mk{-k[0], -k[1], 0};
        auto fm = frame_vectors(mk, 2);
        CHECK(f[0] == fm[0]);
    }
    for (Wavevector k : {Wavevector{1, 0, 0}, Wavevector{2, 0, 0}, Wavevector{1, -2, 3}, Wavevector{0, 0, 4}}) {
        auto f = frame_vectors(k, 3);
        REQUIRE(f.size() == 2);
        for (const auto& a : f) {
            CHECK(std::abs(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] - 1.0) < 1e-13);
            CHECK(std::abs(a[0] * k[0] + a[1] * k[1] + a[2] * k[2]) < 1e-13);
        }
        CHECK(std::abs(f[0][0] * f[1][0] + f[0][1] * f[1][1] + f[0][2] * f[1][2]) < 1e-13);
        auto fm = frame_vectors({-k[0], -k[1], -k[2]}, 3);
        CHECK(f[0] == fm[0]);
        CHECK(f[1] == fm[1]);
    }
}

TEST_CASE("increments: real, divergence-free, reproducible") {
    FourierGrid g(2, 32);
    NoiseConfig cfg(1.5, make_theta_band(2, 0.0));
    BoundNoise noise = bind_noise(cfg, g);
    rng::GaussianStream stream{rng::derive_key(42, 7)};
    SpectralField dw = sample_increment(noise, 1e-3, stream, 11);
    CHECK(dw.conjugate_symmetry_defect() < 1e-12);  // real in physical space
    CHECK(divergence_defect(dw) < 1e-12);
    SpectralField again = sample_increment(noise, 1e-3, stream, 11);
    CHECK(max_mode_diff(dw, again) == 0.0);
    SpectralField other = sample_increment(noise, 1e-3, stream, 12);
    CHECK(max_mode_diff(dw, other) > 0.0);
}

TEST_CASE("increments: unrepresentable support rejected with remedy") {
    FourierGrid g(2, 16);
    NoiseConfig cfg(1.0, make_theta_band(8, 0.0));  // support out to |k| = 16 > N/2
    try {
        bind_noise(cfg, g);
        CHECK(false);
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("increase") != std::string::npos);
    }
}

TEST_CASE("increment variance: pointwise trace matches 2 kappa * 2 dt") {
    FourierGrid g(2, 16);
    const double kappa = 0.8, dt = 0.01;
    NoiseConfig cfg(kappa, unit_shell_2d());
    BoundNoise noise = bind_noise(cfg, g);
    rng::GaussianStream stream{rng::derive_key(2024, 1)};
    const int m = 20000;
    // accumulate |dW(x0)|^2 at the grid origin over Monte Carlo draws
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < m; ++i) {
        SpectralField dw = sample_increment(noise, dt, stream, std::uint64_t(i));
        double v = 0.0;
        for (int c = 0; c < 2; ++c) {
            // value at x = 0 is the plain sum of coefficients
            Complex s(0.0);
            for (std::size_t flat = 0; flat < dw.points(); ++flat) s += dw.at(c, flat);
            v += s.real() * s.real();
        }
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / m;
    const double se = std::sqrt((sumsq / m - mean * mean) / m);
    const double expect = 2.0 * kappa * 2.0 * dt;  // trace of the one-step covariance
    CHECK(std::abs(mean - expect) < 3.0 * se);

    // two half-steps carry the variance of one full step (Gaussian additivity)
    double sum_half = 0.0;
    for (int i = 0; i < m; ++i) {
        SpectralField a = sample_increment(noise, dt / 2, stream, std::uint64_t(2 * i));
        SpectralField b = sample_increment(noise, dt / 2, stream, std::uint64_t(2 * i + 1));
        a += b;
        double v = 0.0;
        for (int c = 0; c < 2; ++c) {
            Complex s(0.0);
            for (std::size_t flat = 0; flat < a.points(); ++flat) s += a.at(c, flat);
            v += s.real() * s.real();
        }
        sum_half += v;
    }
    CHECK(std::abs(sum_half / m - expect) < 4.0 * se);
}

TEST_CASE("covariance: Monte Carlo matches the closed form at probe offsets") {
    FourierGrid g(2, 16);
    const double kappa = 1.0, dt = 1.0;  // dt = 1: increments of W(1, .)
    NoiseConfig cfg(kappa, make_theta_band(1, 0.0));
    BoundNoise noise = bind_noise(cfg, g);
    rng::GaussianStream stream{rng::derive_key(99, 3)};
    const int m = 8000;
    const std::array<std::array<double, 3>, 3> probes = {
        std::array<double, 3>{0.0, 0.0, 0.0}, std::array<double, 3>{0.25, 0.0, 0.0},
        std::array<double, 3>{0.125, 0.375, 0.0}};
    for (const auto& z : probes) {
        // offsets are grid-aligned so W(x + z) is an exact sample
        const int n = g.n;
        const int di = int(std::lround(z[0] * n)), dj = int(std::lround(z[1] * n));
        std::array<std::array<double, 2>, 2> acc{}, acc2{};
        std::vector<double> wx, wy;
        for (int s = 0; s < m; ++s) {
            SpectralField dw = sample_increment(noise, dt, stream, std::uint64_t(s));
            spectrum_to_physical(dw, 0, n, wx);
            spectrum_to_physical(dw, 1, n, wy);
            const int x0 = 3, y0 = 5;  // arbitrary base point
            const int xs = (x0 + di) % n, ys = (y0 + dj) % n;
            const double at[2] = {wx[std::size_t(xs) * n + ys], wy[std::size_t(xs) * n + ys]};
            const double base[2] = {wx[std::size_t(x0) * n + y0], wy[std::size_t(x0) * n + y0]};
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    const double v = at[a] * base[b];
                    acc[a][b] += v;
                    acc2[a][b] += v * v;
                }
        }
        auto expect = noise_covariance(cfg, z);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double mean = acc[a][b] / m;
                const double se = std::sqrt((acc2[a][b] / m - mean * mean) / m);
                CHECK(std::abs(mean - expect[a][b]) < 4.0 * std::max(se, 1e-4));
            }
    }
}

TEST_CASE("ito corrector: closed-form shell, factories, kappa scaling, detector") {
    // single shell |k| = 1, test mode l = (1,0): eigenvalue -4 pi^2 kappa
    const double kappa = 1.3;
    NoiseConfig cfg(kappa, unit_shell_2d());
    CHECK(ito_corrector_eigenvalue(cfg, {1, 0, 0}) ==
          doctest::Approx(-four_pi_sq * kappa).epsilon(1e-12));

    // the identity holds for every factory and a spread of modes
    for (const ThetaSpectrum& t : {make_theta_band(3, 0.0), make_theta_band(2, 1.0), make_theta_ball(4, 0.5),
                                   make_theta_kraichnan(1.0, 4.0 / 3.0, 6.0)}) {
        NoiseConfig c(0.7, t);
        for (Wavevector l : {Wavevector{1, 0, 0}, Wavevector{0, 2, 0}, Wavevector{3, -4, 0}, Wavevector{5, 2, 0}}) {
            const double l2 = double(l[0]) * l[0] + double(l[1]) * l[1];
            CHECK(std::abs(ito_corrector_eigenvalue(c, l) - (-four_pi_sq * 0.7 * l2)) < 1e-10);
        }
    }

    // 3D with the d/(d-1) prefactor
    NoiseConfig c3(1.0, make_theta_band(1, 0.0, 3));
    for (Wavevector l : {Wavevector{1, 0, 0}, Wavevector{1, 1, -2}}) {
        const double l2 = double(l[0]) * l[0] + double(l[1]) * l[1] + double(l[2]) * l[2];
        CHECK(std::abs(ito_corrector_eigenvalue(c3, l) - (-four_pi_sq * l2)) < 1e-10);
    }

    // kappa scaling is linear
    NoiseConfig c2(2.0 * kappa, unit_shell_2d());
    CHECK(ito_corrector_eigenvalue(c2, {2, 1, 0}) ==
          doctest::Approx(2.0 * ito_corrector_eigenvalue(cfg, {2, 1, 0})).epsilon(1e-12));

    // deliberately broken symmetry: the detector fires and the corrector
    // deviates from kappa * Lap
    std::vector<ThetaEntry> bad = {{{1, 0, 0}, 1.0}, {{-1, 0, 0}, 1.0}, {{0, 1, 0}, 0.1}, {{0, -1, 0}, 0.1}};
    ThetaSpectrum forced = ThetaSpectrum::from_weights_unchecked(2, bad);
    CHECK(!forced.is_symmetric());
    const double eig = ito_corrector_eigenvalue_raw(kappa, 2, forced.entries(), {1, 0, 0});
    CHECK(std::abs(eig - (-four_pi_sq * kappa)) > 0.1 * four_pi_sq * kappa);
}

TEST_CASE("transport apply: constants, single-mode convolution, antisymmetry") {
    FourierGrid g(2, 32);
    NoiseConfig cfg(2.0, unit_shell_2d());
    BoundNoise noise = bind_noise(cfg, g);
    rng::GaussianStream stream{rng::derive_key(5, 5)};
    SpectralField dw = sample_increment(noise, 0.01, stream, 0);

    std::vector<double> ones(g.num_points(), 3.0);
    SpectralField cst = from_physical(g, ones);
    CHECK(l2_norm(transport_apply(dw, cst)) < 1e-14);

    // oracle: direct convolution of dW_j with the spectral derivative d_j f
    SpectralField f = SpectralField::scalar(g);
    f.set_mode(0, {0, 1, 0}, Complex(0.5, -0.25));
    f.set_mode(0, {0, -1, 0}, Complex(0.5, 0.25));
    SpectralField got = transport_apply(dw, f);
    SpectralField expect = SpectralField::scalar(g);
    for (int a = 0; a < 2; ++a) {
        SpectralField dwa = SpectralField::scalar(g);
        for (std::size_t i = 0; i < dwa.points(); ++i) dwa.at(0, i) = dw.at(a, i);
        expect += direct_convolution(dwa, partial_derivative(f, a));
    }
    dealias_inplace(expect);
    CHECK(max_mode_diff(got, expect) < 1e-13);
    CHECK(std::abs(got.mean_mode()) == 0.0);

    // energy neutrality of a single transport application
    SpectralField r = dealias(random_band_limited(g, 9, 123));
    SpectralField tr = transport_apply(dw, r);
    CHECK(std::abs(inner_product(tr, r)) < 1e-12);

    // the same antisymmetry holds under physical-space quadrature
    auto trp = to_physical(tr), rp = to_physical(r);
    double quad = 0.0;
    for (std::size_t i = 0; i < trp.size(); ++i) quad += trp[i] * rp[i];
    quad /= double(trp.size());
    CHECK(std::abs(quad) < 1e-12);
}

TEST_CASE("transport apply: wide noise band goes through the padded product") {
    FourierGrid g(2, 32);
    // support out to |k| = 12 > (2/3 N - state band): forces padding
    NoiseConfig cfg(1.0, make_theta_band(6, 0.0));
    BoundNoise noise = bind_noise(cfg, g);
    rng::GaussianStream stream{rng::derive_key(8, 1)};
    SpectralField dw = sample_increment(noise, 0.05, stream, 2);
    SpectralField f = dealias(random_band_limited(g, 10, 321));
    SpectralField got = transport_apply(dw, f);
    SpectralField expect = SpectralField::scalar(g);
    for (int a = 0; a < 2; ++a) {
        SpectralField dwa = SpectralField::scalar(g);
        for (std::size_t i = 0; i < dwa.points(); ++i) dwa.at(0, i) = dw.at(a, i);
        expect += direct_convolution(dwa, partial_derivative(f, a), /*fold_all=*/false);
    }
    dealias_inplace(expect);
    CHECK(max_mode_diff(got, expect) < 1e-12);
    CHECK(std::abs(inner_product(got, f)) < 1e-12);
}

TEST_CASE("nyquist-touching support: real increments on the self-paired slots") {
    FourierGrid g(2, 16);
    // |k| in [4, 8]: includes (8,0) and (0,8), the grid's self-paired slots
    NoiseConfig cfg(1.0, make_theta_band(4, 0.0));
    BoundNoise noise = bind_noise(cfg, g);
    rng::GaussianStream stream{rng::derive_key(31, 2)};
    SpectralField dw = sample_increment(noise, 0.01, stream, 0);
    CHECK(dw.conjugate_symmetry_defect() < 1e-12);
    CHECK(divergence_defect(dw) < 1e-12);
    // self-paired slots must be exactly real
    for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(dw.mode(c, {8, 0, 0}).imag()) == 0.0);
        CHECK(std::abs(dw.mode(c, {0, 8, 0}).imag()) == 0.0);
    }
}

#include "tspde/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "tspde/fft.hpp"
#include "tspde/spectral_ops.hpp"

namespace tspde {

namespace {

std::vector<double> sobolev_weights(const FourierGrid& g, double s) {
    std::vector<double> w(g.num_points());
    w[0] = 1.0;
    for (std::size_t f = 1; f < w.size(); ++f) w[f] = std::pow(g.wavevector_norm_sq(f), s);
    return w;
}

double weighted_distance_sq(const SpectralField& a, const SpectralField& b, const std::vector<double>& w) {
    double s = 0.0;
    const std::size_t np = a.points();
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t f = 0; f < np; ++f) s += w[f] * std::norm(a.at(c, f) - b.at(c, f));
    return s;
}

double weighted_norm_sq(const SpectralField& a, const std::vector<double>& w) {
    double s = 0.0;
    const std::size_t np = a.points();
    for (int c = 0; c < a.components(); ++c)
        for (std::size_t f = 0; f < np; ++f) s += w[f] * std::norm(a.at(c, f));
    return s;
}

// moment mean -> (mean^{1/p}, delta-method standard error)
std::pair<double, double> moment_estimate(const std::vector<double>& xp, double p) {
    const double m = double(xp.size());
    double mean = 0.0;
    for (double v : xp) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : xp) var += (v - mean) * (v - mean);
    var = m > 1 ? var / (m - 1) : 0.0;
    const double se_mean = std::sqrt(var / m);
    if (mean <= 0.0) return {0.0, se_mean};
    const double est = std::pow(mean, 1.0 / p);
    const double se = (1.0 / p) * std::pow(mean, 1.0 / p - 1.0) * se_mean;
    return {est, se};
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

std::uint64_t sample_stream_key(std::uint64_t seed, int sample) {
    // independent of the sweep member: same draws pair across sweep points
    return rng::derive_key(seed, 0xabcdULL + std::uint64_t(sample));
}

}  // namespace

void validate_estimator(const EstimatorConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("EstimatorConfig: samples must be >= 1");
    if (cfg.p < 1.0) throw std::invalid_argument("EstimatorConfig: p must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw std::invalid_argument("EstimatorConfig: alpha must be in (0,1)");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon <= cfg.alpha))
        throw std::invalid_argument("EstimatorConfig: epsilon must be in (0, alpha]");
}

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double vxx = sxx - sx * sx / n;
    const double vxy = sxy - sx * sy / n;
    const double vyy = syy - sy * sy / n;
    if (vxx <= 0.0) throw std::invalid_argument("linear_fit: degenerate abscissas");
    LineFit f;
    f.slope = vxy / vxx;
    f.intercept = (sy - f.slope * sx) / n;
    f.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
    return f;
}

FrequencyResult wilson_interval(int count, int samples, double z) {
    if (samples <= 0) throw std::invalid_argument("wilson_interval: no samples");
    FrequencyResult r;
    r.count = count;
    r.samples = samples;
    const double n = double(samples);
    const double phat = double(count) / n;
    r.frequency = phat;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    r.wilson_low = std::max(0.0, center - half);
    r.wilson_high = std::min(1.0, center + half);
    return r;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median: empty");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::min(resolve_threads(threads), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

MonteCarloResult mc_error_moment(const ModelSpec& model, const NoiseConfig& noise, const SimConfig& sim,
                                 const EstimatorConfig& est, const State& initial) {
    validate_estimator(est);
    validate_model(model);

    // deterministic reference, integrated once and shared across samples
    State ref0 = initial;
    for (auto& f : ref0.fields) dealias_inplace(f);
    const StepPlan plan = plan_steps(sim.t_final, sim.dt);
    const std::uint64_t total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
    std::vector<State> reference;
    reference.reserve(total + 1);
    reference.push_back(ref0);
    {
        Stepper det(model, sim.grid, sim.dt, noise.kappa, nullptr, 0);
        State s = ref0;
        for (std::uint64_t i = 0; i < total; ++i) {
            if (i == plan.full_steps)
                det.partial_step(s, i, plan.remainder);
            else
                det.step(s, i);
            reference.push_back(s);
        }
    }

    const auto weights = sobolev_weights(sim.grid, -est.alpha);
    std::vector<double> sup_values(est.samples, std::numeric_limits<double>::quiet_NaN());

    parallel_for(est.samples, est.threads, [&](int sample) {
        Stepper sto(model, sim.grid, sim.dt, noise.kappa, &noise, sample_stream_key(sim.seed, sample));
        State s = ref0;
        double sup_sq = 0.0;
        bool bad = false;
        for (std::uint64_t i = 0; i < total && !bad; ++i) {
            if (i == plan.full_steps)
                sto.partial_step(s, i, plan.remainder);
            else
                sto.step(s, i);
            double d = 0.0;
            for (std::size_t f = 0; f < s.fields.size(); ++f)
                d += weighted_distance_sq(s.fields[f], reference[i + 1].fields[f], weights);
            if (!std::isfinite(d)) bad = true;
            sup_sq = std::max(sup_sq, d);
        }
        if (!bad) sup_values[sample] = std::sqrt(sup_sq);
    });

    MonteCarloResult r;
    std::vector<double> xp;
    for (double v : sup_values) {
        if (std::isfinite(v)) {
            r.per_sample.push_back(v);
            xp.push_back(std::pow(v, est.p));
        } else {
            ++r.excluded;
        }
    }
    if (xp.empty()) throw std::runtime_error("mc_error_moment: every sample blew up");
    r.samples = int(xp.size());
    std::tie(r.estimate, r.std_error) = moment_estimate(xp, est.p);
    return r;
}

RateSweepResult rate_sweep(const ModelSpec& model, const std::vector<NoiseConfig>& family,
                           const SimConfig& sim, const EstimatorConfig& est, const State& initial) {
    if (family.size() < 3) throw std::invalid_argument("rate_sweep: need at least 3 family members");
    RateSweepResult out;
    for (const auto& noise : family) {
        out.members.push_back(mc_error_moment(model, noise, sim, est, initial));
        out.theta_linf.push_back(noise.theta.linf_norm());
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (out.members[i].estimate <= 0.0) continue;
        xs.push_back(std::log(out.theta_linf[i]));
        ys.push_back(std::log(out.members[i].estimate));
    }
    if (xs.size() < 3) throw std::runtime_error("rate_sweep: fewer than 3 usable points");
    LineFit fit = linear_fit(xs, ys);
    out.fit.log_linf = xs;
    out.fit.log_estimate = ys;
    out.fit.slope = fit.slope;
    out.fit.intercept = fit.intercept;
    out.fit.r_squared = fit.r_squared;
    return out;
}

std::vector<MonteCarloResult> convolution_probe(const NoiseConfig& noise, double delta,
                                                const SpectralField& omega0,
                                                const std::vector<double>& betas, const SimConfig& sim,
                                                const EstimatorConfig& est) {
    validate_estimator(est);
    if (delta <= 0.0) throw std::invalid_argument("convolution_probe: delta must be > 0");
    const BoundNoise bound = bind_noise(noise, sim.grid);
    SpectralField frozen = dealias(omega0);
    const int frozen_band = max_support_component(frozen);

    std::vector<std::vector<double>> w_beta;
    for (double b : betas) w_beta.push_back(sobolev_weights(sim.grid, -b));
    const StepPlan plan = plan_steps(sim.t_final, sim.dt);
    const std::uint64_t total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);
    const auto heat_full = make_heat_factors(sim.grid, sim.dt * delta);

    std::vector<std::vector<double>> sups(betas.size(), std::vector<double>(est.samples, 0.0));

    parallel_for(est.samples, est.threads, [&](int sample) {
        rng::GaussianStream stream{sample_stream_key(sim.seed, sample)};
        SpectralField z = SpectralField::scalar(sim.grid);
        std::vector<double> sup(betas.size(), 0.0);
        for (std::uint64_t i = 0; i < total; ++i) {
            const double dt = i == plan.full_steps ? plan.remainder : sim.dt;
            if (bound.kappa > 0.0) {
                SpectralField dw = sample_increment(bound, dt, stream, i);
                TransportApplier transport(dw, frozen_band);
                z += transport.apply(frozen);
            }
            if (dt == sim.dt) {
                apply_mode_factors(z, heat_full);
            } else {
                auto h = make_heat_factors(sim.grid, dt * delta);
                apply_mode_factors(z, h);
            }
            for (std::size_t b = 0; b < betas.size(); ++b)
                sup[b] = std::max(sup[b], weighted_norm_sq(z, w_beta[b]));
        }
        for (std::size_t b = 0; b < betas.size(); ++b) sups[b][sample] = std::sqrt(sup[b]);
    });

    std::vector<MonteCarloResult> out;
    for (std::size_t b = 0; b < betas.size(); ++b) {
        MonteCarloResult r;
        r.samples = est.samples;
        r.per_sample = sups[b];
        std::vector<double> xp;
        for (double v : sups[b]) xp.push_back(std::pow(v, est.p));
        std::tie(r.estimate, r.std_error) = moment_estimate(xp, est.p);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<FrequencyResult> blowup_probability(const ModelSpec& model,
                                                const std::vector<NoiseConfig>& family,
                                                const SimConfig& sim, int samples, int threads,
                                                const State& initial) {
    if (samples < 1) throw std::invalid_argument("blowup_probability: samples must be >= 1");
    std::vector<FrequencyResult> out;
    for (const auto& noise : family) {
        std::vector<int> flags(samples, 0);
        parallel_for(samples, threads, [&](int sample) {
            SimConfig cfg = sim;
            cfg.seed = sample_stream_key(sim.seed, sample);
            cfg.record_every = 1 << 30;  // snapshots not needed
            Trajectory tr = simulate_stochastic(model, noise, cfg, initial);
            flags[sample] = tr.blowup ? 1 : 0;
        });
        int count = 0;
        for (int f : flags) count += f;
        out.push_back(wilson_interval(count, samples));
    }
    return out;
}

std::vector<MixingPoint> mixing_variance(const SpectralField& f0, const SpectralField& phi,
                                         const std::vector<double>& times, const NoiseConfig& noise,
                                         const SimConfig& sim, int samples, int threads,
                                         const std::optional<SpectralField>& chi) {
    if (samples < 1) throw std::invalid_argument("mixing_variance: samples must be >= 1");
    SpectralField start = dealias(f0);
    const double f0_linf = physical_max_abs(start);  // discrete sup surrogate
    const double phi_l2 = l2_norm(phi);
    const double theta_linf = noise.theta.linf_norm();

    // probe times must sit on the step grid
    std::vector<std::uint64_t> steps;
    for (double t : times) {
        const double raw = t / sim.dt;
        const std::uint64_t idx = std::uint64_t(std::llround(raw));
        if (std::abs(raw - double(idx)) > 1e-6)
            throw std::invalid_argument("mixing_variance: probe time not on the step grid");
        steps.push_back(idx);
    }
    const std::uint64_t total = steps.empty() ? 0 : *std::max_element(steps.begin(), steps.end());

    // exact heat-flow comparison profiles
    std::vector<SpectralField> fbar;
    for (double t : times) fbar.push_back(heat_multiplier(start, t, noise.kappa));
    std::vector<double> fbar_pairing;
    for (const auto& fb : fbar) fbar_pairing.push_back(inner_product(fb, phi));

    ModelSpec transport = LinearTransportSpec{};
    std::vector<std::vector<double>> pairings(times.size(), std::vector<double>(samples, 0.0));
    std::vector<std::vector<double>> smeared(times.size(), std::vector<double>(samples, 0.0));

    parallel_for(samples, threads, [&](int sample) {
        Stepper st(transport, sim.grid, sim.dt, noise.kappa, &noise, sample_stream_key(sim.seed, sample));
        State s;
        s.fields.push_back(start);
        for (std::uint64_t i = 0; i <= total; ++i) {
            for (std::size_t m = 0; m < steps.size(); ++m) {
                if (steps[m] != i) continue;
                pairings[m][sample] = inner_product(s.fields[0], phi);
                if (chi) {
                    double acc = 0.0;
                    for (std::size_t f = 0; f < s.fields[0].points(); ++f)
                        acc += std::norm(chi->at(0, f)) * std::norm(s.fields[0].at(0, f) - fbar[m].at(0, f));
                    smeared[m][sample] = acc;
                }
            }
            if (i < total) st.step(s, i);
        }
    });

    std::vector<MixingPoint> out;
    for (std::size_t m = 0; m < times.size(); ++m) {
        MixingPoint pt;
        pt.time = times[m];
        double mean = 0.0, meansq = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double dev = pairings[m][i] - fbar_pairing[m];
            mean += dev * dev;
            meansq += dev * dev * dev * dev;
        }
        mean /= samples;
        meansq /= samples;
        pt.variance = mean;
        pt.std_error = samples > 1 ? std::sqrt(std::max(0.0, meansq - mean * mean) / samples) : 0.0;
        pt.bound = theta_linf * theta_linf * f0_linf * f0_linf * phi_l2 * phi_l2;
        if (chi) {
            double sm = 0.0, smsq = 0.0;
            for (int i = 0; i < samples; ++i) {
                sm += smeared[m][i];
                smsq += smeared[m][i] * smeared[m][i];
            }
            sm /= samples;
            smsq /= samples;
            pt.smeared_mean = sm;
            pt.smeared_std_error = samples > 1 ? std::sqrt(std::max(0.0, smsq - sm * sm) / samples) : 0.0;
            const double chi_l2 = l2_norm(*chi);
            pt.smeared_bound = theta_linf * theta_linf * f0_linf * f0_linf * chi_l2 * chi_l2;
        }
        out.push_back(pt);
    }
    return out;
}

double hs_truncation_tail(double s, double k_max, int dim) {
    if (dim != 2) throw std::invalid_argument("hs_truncation_tail: implemented for d = 2");
    const double r_switch = 4.0 * k_max + 16.0;
    double lattice = 0.0;
    const int r = int(std::floor(r_switch)) + 1;
    for (int kx = -r; kx <= r; ++kx)
        for (int ky = -r; ky <= r; ++ky) {
            const double n2 = double(kx) * kx + double(ky) * ky;
            if (n2 <= k_max * k_max || n2 > r_switch * r_switch) continue;
            if (n2 == 0.0) continue;
            lattice += std::pow(1.0 + n2, -s);
        }
    // continuum remainder beyond the switch radius
    const double integral = std::numbers::pi / (s - 1.0) * std::pow(1.0 + r_switch * r_switch, 1.0 - s);
    return 4.0 * (lattice + integral);
}

HsMixingResult hilbert_schmidt_mixing(const NoiseConfig& noise, double heat_kappa, double s, double alpha,
                                      double k_max, const SimConfig& sim, int samples, int threads) {
    if (!(s > noise.dim() / 2.0))
        throw std::invalid_argument("hilbert_schmidt_mixing: s must exceed d/2");
    if (samples < 1) throw std::invalid_argument("hilbert_schmidt_mixing: samples must be >= 1");
    const FourierGrid& grid = sim.grid;

    // half-lattice representatives of the CONS modes inside the truncation
    struct Mode {
        Wavevector k;
        double weight;  // (1 + |k|^2)^{-s}
    };
    std::vector<Mode> modes;
    const int r = int(std::floor(k_max));
    for (int kx = -r; kx <= r; ++kx)
        for (int ky = -r; ky <= r; ++ky) {
            Wavevector k{kx, ky, 0};
            const double n2 = double(kx) * kx + double(ky) * ky;
            if (n2 == 0.0 || n2 > k_max * k_max) continue;
            if (!positive_half_lattice(k, 2)) continue;
            modes.push_back({k, std::pow(1.0 + n2, -s)});
        }

    const BoundNoise bound = bind_noise(noise, grid);
    const auto w_alpha = sobolev_weights(grid, -alpha);
    const auto heat_noise = make_heat_factors(grid, sim.dt * noise.kappa);
    const StepPlan plan = plan_steps(sim.t_final, sim.dt);
    const std::uint64_t total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);

    std::vector<double> per_sample(samples, 0.0);
    parallel_for(samples, threads, [&](int sample) {
        rng::GaussianStream stream{sample_stream_key(sim.seed, sample)};
        // two real fields per CONS pair: cosine and sine parts of e_k
        std::vector<SpectralField> cosf, sinf;
        std::vector<double> sup(modes.size(), 0.0);
        for (const auto& m : modes) {
            SpectralField c = SpectralField::scalar(grid);
            c.set_mode(0, m.k, Complex(0.5, 0.0));
            c.set_mode(0, {-m.k[0], -m.k[1], 0}, Complex(0.5, 0.0));
            SpectralField sn = SpectralField::scalar(grid);
            sn.set_mode(0, m.k, Complex(0.0, -0.5));
            sn.set_mode(0, {-m.k[0], -m.k[1], 0}, Complex(0.0, 0.5));
            cosf.push_back(std::move(c));
            sinf.push_back(std::move(sn));
        }
        double t = 0.0;
        for (std::uint64_t i = 0; i < total; ++i) {
            const double dt = i == plan.full_steps ? plan.remainder : sim.dt;
            SpectralField dw = sample_increment(bound, dt, stream, i);
            TransportApplier transport(dw, grid.dealias_limit());
            const auto* heat = &heat_noise;
            std::vector<double> heat_partial;
            if (dt != sim.dt) {
                heat_partial = make_heat_factors(grid, dt * noise.kappa);
                heat = &heat_partial;
            }
            t += dt;
            for (std::size_t m = 0; m < modes.size(); ++m) {
                for (SpectralField* f : {&cosf[m], &sinf[m]}) {
                    SpectralField next = *f;
                    next -= transport.apply(*f);
                    apply_mode_factors(next, *heat);
                    *f = std::move(next);
                }
                // || (S_t - P_t) e_k ||^2 = ||.||^2 of (cos part) + (sin part)
                const double decay = std::exp(-four_pi_sq * heat_kappa * t *
                                              (double(modes[m].k[0]) * modes[m].k[0] +
                                               double(modes[m].k[1]) * modes[m].k[1]));
                double dist = 0.0;
                const std::size_t fp = grid.flat_index(modes[m].k);
                Wavevector neg{-modes[m].k[0], -modes[m].k[1], 0};
                const std::size_t fn = grid.flat_index(neg);
                for (const SpectralField* f : {&cosf[m], &sinf[m]}) {
                    double nrm = weighted_norm_sq(*f, w_alpha);
                    // replace the two initial-mode entries by their distance
                    // to the decayed profile
                    const Complex cp = f->at(0, fp), cn = f->at(0, fn);
                    const Complex ip = f == &cosf[m] ? Complex(0.5, 0.0) : Complex(0.0, -0.5);
                    const Complex in = std::conj(ip);
                    nrm -= w_alpha[fp] * std::norm(cp) + w_alpha[fn] * std::norm(cn);
                    nrm += w_alpha[fp] * std::norm(cp - decay * ip) + w_alpha[fn] * std::norm(cn - decay * in);
                    dist += nrm;
                }
                sup[m] = std::max(sup[m], dist);
            }
        }
        double value = 0.0;
        for (std::size_t m = 0; m < modes.size(); ++m) value += 2.0 * modes[m].weight * sup[m];
        per_sample[sample] = value;
    });

    HsMixingResult out;
    out.modes = int(modes.size()) * 2;  // +/-k pairs
    out.tail_bound = hs_truncation_tail(s, k_max, noise.dim());
    out.estimate.samples = samples;
    out.estimate.per_sample = per_sample;
    std::tie(out.estimate.estimate, out.estimate.std_error) = moment_estimate(per_sample, 1.0);
    return out;
}

DecayFit dissipation_decay_fit(const NoiseConfig& noise, double nu, const SpectralField& f0,
                               const SimConfig& sim, int samples, int threads, double t_min) {
    if (sim.t_final < t_min + 2.0)
        throw std::invalid_argument("dissipation_decay_fit: trajectory shorter than 2 unit intervals");
    if (std::abs(f0.mean_mode()) > 1e-12)
        throw std::invalid_argument("dissipation_decay_fit: f0 must be mean-zero");
    const double steps_per_unit_raw = 1.0 / sim.dt;
    const std::uint64_t steps_per_unit = std::uint64_t(std::llround(steps_per_unit_raw));
    if (std::abs(steps_per_unit_raw - double(steps_per_unit)) > 1e-6)
        throw std::invalid_argument("dissipation_decay_fit: dt must divide the unit interval");
    const int marks = int(std::floor(sim.t_final + 1e-9));
    const std::uint64_t total = steps_per_unit * std::uint64_t(marks);

    ModelSpec model = TransportDiffusionSpec{nu};
    SpectralField start = dealias(f0);
    std::vector<std::vector<double>> l2_at(std::size_t(marks) + 1, std::vector<double>(samples, 0.0));

    parallel_for(samples, threads, [&](int sample) {
        Stepper st(model, sim.grid, sim.dt, noise.kappa, &noise, sample_stream_key(sim.seed, sample));
        State s;
        s.fields.push_back(start);
        l2_at[0][sample] = l2_norm(s.fields[0]);
        for (std::uint64_t i = 0; i < total; ++i) {
            st.step(s, i);
            if ((i + 1) % steps_per_unit == 0) l2_at[(i + 1) / steps_per_unit][sample] = l2_norm(s.fields[0]);
        }
    });

    DecayFit out;
    for (int n = 0; n <= marks; ++n) out.times.push_back(double(n));
    for (int n = 0; n <= marks; ++n) {
        double acc = 0.0;
        for (int i = 0; i < samples; ++i) acc += std::log(l2_at[n][i]);
        out.mean_log_l2.push_back(acc / samples);
    }
    // per-sample least-squares rate over [t_min, T]
    std::vector<double> xs;
    for (int n = 0; n <= marks; ++n)
        if (double(n) >= t_min - 1e-9) xs.push_back(double(n));
    for (int i = 0; i < samples; ++i) {
        std::vector<double> ys;
        for (int n = 0; n <= marks; ++n)
            if (double(n) >= t_min - 1e-9) ys.push_back(std::log(l2_at[n][i]));
        out.rates.push_back(-linear_fit(xs, ys).slope);
    }
    out.median_rate = median(out.rates);
    for (int n = 0; n < marks; ++n) {
        double a = 0.0, b = 0.0;
        for (int i = 0; i < samples; ++i) {
            a += l2_at[n][i] * l2_at[n][i];
            b += l2_at[n + 1][i] * l2_at[n + 1][i];
        }
        out.contraction.push_back(b / a);
    }
    return out;
}

}  // namespace tspde

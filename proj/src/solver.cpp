#include "tspde/solver.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "tspde/fft.hpp"
#include "tspde/spectral_ops.hpp"

namespace tspde {

StepPlan plan_steps(double t_final, double dt) {
    if (t_final < 0.0) throw std::invalid_argument("plan_steps: t_final must be >= 0");
    if (dt <= 0.0) throw std::invalid_argument("plan_steps: dt must be > 0");
    StepPlan p;
    const double steps = t_final / dt;
    p.full_steps = static_cast<std::uint64_t>(std::floor(steps + 1e-9));
    const double rem = t_final - double(p.full_steps) * dt;
    p.remainder = rem > 1e-12 * std::max(t_final, dt) ? rem : 0.0;
    return p;
}

double advective_cfl_bound(const ModelSpec& model, const State& state, double safety) {
    const FourierGrid& grid = state.fields[0].grid();
    double umax = 0.0;
    if (std::holds_alternative<NavierStokesSpec>(model) || std::holds_alternative<BoussinesqSpec>(model)) {
        const SpectralField& w = state.fields.back();
        umax = physical_max_abs(biot_savart(w));
    } else if (const auto* m = std::get_if<MsqgSpec>(&model)) {
        umax = physical_max_abs(k_beta_convolve(state.fields[0], m->beta));
    } else if (std::get_if<KellerSegelSpec>(&model)) {
        umax = physical_max_abs(inv_gradient(state.fields[0]));
    } else {
        return std::numeric_limits<double>::infinity();  // pure transport: no self-advection
    }
    if (umax <= 0.0) return std::numeric_limits<double>::infinity();
    return safety / (double(grid.n) * umax);
}

Stepper::Stepper(const ModelSpec& model, const FourierGrid& grid, double dt, double kappa,
                 const NoiseConfig* noise, std::uint64_t stream_key)
    : model_(model), grid_(grid), dt_(dt), kappa_(kappa) {
    validate_model(model);
    if (dt <= 0.0) throw std::invalid_argument("Stepper: dt must be > 0");
    if (noise) {
        if (noise->kappa != kappa) throw std::invalid_argument("Stepper: kappa differs from noise kappa");
        noise_ = bind_noise(*noise, grid);
        stream_ = rng::GaussianStream{stream_key};
    }
    diffusivities_ = effective_diffusivities(model, kappa);
    for (double d : diffusivities_) heat_.push_back(make_heat_factors(grid, dt * d));
}

void Stepper::partial_step(State& state, std::uint64_t step_index, double dt) {
    substep(state, step_index, dt);
}

void Stepper::substep(State& state, std::uint64_t step_index, double dt) {
    const bool has_drift = !(std::holds_alternative<LinearTransportSpec>(model_) ||
                             std::holds_alternative<TransportDiffusionSpec>(model_));
    State drift;
    if (has_drift) drift = nonlinearity(model_, state);
    std::optional<TransportApplier> transport;
    if (noise_ && noise_->kappa > 0.0) {
        SpectralField dw = sample_increment(*noise_, dt, stream_, step_index);
        transport.emplace(dw, grid_.dealias_limit());
    }
    const bool full = dt == dt_;
    for (std::size_t i = 0; i < state.fields.size(); ++i) {
        SpectralField next = state.fields[i];
        if (has_drift) next.add_scaled(dt, drift.fields[i]);
        if (transport) next -= transport->apply(state.fields[i]);
        if (full) {
            apply_mode_factors(next, heat_[i]);
        } else {
            auto factors = make_heat_factors(grid_, dt * diffusivities_[i]);
            apply_mode_factors(next, factors);
        }
        state.fields[i] = std::move(next);
    }
}

namespace {

struct DiagWeights {
    std::vector<double> h1;
    std::vector<double> hneg;
    std::vector<double> cutoff;  // only for Keller-Segel with cutoff

    DiagWeights(const FourierGrid& g, double diag_alpha, double cutoff_alpha) {
        const std::size_t np = g.num_points();
        h1.resize(np);
        hneg.resize(np);
        if (cutoff_alpha > 0.0) cutoff.resize(np);
        h1[0] = 1.0;
        hneg[0] = 1.0;
        if (cutoff_alpha > 0.0) cutoff[0] = 1.0;
        for (std::size_t f = 1; f < np; ++f) {
            const double k2 = g.wavevector_norm_sq(f);
            h1[f] = k2;
            hneg[f] = std::pow(k2, -diag_alpha);
            if (cutoff_alpha > 0.0) cutoff[f] = std::pow(k2, -cutoff_alpha);
        }
    }
};

double weighted_norm(const SpectralField& f, const std::vector<double>& w) {
    double s = 0.0;
    const std::size_t np = f.points();
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t flat = 0; flat < np; ++flat) s += w[flat] * std::norm(f.at(c, flat));
    return std::sqrt(s);
}

Trajectory integrate(const ModelSpec& model, const NoiseConfig* noise, double kappa, const SimConfig& cfg,
                     const State& initial) {
    if ((int)initial.fields.size() != field_count(model))
        throw std::invalid_argument("simulate: state has wrong field count for model");
    for (const auto& f : initial.fields)
        if (f.grid() != cfg.grid) throw std::invalid_argument("simulate: state grid differs from config grid");

    const auto* ks = std::get_if<KellerSegelSpec>(&model);
    DiagWeights weights(cfg.grid, cfg.diag_alpha, ks && ks->cutoff_enabled ? ks->cutoff_alpha : 0.0);

    State state = initial;
    for (auto& f : state.fields) dealias_inplace(f);

    Stepper stepper(model, cfg.grid, cfg.dt, kappa, noise, rng::derive_key(cfg.seed, 0x57e9));

    double rho_blowup_threshold = 0.0;
    if (ks) {
        const double rho0 = std::hypot(l2_norm(state.fields[0]), ks->rho_bar);
        rho_blowup_threshold = cfg.blowup_factor * rho0;
    }

    const double cfl = advective_cfl_bound(model, state, cfg.cfl_safety);
    if (cfg.dt > cfl)
        std::cerr << "[tspde] warning: dt=" << cfg.dt << " exceeds the advective CFL bound " << cfl
                  << " for the initial data\n";

    Trajectory traj;
    const StepPlan plan = plan_steps(cfg.t_final, cfg.dt);
    const std::uint64_t total = plan.full_steps + (plan.remainder > 0.0 ? 1 : 0);

    auto record_diag = [&](double t) {
        DiagnosticsRow row;
        row.t = t;
        for (const auto& f : state.fields) {
            row.l2.push_back(l2_norm(f));
            row.h1.push_back(weighted_norm(f, weights.h1));
            row.h_neg.push_back(weighted_norm(f, weights.hneg));
        }
        traj.diagnostics.push_back(std::move(row));
    };
    auto record_snapshot = [&](double t) {
        traj.times.push_back(t);
        traj.snapshots.push_back(state);
    };

    record_diag(0.0);
    record_snapshot(0.0);

    for (std::uint64_t s = 0; s < total; ++s) {
        const bool partial = s == plan.full_steps;
        const double step_dt = partial ? plan.remainder : cfg.dt;
        const double t = partial ? cfg.t_final : double(s + 1) * cfg.dt;
        if (partial)
            stepper.partial_step(state, s, step_dt);
        else
            stepper.step(state, s);
        record_diag(t);

        const auto& row = traj.diagnostics.back();
        bool bad = false;
        for (double v : row.l2)
            if (!std::isfinite(v)) bad = true;
        if (ks && !bad) {
            const double rho_norm = std::hypot(row.l2[0], ks->rho_bar);
            if (rho_norm > rho_blowup_threshold) bad = true;
            if (ks->cutoff_enabled && !traj.cutoff_exceeded_time) {
                if (weighted_norm(state.fields[0], weights.cutoff) > ks->cutoff_radius)
                    traj.cutoff_exceeded_time = t;
            }
        }
        if (bad) {
            traj.blowup = true;
            traj.blowup_time = t;
            traj.blowup_step = s + 1;
            record_snapshot(t);
            return traj;
        }
        if ((s + 1) % std::uint64_t(cfg.record_every) == 0 || s + 1 == total) record_snapshot(t);
    }
    return traj;
}

}  // namespace

Trajectory simulate_stochastic(const ModelSpec& model, const NoiseConfig& noise, const SimConfig& cfg,
                               const State& initial) {
    return integrate(model, &noise, noise.kappa, cfg, initial);
}

Trajectory simulate_deterministic(const ModelSpec& model, double kappa, const SimConfig& cfg,
                                  const State& initial) {
    return integrate(model, nullptr, kappa, cfg, initial);
}

Trajectory simulate(const ModelSpec& model, const std::optional<NoiseConfig>& noise, double kappa,
                    const SimConfig& cfg, const State& initial) {
    return noise ? simulate_stochastic(model, *noise, cfg, initial)
                 : simulate_deterministic(model, kappa, cfg, initial);
}

PairResult run_pair(const ModelSpec& model, const NoiseConfig& noise, const SimConfig& cfg,
                    const State& initial, double error_alpha) {
    PairResult out;
    out.stochastic = simulate_stochastic(model, noise, cfg, initial);
    out.deterministic = simulate_deterministic(model, noise.kappa, cfg, initial);
    const std::size_t count = std::min(out.stochastic.snapshots.size(), out.deterministic.snapshots.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double d = 0.0;
        for (std::size_t f = 0; f < out.stochastic.snapshots[i].fields.size(); ++f)
            d = std::hypot(d, sobolev_distance(out.stochastic.snapshots[i].fields[f],
                                               out.deterministic.snapshots[i].fields[f], -error_alpha));
        sup = std::max(sup, d);
        out.error_sup_series.push_back(sup);
    }
    out.error_sup = sup;
    return out;
}

}  // namespace tspde

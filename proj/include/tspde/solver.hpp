// solver.hpp
// Exponential Euler-Maruyama stepping of the Ito-form equations:
//   state <- exp(dt delta Lap) [ state + dt F(state) - (dW . grad) state ]
// per evolved field, with per-field diffusivity delta. With the noise
// dropped the same integrator steps the deterministic limit equations; with
// F = 0 and no noise it reproduces the heat semigroup exactly per mode.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tspde/models.hpp"
#include "tspde/noise.hpp"

namespace tspde {

struct SimConfig {
    double t_final = 1.0;
    double dt = 1e-3;
    FourierGrid grid;
    int record_every = 1;
    std::uint64_t seed = 0;
    double diag_alpha = 0.5;      // H^{-alpha} diagnostic norm index
    double blowup_factor = 10.0;  // L2 threshold multiplier for blow-up
    double cfl_safety = 0.5;
};

// Number of full steps and the trailing partial step (0 when T/dt is
// integral up to rounding).
struct StepPlan {
    std::uint64_t full_steps = 0;
    double remainder = 0.0;
};
StepPlan plan_steps(double t_final, double dt);

// Advective CFL bound dt <= safety / (N * ||u||_inf) from the current
// state; advisory (the noise part of the step is unconditionally
// mean-square stable for this integrator).
double advective_cfl_bound(const ModelSpec& model, const State& state, double safety);

struct DiagnosticsRow {
    double t = 0.0;
    std::vector<double> l2;     // per field
    std::vector<double> h1;     // per field
    std::vector<double> h_neg;  // per field, H^{-diag_alpha}
};

struct Trajectory {
    std::vector<double> times;      // recorded snapshot times
    std::vector<State> snapshots;   // states at `times`
    std::vector<DiagnosticsRow> diagnostics;  // every step (incl. t = 0)
    bool blowup = false;
    double blowup_time = 0.0;
    std::uint64_t blowup_step = 0;
    // With the Keller-Segel cutoff enabled: first time ||u||_{H^{-alpha}}
    // exceeded the cutoff radius, if any.
    std::optional<double> cutoff_exceeded_time;
};

// Drives one trajectory; estimators use it directly to avoid storing
// snapshots they do not need.
class Stepper {
  public:
    // `noise == nullptr` steps the deterministic limit equation; kappa is
    // the scaling-limit viscosity in both cases (for stochastic runs it
    // must equal noise->kappa).
    Stepper(const ModelSpec& model, const FourierGrid& grid, double dt, double kappa,
            const NoiseConfig* noise, std::uint64_t stream_key);

    void step(State& state, std::uint64_t step_index) { substep(state, step_index, dt_); }
    // Final partial step with its own heat factors.
    void partial_step(State& state, std::uint64_t step_index, double dt);

    bool stochastic() const { return noise_.has_value(); }
    const ModelSpec& model() const { return model_; }
    double dt() const { return dt_; }

  private:
    void substep(State& state, std::uint64_t step_index, double dt);

    ModelSpec model_;
    FourierGrid grid_;
    double dt_;
    double kappa_;
    std::optional<BoundNoise> noise_;
    rng::GaussianStream stream_;
    std::vector<double> diffusivities_;
    std::vector<std::vector<double>> heat_;  // per field, for the full dt
};

// Integrate and record. The initial state is dealiased on entry. Blow-up
// (non-finite values, or for Keller-Segel an L2 excursion past
// blowup_factor times the initial rho norm) stops the run with partial data.
Trajectory simulate_stochastic(const ModelSpec& model, const NoiseConfig& noise, const SimConfig& cfg,
                               const State& initial);
Trajectory simulate_deterministic(const ModelSpec& model, double kappa, const SimConfig& cfg,
                                  const State& initial);
// Spec-shaped entry point: noise-or-none.
Trajectory simulate(const ModelSpec& model, const std::optional<NoiseConfig>& noise, double kappa,
                    const SimConfig& cfg, const State& initial);

struct PairResult {
    Trajectory stochastic;
    Trajectory deterministic;
    // sup-so-far of ||w - w~||_{H^{-alpha}} at each recorded step
    std::vector<double> error_sup_series;
    double error_sup = 0.0;
};

// Stochastic and deterministic runs from identical initial data, with the
// running sup of their H^{-alpha} distance.
PairResult run_pair(const ModelSpec& model, const NoiseConfig& noise, const SimConfig& cfg,
                    const State& initial, double error_alpha);

}  // namespace tspde

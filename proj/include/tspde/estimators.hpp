// estimators.hpp
// Monte-Carlo functional estimation over noise realizations: scaling-limit
// error moments and rate sweeps, stochastic-convolution scaling probes,
// blow-up frequencies, mixing variance inequalities, Hilbert-Schmidt mixing
// distance, and dissipation decay fits. Every estimator is a pure function
// of (inputs, seed); samples run thread-parallel on disjoint counter-based
// streams and reduce in a fixed order.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "tspde/solver.hpp"

namespace tspde {

struct EstimatorConfig {
    int samples = 16;
    double p = 2.0;                   // moment order, >= 1
    double alpha = 0.9;               // error norm index, in (0,1)
    double epsilon = 0.25;            // slack, in (0, alpha]
    double confidence_multiplier = 3.0;
    int threads = 0;                  // 0 = hardware concurrency
};
void validate_estimator(const EstimatorConfig& cfg);

struct MonteCarloResult {
    double estimate = 0.0;
    double std_error = 0.0;
    int samples = 0;                   // usable samples
    int excluded = 0;                  // blow-up samples, reported separately
    std::vector<double> per_sample;    // retained per-sample functional values
};

struct RateFit {
    std::vector<double> log_linf;      // abscissas log ||theta^n||_linf
    std::vector<double> log_estimate;  // ordinates log(estimated moment)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct DecayFit {
    std::vector<double> times;             // unit-interval sample times
    std::vector<double> mean_log_l2;       // ensemble mean of log ||f_t||
    std::vector<double> rates;             // per-sample fitted decay rates
    double median_rate = 0.0;
    std::vector<double> contraction;       // E||f_{n+1}||^2 / E||f_n||^2, n >= 0
};

struct FrequencyResult {
    int count = 0;
    int samples = 0;
    double frequency = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
};

// --- statistics helpers ---

// Least squares y = slope x + intercept with coefficient of determination.
struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 1.0;
};
LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Wilson 95% score interval for a binomial frequency.
FrequencyResult wilson_interval(int count, int samples, double z = 1.959963984540054);

double median(std::vector<double> values);

// Runs fn(i) for i in [0, count) on `threads` workers; any exception is
// rethrown on the caller thread.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// --- estimators ---

// E[ sup_t ||w - w~||_{H^{-alpha}}^p ]^{1/p} between the stochastic solution
// and the deterministic limit from the same initial data. The deterministic
// reference is integrated once and shared across samples. Standard error by
// the delta method on the p-th moment. Blown-up samples are excluded and
// counted in `excluded`.
MonteCarloResult mc_error_moment(const ModelSpec& model, const NoiseConfig& noise, const SimConfig& sim,
                                 const EstimatorConfig& est, const State& initial);

// mc_error_moment across a theta family with common random numbers, plus
// the log-log regression of the estimate against ||theta||_linf.
struct RateSweepResult {
    std::vector<MonteCarloResult> members;
    std::vector<double> theta_linf;
    RateFit fit;
};
RateSweepResult rate_sweep(const ModelSpec& model, const std::vector<NoiseConfig>& family,
                           const SimConfig& sim, const EstimatorConfig& est, const State& initial);

// Frozen-field stochastic convolution probe: Z_{n+1} = e^{dt delta Lap}
// (Z_n + (dW_n . grad) w0), estimating E[sup_t ||Z||_{H^{-beta}}^p]^{1/p}
// for each requested beta. Freezing w0 isolates the sqrt(kappa), theta and
// delta scalings from solution feedback.
std::vector<MonteCarloResult> convolution_probe(const NoiseConfig& noise, double delta,
                                                const SpectralField& omega0,
                                                const std::vector<double>& betas, const SimConfig& sim,
                                                const EstimatorConfig& est);

// Empirical blow-up frequency before sim.t_final per family member, with
// Wilson confidence intervals.
std::vector<FrequencyResult> blowup_probability(const ModelSpec& model,
                                                const std::vector<NoiseConfig>& family,
                                                const SimConfig& sim, int samples, int threads,
                                                const State& initial);

struct MixingPoint {
    double time = 0.0;
    double variance = 0.0;       // MC variance of <f_t, phi> around <f~_t, phi>
    double std_error = 0.0;
    double bound = 0.0;          // ||theta||_linf^2 ||f0||_Linf^2 ||phi||_L2^2
    double smeared_mean = 0.0;   // E|| chi*f_t - chi*f~_t ||_L2^2
    double smeared_std_error = 0.0;
    double smeared_bound = 0.0;  // ||theta||_linf^2 ||f0||_Linf^2 ||chi||_L2^2
};

// Weak-norm mixing probe for the linear stochastic transport equation; the
// deterministic comparison profile is the exact heat flow of f0. Probe
// times must sit on the step grid.
std::vector<MixingPoint> mixing_variance(const SpectralField& f0, const SpectralField& phi,
                                         const std::vector<double>& times, const NoiseConfig& noise,
                                         const SimConfig& sim, int samples, int threads,
                                         const std::optional<SpectralField>& chi);

struct HsMixingResult {
    MonteCarloResult estimate;  // E[ sum_k sup_t ||(S_t - P_t) g_k||^2_{H^{-alpha}} ]
    double tail_bound = 0.0;    // 4 sum_{|k| > K_max} (1 + |k|^2)^{-s}
    int modes = 0;              // CONS modes inside the truncation
};

// Truncated Hilbert-Schmidt distance between the random transport solution
// operator and the heat semigroup e^{heat_kappa t Lap}, over the CONS
// g_k = (1+|k|^2)^{-s/2} e_k with |k| <= k_max. Requires s > d/2.
HsMixingResult hilbert_schmidt_mixing(const NoiseConfig& noise, double heat_kappa, double s, double alpha,
                                      double k_max, const SimConfig& sim, int samples, int threads);

// Analytic tail of the HS truncation; monotone decreasing in k_max.
double hs_truncation_tail(double s, double k_max, int dim);

// Transport-diffusion decay: per-sample exponential rate fitted on
// log ||f_t|| over [t_min, T] at unit-time marks, ensemble median, and
// per-unit-interval contraction factors of the ensemble mean energy.
DecayFit dissipation_decay_fit(const NoiseConfig& noise, double nu, const SpectralField& f0,
                               const SimConfig& sim, int samples, int threads, double t_min = 1.0);

}  // namespace tspde

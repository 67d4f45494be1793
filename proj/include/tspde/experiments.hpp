// experiments.hpp
// Experiment orchestration: JSON config parsing with exhaustive validation,
// the experiment runners behind the CLI subcommands, CSV / JSON summary
// emission, and standalone plot-script generation.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tspde/estimators.hpp"

namespace tspde {

// All validation failures of a config, not first-error-only.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> v);
    std::vector<std::string> violations;
};

struct ThetaSpecConfig {
    std::string family = "band";  // band | ball | kraichnan | file
    double a = 0.0;               // decay exponent for band/ball
    int n = 1;                    // band/ball index (single-noise experiments)
    double k0 = 1.0, zeta = 4.0 / 3.0, k_max = 8.0;  // kraichnan
    std::string file;             // imported spectrum (family = file)

    ThetaSpectrum build(int member_n) const;  // member_n <= 0: use this->n
};

struct InitialConfig {
    std::string type = "shear";  // shear | gaussian-bump | random-band | two-mode
    double amplitude = 1.0;      // shear
    double mass = 1.0;           // gaussian-bump
    double sigma = 0.1;          // gaussian-bump
    int band = 8;                // random-band
    std::uint64_t seed = 1;      // random-band
    double norm = 1.0;           // random-band L2 norm

    SpectralField build(const FourierGrid& grid) const;
};

struct ExperimentConfig {
    std::string experiment;  // simulate | rate-sweep | blowup-sweep | mixing |
                             // dissipation | convolution-probe | hs-mixing
    std::uint64_t seed = 0;
    std::string output = "out";
    int threads = 0;
    int grid_n = 64;
    double dt = 1e-3;
    double t_final = 1.0;
    int record_every = 1;
    bool deterministic = false;  // simulate only

    ModelSpec model = LinearTransportSpec{};
    double kappa = 1.0;
    ThetaSpecConfig theta;
    EstimatorConfig estimator;
    InitialConfig initial;

    std::vector<int> sweep_members;      // rate-sweep / blowup-sweep / hs-mixing
    std::vector<double> mixing_times;    // mixing
    std::array<int, 2> phi_mode{1, 0};   // mixing test mode
    double smear_sigma = 0.0;            // mixing; 0 disables the smeared probe
    double conv_delta = 1.0;             // convolution-probe
    std::vector<double> conv_betas;      // convolution-probe
    std::vector<double> kappa_sweep;     // convolution-probe / dissipation
    double diss_nu = 0.01;               // dissipation
    double hs_s = 2.0;                   // hs-mixing
    double hs_alpha = 0.5;
    double hs_k_max = 8.0;
    std::optional<double> hs_heat_kappa;  // defaults to kappa

    FourierGrid grid() const { return FourierGrid(2, grid_n); }
    SimConfig sim() const;
    std::string to_json() const;  // canonical serialization
};

// Parses and fully validates; throws ConfigError carrying every violation.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

// Runs the experiment and writes results.csv + summary.json (+ plot script
// where applicable) under cfg.output. Exit code contract: 0 success, 2 when
// samples blew up in a non-blow-up experiment, 1 is reserved for errors
// thrown out of this function.
int run_experiment(const ExperimentConfig& cfg);

// Standalone plotting script for a results CSV. Recognized kinds:
// "rate" (log-log sweep with fitted slope), "decay" (semilog decay curves),
// "frequency" (per-member frequency bars with confidence intervals).
std::string emit_plot_script(const std::string& csv_filename, const std::string& kind);

// 17-significant-digit decimal formatting used by every CSV/JSON emitter.
std::string format_full(double v);

}  // namespace tspde

#include "tspde/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "tspde/fft.hpp"
#include "tspde/spectral_ops.hpp"

namespace tspde {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

struct Validator {
    std::vector<std::string> violations;

    void fail(const std::string& msg) { violations.push_back(msg); }
    void check(bool ok, const std::string& msg) {
        if (!ok) fail(msg);
    }
    void known_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
        for (const auto& [key, _] : obj.items())
            if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
    }
    template <typename T>
    T get(const json& obj, const std::string& where, const std::string& key, T fallback, bool required = false) {
        if (!obj.contains(key)) {
            if (required) fail("missing field '" + key + "' in " + where);
            return fallback;
        }
        try {
            return obj.at(key).get<T>();
        } catch (const std::exception&) {
            fail("field '" + key + "' in " + where + " has the wrong type");
            return fallback;
        }
    }
};

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << text;
}

class CsvBuilder {
  public:
    explicit CsvBuilder(std::vector<std::string> header) {
        rows_ = join(header, ",") + "\n";
    }
    void row(const std::vector<std::string>& cells) { rows_ += join(cells, ",") + "\n"; }
    const std::string& text() const { return rows_; }

  private:
    std::string rows_;
};

std::string fmt_int(long long v) { return std::to_string(v); }

}  // namespace

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error("configuration invalid:\n  " + join(v, "\n  ")), violations(std::move(v)) {}

ThetaSpectrum ThetaSpecConfig::build(int member_n) const {
    const int nn = member_n > 0 ? member_n : n;
    if (family == "band") return make_theta_band(nn, a);
    if (family == "ball") return make_theta_ball(nn, a);
    if (family == "kraichnan") return make_theta_kraichnan(k0, zeta, k_max);
    if (family == "file") {
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot read theta file: " + file);
        std::stringstream ss;
        ss << in.rdbuf();
        return ThetaSpectrum::from_json(ss.str());
    }
    throw std::runtime_error("unknown theta family: " + family);
}

SpectralField InitialConfig::build(const FourierGrid& grid) const {
    if (type == "shear") return shear_layer(grid, amplitude);
    if (type == "gaussian-bump") return gaussian_bump(grid, mass, sigma);
    if (type == "two-mode") return two_mode_field(grid);
    if (type == "random-band") {
        SpectralField f = random_band_limited(grid, band, seed);
        f *= norm;
        return f;
    }
    throw std::runtime_error("unknown initial type: " + type);
}

SimConfig ExperimentConfig::sim() const {
    SimConfig s;
    s.t_final = t_final;
    s.dt = dt;
    s.grid = grid();
    s.record_every = record_every;
    s.seed = seed;
    s.diag_alpha = estimator.alpha;
    return s;
}

namespace {

const std::set<std::string> kExperiments = {"simulate",     "rate-sweep",        "blowup-sweep", "mixing",
                                            "dissipation",  "convolution-probe", "hs-mixing"};

ModelSpec parse_model(Validator& val, const json& j) {
    const std::string type = val.get<std::string>(j, "model", "type", "", true);
    if (type == "navier-stokes") {
        val.known_keys(j, "model", {"type", "nu"});
        return NavierStokesSpec{val.get<double>(j, "model", "nu", 0.0)};
    }
    if (type == "boussinesq") {
        val.known_keys(j, "model", {"type", "nu"});
        return BoussinesqSpec{val.get<double>(j, "model", "nu", 0.0)};
    }
    if (type == "msqg") {
        val.known_keys(j, "model", {"type", "beta"});
        return MsqgSpec{val.get<double>(j, "model", "beta", 0.5)};
    }
    if (type == "keller-segel") {
        val.known_keys(j, "model", {"type", "rho_bar", "cutoff_alpha", "cutoff_radius", "cutoff_enabled"});
        KellerSegelSpec ks;
        ks.rho_bar = val.get<double>(j, "model", "rho_bar", 1.0);
        ks.cutoff_alpha = val.get<double>(j, "model", "cutoff_alpha", 0.9);
        ks.cutoff_radius = val.get<double>(j, "model", "cutoff_radius", 1.0);
        ks.cutoff_enabled = val.get<bool>(j, "model", "cutoff_enabled", false);
        return ks;
    }
    if (type == "transport") {
        val.known_keys(j, "model", {"type"});
        return LinearTransportSpec{};
    }
    if (type == "transport-diffusion") {
        val.known_keys(j, "model", {"type", "nu"});
        return TransportDiffusionSpec{val.get<double>(j, "model", "nu", 0.01)};
    }
    if (!type.empty()) val.fail("model.type '" + type + "' is not recognized");
    return LinearTransportSpec{};
}

ExperimentConfig parse_validated(const json& j, const std::filesystem::path& base_dir) {
    Validator val;
    ExperimentConfig cfg;

    cfg.experiment = val.get<std::string>(j, "config", "experiment", "", true);
    if (!cfg.experiment.empty() && !kExperiments.count(cfg.experiment))
        val.fail("experiment '" + cfg.experiment + "' is not one of {" +
                 join(std::vector<std::string>(kExperiments.begin(), kExperiments.end()), ", ") + "}");

    std::set<std::string> allowed = {"experiment", "seed", "output", "threads", "grid_n",
                                     "dt",         "t_final", "record_every", "noise"};
    const bool uses_model = cfg.experiment == "simulate" || cfg.experiment == "rate-sweep" ||
                            cfg.experiment == "blowup-sweep";
    const bool uses_estimator = cfg.experiment != "simulate" && cfg.experiment != "blowup-sweep" &&
                                cfg.experiment != "dissipation" && cfg.experiment != "hs-mixing";
    if (uses_model) allowed.insert("model");
    if (cfg.experiment == "simulate") allowed.insert("deterministic");
    if (cfg.experiment == "simulate") allowed.insert("initial");
    allowed.insert("estimator");  // samples/threads ride here for every estimating experiment
    if (cfg.experiment == "rate-sweep" || cfg.experiment == "blowup-sweep" || cfg.experiment == "hs-mixing")
        allowed.insert("sweep");
    if (cfg.experiment == "rate-sweep" || cfg.experiment == "blowup-sweep" ||
        cfg.experiment == "convolution-probe")
        allowed.insert("initial");
    if (cfg.experiment == "mixing") {
        allowed.insert("mixing");
        allowed.insert("initial");
    }
    if (cfg.experiment == "dissipation") allowed.insert("dissipation");
    if (cfg.experiment == "convolution-probe") allowed.insert("convolution");
    if (cfg.experiment == "hs-mixing") allowed.insert("hs");
    val.known_keys(j, "config", allowed);

    cfg.seed = val.get<std::uint64_t>(j, "config", "seed", 0);
    cfg.output = val.get<std::string>(j, "config", "output", "out");
    cfg.threads = val.get<int>(j, "config", "threads", 0);
    val.check(cfg.threads >= 0, "threads must be >= 0");
    cfg.grid_n = val.get<int>(j, "config", "grid_n", 0, true);
    val.check(cfg.grid_n >= 16 && cfg.grid_n % 2 == 0,
              "grid_n must be even and >= 16 (the documented minimum)");
    cfg.dt = val.get<double>(j, "config", "dt", 0.0, true);
    val.check(cfg.dt > 0.0, "dt must be > 0");
    cfg.t_final = val.get<double>(j, "config", "t_final", 0.0, true);
    val.check(cfg.t_final >= 0.0, "t_final must be >= 0");
    cfg.record_every = val.get<int>(j, "config", "record_every", 1);
    val.check(cfg.record_every >= 1, "record_every must be >= 1");
    cfg.deterministic = val.get<bool>(j, "config", "deterministic", false);

    if (uses_model) {
        if (j.contains("model") && j.at("model").is_object()) {
            cfg.model = parse_model(val, j.at("model"));
            try {
                validate_model(cfg.model);
            } catch (const std::exception& e) {
                val.fail(e.what());
            }
        } else {
            val.fail("missing object 'model'");
        }
    }

    if (j.contains("noise") && j.at("noise").is_object()) {
        const json& jn = j.at("noise");
        val.known_keys(jn, "noise", {"kappa", "theta"});
        cfg.kappa = val.get<double>(jn, "noise", "kappa", 1.0, true);
        val.check(cfg.kappa >= 0.0, "noise.kappa must be >= 0");
        if (jn.contains("theta") && jn.at("theta").is_object()) {
            const json& jt = jn.at("theta");
            val.known_keys(jt, "noise.theta", {"family", "a", "n", "k0", "zeta", "k_max", "file"});
            cfg.theta.family = val.get<std::string>(jt, "noise.theta", "family", "band");
            cfg.theta.a = val.get<double>(jt, "noise.theta", "a", 0.0);
            cfg.theta.n = val.get<int>(jt, "noise.theta", "n", 1);
            cfg.theta.k0 = val.get<double>(jt, "noise.theta", "k0", 1.0);
            cfg.theta.zeta = val.get<double>(jt, "noise.theta", "zeta", 4.0 / 3.0);
            cfg.theta.k_max = val.get<double>(jt, "noise.theta", "k_max", 8.0);
            cfg.theta.file = val.get<std::string>(jt, "noise.theta", "file", "");
            if (cfg.theta.family == "file" && !cfg.theta.file.empty() &&
                std::filesystem::path(cfg.theta.file).is_relative())
                cfg.theta.file = (base_dir / cfg.theta.file).string();
            if (cfg.theta.family != "band" && cfg.theta.family != "ball" &&
                cfg.theta.family != "kraichnan" && cfg.theta.family != "file")
                val.fail("noise.theta.family must be one of band, ball, kraichnan, file");
        } else {
            val.fail("missing object 'noise.theta'");
        }
    } else {
        val.fail("missing object 'noise'");
    }

    if (j.contains("estimator")) {
        const json& je = j.at("estimator");
        val.known_keys(je, "estimator", {"samples", "p", "alpha", "epsilon", "confidence"});
        cfg.estimator.samples = val.get<int>(je, "estimator", "samples", 16);
        cfg.estimator.p = val.get<double>(je, "estimator", "p", 2.0);
        cfg.estimator.alpha = val.get<double>(je, "estimator", "alpha", 0.9);
        cfg.estimator.epsilon = val.get<double>(je, "estimator", "epsilon", 0.25);
        cfg.estimator.confidence_multiplier = val.get<double>(je, "estimator", "confidence", 3.0);
    }
    cfg.estimator.threads = cfg.threads;
    val.check(cfg.estimator.samples >= 1, "estimator.samples must be >= 1");
    val.check(cfg.estimator.p >= 1.0, "estimator.p must be >= 1");
    val.check(cfg.estimator.alpha > 0.0 && cfg.estimator.alpha < 1.0,
              "estimator.alpha = " + format_full(cfg.estimator.alpha) + " outside the legal interval (0,1)");
    val.check(cfg.estimator.epsilon > 0.0 && cfg.estimator.epsilon <= cfg.estimator.alpha,
              "estimator.epsilon must lie in (0, alpha]");

    if (j.contains("initial")) {
        const json& ji = j.at("initial");
        val.known_keys(ji, "initial", {"type", "amplitude", "mass", "sigma", "band", "seed", "norm"});
        cfg.initial.type = val.get<std::string>(ji, "initial", "type", "shear");
        cfg.initial.amplitude = val.get<double>(ji, "initial", "amplitude", 1.0);
        cfg.initial.mass = val.get<double>(ji, "initial", "mass", 1.0);
        cfg.initial.sigma = val.get<double>(ji, "initial", "sigma", 0.1);
        cfg.initial.band = val.get<int>(ji, "initial", "band", 8);
        cfg.initial.seed = val.get<std::uint64_t>(ji, "initial", "seed", 1);
        cfg.initial.norm = val.get<double>(ji, "initial", "norm", 1.0);
        if (cfg.initial.type != "shear" && cfg.initial.type != "gaussian-bump" &&
            cfg.initial.type != "random-band" && cfg.initial.type != "two-mode")
            val.fail("initial.type must be one of shear, gaussian-bump, random-band, two-mode");
    }

    if (j.contains("sweep")) {
        const json& js = j.at("sweep");
        val.known_keys(js, "sweep", {"members"});
        cfg.sweep_members = val.get<std::vector<int>>(js, "sweep", "members", {}, true);
    }
    if (j.contains("mixing")) {
        const json& jm = j.at("mixing");
        val.known_keys(jm, "mixing", {"times", "phi", "smear_sigma"});
        cfg.mixing_times = val.get<std::vector<double>>(jm, "mixing", "times", {}, true);
        auto phi = val.get<std::vector<int>>(jm, "mixing", "phi", {1, 0});
        if (phi.size() != 2)
            val.fail("mixing.phi must be a 2-vector of integers");
        else
            cfg.phi_mode = {phi[0], phi[1]};
        cfg.smear_sigma = val.get<double>(jm, "mixing", "smear_sigma", 0.0);
        for (double t : cfg.mixing_times) {
            const double raw = t / cfg.dt;
            if (std::abs(raw - std::llround(raw)) > 1e-6)
                val.fail("mixing time " + format_full(t) + " does not sit on the dt grid");
        }
    }
    if (j.contains("dissipation")) {
        const json& jd = j.at("dissipation");
        val.known_keys(jd, "dissipation", {"nu", "kappas"});
        cfg.diss_nu = val.get<double>(jd, "dissipation", "nu", 0.01);
        cfg.kappa_sweep = val.get<std::vector<double>>(jd, "dissipation", "kappas", {}, true);
        val.check(cfg.diss_nu > 0.0, "dissipation.nu must be > 0");
    }
    if (j.contains("convolution")) {
        const json& jc = j.at("convolution");
        val.known_keys(jc, "convolution", {"delta", "betas", "kappas"});
        cfg.conv_delta = val.get<double>(jc, "convolution", "delta", 1.0);
        cfg.conv_betas = val.get<std::vector<double>>(jc, "convolution", "betas", {}, true);
        cfg.kappa_sweep = val.get<std::vector<double>>(jc, "convolution", "kappas", {}, true);
        val.check(cfg.conv_delta > 0.0, "convolution.delta must be > 0");
    }
    if (j.contains("hs")) {
        const json& jh = j.at("hs");
        val.known_keys(jh, "hs", {"s", "alpha", "k_max", "heat_kappa"});
        cfg.hs_s = val.get<double>(jh, "hs", "s", 2.0);
        cfg.hs_alpha = val.get<double>(jh, "hs", "alpha", 0.5);
        cfg.hs_k_max = val.get<double>(jh, "hs", "k_max", 8.0);
        if (jh.contains("heat_kappa")) cfg.hs_heat_kappa = val.get<double>(jh, "hs", "heat_kappa", cfg.kappa);
        val.check(cfg.hs_s > 1.0, "hs.s must exceed d/2 = 1");
    }

    // required experiment-specific blocks
    if ((cfg.experiment == "rate-sweep" || cfg.experiment == "blowup-sweep" ||
         cfg.experiment == "hs-mixing") &&
        cfg.sweep_members.size() < (cfg.experiment == "rate-sweep" ? 3u : 1u))
        val.fail(cfg.experiment + " requires sweep.members (>= 3 for rate-sweep)");
    if (cfg.experiment == "mixing" && cfg.mixing_times.empty()) val.fail("mixing requires mixing.times");
    if (cfg.experiment == "dissipation" && cfg.kappa_sweep.empty())
        val.fail("dissipation requires dissipation.kappas");
    if (cfg.experiment == "convolution-probe" && (cfg.conv_betas.empty() || cfg.kappa_sweep.empty()))
        val.fail("convolution-probe requires convolution.betas and convolution.kappas");

    // theta support must be representable on the grid for every member used
    if (val.violations.empty()) {
        std::vector<int> members = cfg.sweep_members.empty() ? std::vector<int>{cfg.theta.n}
                                                             : cfg.sweep_members;
        for (int m : members) {
            try {
                ThetaSpectrum t = cfg.theta.build(m);
                if (t.max_component() > cfg.grid_n / 2)
                    val.fail("theta member n=" + std::to_string(m) + " reaches |k_i| = " +
                             std::to_string(t.max_component()) + " beyond the grid band N/2 = " +
                             std::to_string(cfg.grid_n / 2) + "; increase grid_n");
            } catch (const std::exception& e) {
                val.fail(std::string("theta: ") + e.what());
            }
        }
    }

    if (!val.violations.empty()) throw ConfigError(std::move(val.violations));
    return cfg;
}

json model_to_json(const ModelSpec& model) {
    json j;
    j["type"] = model_name(model);
    if (const auto* ns = std::get_if<NavierStokesSpec>(&model)) j["nu"] = ns->nu;
    if (const auto* bq = std::get_if<BoussinesqSpec>(&model)) j["nu"] = bq->nu;
    if (const auto* mq = std::get_if<MsqgSpec>(&model)) j["beta"] = mq->beta;
    if (const auto* td = std::get_if<TransportDiffusionSpec>(&model)) j["nu"] = td->nu;
    if (const auto* ks = std::get_if<KellerSegelSpec>(&model)) {
        j["rho_bar"] = ks->rho_bar;
        j["cutoff_alpha"] = ks->cutoff_alpha;
        j["cutoff_radius"] = ks->cutoff_radius;
        j["cutoff_enabled"] = ks->cutoff_enabled;
    }
    return j;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = experiment;
    j["seed"] = seed;
    j["output"] = output;
    j["threads"] = threads;
    j["grid_n"] = grid_n;
    j["dt"] = dt;
    j["t_final"] = t_final;
    j["record_every"] = record_every;
    const bool uses_model =
        experiment == "simulate" || experiment == "rate-sweep" || experiment == "blowup-sweep";
    if (uses_model) j["model"] = model_to_json(model);
    if (experiment == "simulate") j["deterministic"] = deterministic;
    json jt;
    jt["family"] = theta.family;
    jt["a"] = theta.a;
    jt["n"] = theta.n;
    if (theta.family == "kraichnan") {
        jt["k0"] = theta.k0;
        jt["zeta"] = theta.zeta;
        jt["k_max"] = theta.k_max;
    }
    if (theta.family == "file") jt["file"] = theta.file;
    j["noise"] = {{"kappa", kappa}, {"theta", jt}};
    j["estimator"] = {{"samples", estimator.samples},
                      {"p", estimator.p},
                      {"alpha", estimator.alpha},
                      {"epsilon", estimator.epsilon},
                      {"confidence", estimator.confidence_multiplier}};
    const bool uses_initial = experiment == "simulate" || experiment == "rate-sweep" ||
                              experiment == "blowup-sweep" || experiment == "mixing" ||
                              experiment == "convolution-probe";
    if (uses_initial) {
        json ji;
        ji["type"] = initial.type;
        if (initial.type == "shear") ji["amplitude"] = initial.amplitude;
        if (initial.type == "gaussian-bump") {
            ji["mass"] = initial.mass;
            ji["sigma"] = initial.sigma;
        }
        if (initial.type == "random-band") {
            ji["band"] = initial.band;
            ji["seed"] = initial.seed;
            ji["norm"] = initial.norm;
        }
        j["initial"] = ji;
    }
    if (!sweep_members.empty()) j["sweep"] = {{"members", sweep_members}};
    if (experiment == "mixing")
        j["mixing"] = {{"times", mixing_times},
                       {"phi", std::vector<int>{phi_mode[0], phi_mode[1]}},
                       {"smear_sigma", smear_sigma}};
    if (experiment == "dissipation") j["dissipation"] = {{"nu", diss_nu}, {"kappas", kappa_sweep}};
    if (experiment == "convolution-probe")
        j["convolution"] = {{"delta", conv_delta}, {"betas", conv_betas}, {"kappas", kappa_sweep}};
    if (experiment == "hs-mixing") {
        j["hs"] = {{"s", hs_s}, {"alpha", hs_alpha}, {"k_max", hs_k_max}};
        if (hs_heat_kappa) j["hs"]["heat_kappa"] = *hs_heat_kappa;
    }
    return j.dump(2) + "\n";
}

ExperimentConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!j.is_object()) throw ConfigError({"top-level JSON value must be an object"});
    return parse_validated(j, base_dir);
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read config file: " + path.string()});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

namespace {

// --- experiment runners ---

struct Prepared {
    ModelSpec model;
    State state;
};

Prepared initial_state(const ExperimentConfig& cfg) {
    const FourierGrid grid = cfg.grid();
    Prepared p{cfg.model, make_state(cfg.model, grid)};
    SpectralField f = cfg.initial.build(grid);
    if (auto* ks = std::get_if<KellerSegelSpec>(&p.model)) {
        // Keller-Segel evolves the mean-free part; the mean rides in rho_bar.
        const double mean = f.mean_mode().real();
        if (mean > 0.0) ks->rho_bar = mean;
        f.set_mode(0, {0, 0, 0}, Complex(0.0));
    }
    for (auto& field : p.state.fields) field = f;
    return p;
}

json summary_header(const ExperimentConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["experiment"] = cfg.experiment;
    j["params"] = json::parse(cfg.to_json());
    return j;
}

int run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    NoiseConfig noise(cfg.kappa, cfg.theta.build(0));
    Prepared prep = initial_state(cfg);
    Trajectory tr = cfg.deterministic
                        ? simulate_deterministic(prep.model, cfg.kappa, cfg.sim(), prep.state)
                        : simulate_stochastic(prep.model, noise, cfg.sim(), prep.state);

    std::vector<std::string> header = {"t"};
    const int nf = field_count(cfg.model);
    for (int f = 0; f < nf; ++f) {
        header.push_back("l2_" + std::to_string(f));
        header.push_back("h1_" + std::to_string(f));
        header.push_back("hneg_" + std::to_string(f));
    }
    CsvBuilder diag(header);
    for (const auto& row : tr.diagnostics) {
        std::vector<std::string> cells = {format_full(row.t)};
        for (int f = 0; f < nf; ++f) {
            cells.push_back(format_full(row.l2[f]));
            cells.push_back(format_full(row.h1[f]));
            cells.push_back(format_full(row.h_neg[f]));
        }
        diag.row(cells);
    }
    write_text(dir / "results.csv", diag.text());

    // physical-space snapshot of the final state plus a JSON sidecar
    const SpectralField& last = tr.snapshots.back().fields[0];
    auto phys = to_physical(last);
    const int n = cfg.grid_n;
    CsvBuilder snap({"i", "j", "x", "y", "value"});
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
            snap.row({fmt_int(i), fmt_int(jj), format_full(double(i) / n), format_full(double(jj) / n),
                      format_full(phys[std::size_t(i) * n + jj])});
    write_text(dir / "snapshot.csv", snap.text());
    json sidecar;
    sidecar["model"] = model_to_json(prep.model);
    sidecar["params"] = {{"kappa", cfg.kappa}, {"dt", cfg.dt}, {"deterministic", cfg.deterministic}};
    sidecar["grid"] = {{"dim", 2}, {"n", cfg.grid_n}};
    sidecar["time"] = tr.times.back();
    sidecar["seed"] = cfg.seed;
    write_text(dir / "snapshot.json", sidecar.dump(2) + "\n");

    json summary = summary_header(cfg);
    summary["blowup"] = tr.blowup;
    if (tr.blowup) summary["blowup_time"] = tr.blowup_time;
    if (tr.cutoff_exceeded_time) summary["cutoff_exceeded_time"] = *tr.cutoff_exceeded_time;
    summary["final_time"] = tr.times.back();
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return tr.blowup ? 2 : 0;
}

int run_rate_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::vector<NoiseConfig> family;
    for (int m : cfg.sweep_members) family.emplace_back(cfg.kappa, cfg.theta.build(m));
    Prepared prep = initial_state(cfg);
    RateSweepResult r = rate_sweep(prep.model, family, cfg.sim(), cfg.estimator, prep.state);

    CsvBuilder csv({"n", "theta_linf", "estimate", "stderr", "samples", "excluded"});
    int excluded = 0;
    bool monotone = true;
    for (std::size_t i = 0; i < family.size(); ++i) {
        const auto& m = r.members[i];
        csv.row({fmt_int(cfg.sweep_members[i]), format_full(r.theta_linf[i]), format_full(m.estimate),
                 format_full(m.std_error), fmt_int(m.samples), fmt_int(m.excluded)});
        excluded += m.excluded;
        if (i > 0 && m.estimate >= r.members[i - 1].estimate) monotone = false;
    }
    write_text(dir / "results.csv", csv.text());
    write_text(dir / "plot.py", emit_plot_script("results.csv", "rate"));

    json summary = summary_header(cfg);
    summary["slope"] = r.fit.slope;
    summary["intercept"] = r.fit.intercept;
    summary["r_squared"] = r.fit.r_squared;
    summary["monotone_decreasing"] = monotone;
    summary["excluded_samples"] = excluded;
    summary["pass"] = monotone && r.fit.slope > 0.0;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return excluded > 0 ? 2 : 0;
}

int run_blowup_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    Prepared prep = initial_state(cfg);
    // pre-step: verify the deterministic kappa = 0 baseline explodes
    Trajectory base = simulate_deterministic(prep.model, 0.0, cfg.sim(), prep.state);

    std::vector<NoiseConfig> family;
    for (int m : cfg.sweep_members) family.emplace_back(cfg.kappa, cfg.theta.build(m));
    auto freqs =
        blowup_probability(prep.model, family, cfg.sim(), cfg.estimator.samples, cfg.threads, prep.state);

    CsvBuilder csv({"n", "blowup_count", "M", "freq", "ci_low", "ci_high"});
    for (std::size_t i = 0; i < family.size(); ++i)
        csv.row({fmt_int(cfg.sweep_members[i]), fmt_int(freqs[i].count), fmt_int(freqs[i].samples),
                 format_full(freqs[i].frequency), format_full(freqs[i].wilson_low),
                 format_full(freqs[i].wilson_high)});
    write_text(dir / "results.csv", csv.text());
    write_text(dir / "plot.py", emit_plot_script("results.csv", "frequency"));

    json summary = summary_header(cfg);
    summary["baseline_blowup"] = base.blowup;
    if (base.blowup) summary["baseline_blowup_time"] = base.blowup_time;
    bool noninc = true;
    for (std::size_t i = 1; i < freqs.size(); ++i)
        if (freqs[i].frequency > freqs[i - 1].frequency) noninc = false;
    summary["frequency_nonincreasing"] = noninc;
    summary["pass"] = base.blowup && noninc;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_mixing(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const FourierGrid grid = cfg.grid();
    SpectralField f0 = cfg.initial.build(grid);
    SpectralField phi = SpectralField::scalar(grid);
    phi.set_mode(0, {cfg.phi_mode[0], cfg.phi_mode[1], 0}, Complex(0.5));
    phi.set_mode(0, {-cfg.phi_mode[0], -cfg.phi_mode[1], 0}, Complex(0.5));
    std::optional<SpectralField> chi;
    if (cfg.smear_sigma > 0.0) chi = gaussian_bump(grid, 1.0, cfg.smear_sigma);

    NoiseConfig noise(cfg.kappa, cfg.theta.build(0));
    auto pts = mixing_variance(f0, phi, cfg.mixing_times, noise, cfg.sim(), cfg.estimator.samples,
                               cfg.threads, chi);

    CsvBuilder csv({"time", "variance", "stderr", "upper95", "bound", "pass", "smeared_mean",
                    "smeared_stderr", "smeared_upper95", "smeared_bound", "smeared_pass"});
    bool all_pass = true;
    for (const auto& p : pts) {
        const double up = p.variance + 1.6448536269514722 * p.std_error;
        const bool pass = up <= p.bound;
        const double sup = p.smeared_mean + 1.6448536269514722 * p.smeared_std_error;
        const bool spass = chi ? sup <= p.smeared_bound : true;
        all_pass = all_pass && pass && spass;
        csv.row({format_full(p.time), format_full(p.variance), format_full(p.std_error), format_full(up),
                 format_full(p.bound), pass ? "1" : "0", format_full(p.smeared_mean),
                 format_full(p.smeared_std_error), format_full(sup), format_full(p.smeared_bound),
                 spass ? "1" : "0"});
    }
    write_text(dir / "results.csv", csv.text());

    json summary = summary_header(cfg);
    summary["pass"] = all_pass;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_dissipation(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const FourierGrid grid = cfg.grid();
    SpectralField f0 = cfg.initial.build(grid);
    f0.set_mode(0, {0, 0, 0}, Complex(0.0));

    CsvBuilder csv({"kappa", "median_rate", "contraction_min", "contraction_max", "samples"});
    CsvBuilder curves({"kappa", "t", "mean_log_l2"});
    std::vector<double> rates;
    bool contraction_ok = true;
    for (double kap : cfg.kappa_sweep) {
        NoiseConfig noise(kap, cfg.theta.build(0));
        DecayFit fit = dissipation_decay_fit(noise, cfg.diss_nu, f0, cfg.sim(), cfg.estimator.samples,
                                             cfg.threads);
        rates.push_back(fit.median_rate);
        double cmin = 2.0, cmax = 0.0;
        for (std::size_t n = 1; n < fit.contraction.size(); ++n) {  // n >= 1 skips the transient
            cmin = std::min(cmin, fit.contraction[n]);
            cmax = std::max(cmax, fit.contraction[n]);
        }
        if (cmax >= 1.0) contraction_ok = false;
        csv.row({format_full(kap), format_full(fit.median_rate), format_full(cmin), format_full(cmax),
                 fmt_int(cfg.estimator.samples)});
        for (std::size_t i = 0; i < fit.times.size(); ++i)
            curves.row({format_full(kap), format_full(fit.times[i]), format_full(fit.mean_log_l2[i])});
    }
    write_text(dir / "results.csv", csv.text());
    write_text(dir / "decay_curves.csv", curves.text());
    write_text(dir / "plot.py", emit_plot_script("decay_curves.csv", "decay"));

    json summary = summary_header(cfg);
    bool increasing = true;
    for (std::size_t i = 1; i < rates.size(); ++i)
        if (rates[i] <= rates[i - 1]) increasing = false;
    summary["median_rates"] = rates;
    summary["rates_increasing"] = increasing;
    summary["contraction_below_one"] = contraction_ok;
    summary["pass"] = increasing && contraction_ok;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_convolution(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const FourierGrid grid = cfg.grid();
    SpectralField w0 = cfg.initial.build(grid);
    CsvBuilder csv({"kappa", "beta", "estimate", "stderr"});
    for (double kap : cfg.kappa_sweep) {
        NoiseConfig noise(kap, cfg.theta.build(0));
        auto results = convolution_probe(noise, cfg.conv_delta, w0, cfg.conv_betas, cfg.sim(),
                                         cfg.estimator);
        for (std::size_t b = 0; b < cfg.conv_betas.size(); ++b)
            csv.row({format_full(kap), format_full(cfg.conv_betas[b]), format_full(results[b].estimate),
                     format_full(results[b].std_error)});
    }
    write_text(dir / "results.csv", csv.text());
    json summary = summary_header(cfg);
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_hs_mixing(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    std::vector<int> members = cfg.sweep_members.empty() ? std::vector<int>{cfg.theta.n}
                                                         : cfg.sweep_members;
    CsvBuilder csv({"n", "theta_linf", "estimate", "stderr", "tail_bound", "modes"});
    std::vector<double> estimates;
    for (int m : members) {
        NoiseConfig noise(cfg.kappa, cfg.theta.build(m));
        const double heat_kappa = cfg.hs_heat_kappa ? *cfg.hs_heat_kappa : cfg.kappa;
        HsMixingResult r = hilbert_schmidt_mixing(noise, heat_kappa, cfg.hs_s, cfg.hs_alpha, cfg.hs_k_max,
                                                  cfg.sim(), cfg.estimator.samples, cfg.threads);
        estimates.push_back(r.estimate.estimate);
        csv.row({fmt_int(m), format_full(noise.theta.linf_norm()), format_full(r.estimate.estimate),
                 format_full(r.estimate.std_error), format_full(r.tail_bound), fmt_int(r.modes)});
    }
    write_text(dir / "results.csv", csv.text());
    json summary = summary_header(cfg);
    bool decreasing = true;
    for (std::size_t i = 1; i < estimates.size(); ++i)
        if (estimates[i] >= estimates[i - 1]) decreasing = false;
    summary["estimates"] = estimates;
    summary["decreasing"] = decreasing;
    summary["pass"] = decreasing;
    write_text(dir / "summary.json", summary.dump(2) + "\n");
    return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
    const std::filesystem::path dir(cfg.output);
    std::filesystem::create_directories(dir);
    if (cfg.experiment == "simulate") return run_simulate(cfg, dir);
    if (cfg.experiment == "rate-sweep") return run_rate_sweep(cfg, dir);
    if (cfg.experiment == "blowup-sweep") return run_blowup_sweep(cfg, dir);
    if (cfg.experiment == "mixing") return run_mixing(cfg, dir);
    if (cfg.experiment == "dissipation") return run_dissipation(cfg, dir);
    if (cfg.experiment == "convolution-probe") return run_convolution(cfg, dir);
    if (cfg.experiment == "hs-mixing") return run_hs_mixing(cfg, dir);
    throw std::runtime_error("unknown experiment: " + cfg.experiment);
}

std::string emit_plot_script(const std::string& csv_filename, const std::string& kind) {
    std::string s;
    s += "#!/usr/bin/env python3\n";
    s += "# Generated by torus-spde; renders " + csv_filename + " (" + kind + ").\n";
    s += "import csv\n";
    s += "import math\n";
    s += "import matplotlib.pyplot as plt\n\n";
    s += "rows = list(csv.DictReader(open(\"" + csv_filename + "\")))\n";
    if (kind == "rate") {
        s += "x = [float(r[\"theta_linf\"]) for r in rows]\n";
        s += "y = [float(r[\"estimate\"]) for r in rows]\n";
        s += "e = [float(r[\"stderr\"]) for r in rows]\n";
        s += "lx = [math.log(v) for v in x]\n";
        s += "ly = [math.log(v) for v in y]\n";
        s += "n = len(lx)\n";
        s += "mx = sum(lx) / n\n";
        s += "my = sum(ly) / n\n";
        s += "slope = sum((a - mx) * (b - my) for a, b in zip(lx, ly)) / sum((a - mx) ** 2 for a in lx)\n";
        s += "fit = [math.exp(my + slope * (a - mx)) for a in lx]\n";
        s += "plt.errorbar(x, y, yerr=e, fmt=\"o\", capsize=3, label=\"estimate\")\n";
        s += "plt.plot(x, fit, \"--\", label=f\"slope {slope:.3f}\")\n";
        s += "plt.xscale(\"log\")\n";
        s += "plt.yscale(\"log\")\n";
        s += "plt.xlabel(\"theta sup norm\")\n";
        s += "plt.ylabel(\"error moment\")\n";
        s += "plt.legend()\n";
    } else if (kind == "decay") {
        s += "series = {}\n";
        s += "for r in rows:\n";
        s += "    series.setdefault(r[\"kappa\"], []).append((float(r[\"t\"]), float(r[\"mean_log_l2\"])))\n";
        s += "for kappa, pts in series.items():\n";
        s += "    pts.sort()\n";
        s += "    plt.plot([p[0] for p in pts], [p[1] for p in pts], marker=\"o\", label=f\"kappa={kappa}\")\n";
        s += "plt.xlabel(\"t\")\n";
        s += "plt.ylabel(\"mean log L2 norm\")\n";
        s += "plt.legend()\n";
    } else if (kind == "frequency") {
        s += "x = [r[\"n\"] for r in rows]\n";
        s += "f = [float(r[\"freq\"]) for r in rows]\n";
        s += "lo = [float(r[\"freq\"]) - float(r[\"ci_low\"]) for r in rows]\n";
        s += "hi = [float(r[\"ci_high\"]) - float(r[\"freq\"]) for r in rows]\n";
        s += "plt.bar(x, f, yerr=[lo, hi], capsize=4)\n";
        s += "plt.xlabel(\"band index n\")\n";
        s += "plt.ylabel(\"blow-up frequency\")\n";
        s += "plt.ylim(0, 1.05)\n";
    } else {
        throw std::invalid_argument("emit_plot_script: unrecognized kind '" + kind + "'");
    }
    s += "plt.tight_layout()\n";
    s += "plt.savefig(\"" + csv_filename + "." + kind + ".png\", dpi=150)\n";
    return s;
}

}  // namespace tspde

#include "tspde/theta_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "json.hpp"

namespace tspde {

namespace {

void sort_entries(std::vector<ThetaEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const ThetaEntry& a, const ThetaEntry& b) {
        return a.k < b.k;
    });
}

long long norm_sq(const Wavevector& k) {
    return (long long)k[0] * k[0] + (long long)k[1] * k[1] + (long long)k[2] * k[2];
}

void normalize(std::vector<ThetaEntry>& entries) {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * e.weight;
    if (s <= 0.0) throw std::invalid_argument("ThetaSpectrum: empty or zero support");
    const double inv = 1.0 / std::sqrt(s);
    for (auto& e : entries) e.weight *= inv;
}

// Enumerate k in Z^d \ {0} with lo2 <= |k|^2 <= hi2 and attach weight(|k|).
template <typename WeightFn>
std::vector<ThetaEntry> enumerate_shells(int dim, long long lo2, long long hi2, WeightFn weight) {
    std::vector<ThetaEntry> out;
    const int r = static_cast<int>(std::floor(std::sqrt(double(hi2)))) + 1;
    const int zlo = dim == 3 ? -r : 0, zhi = dim == 3 ? r : 0;
    for (int kx = -r; kx <= r; ++kx)
        for (int ky = -r; ky <= r; ++ky)
            for (int kz = zlo; kz <= zhi; ++kz) {
                Wavevector k{kx, ky, kz};
                const long long n2 = norm_sq(k);
                if (n2 == 0 || n2 < lo2 || n2 > hi2) continue;
                out.push_back({k, weight(std::sqrt(double(n2)))});
            }
    sort_entries(out);
    return out;
}

}  // namespace

ThetaSpectrum ThetaSpectrum::from_weights(int dim, std::vector<ThetaEntry> entries) {
    ThetaSpectrum t = from_weights_unchecked(dim, std::move(entries));
    if (!t.is_symmetric())
        throw std::invalid_argument("ThetaSpectrum: weights are not symmetric across |k| shells");
    return t;
}

ThetaSpectrum ThetaSpectrum::from_weights_unchecked(int dim, std::vector<ThetaEntry> entries) {
    if (dim < 2 || dim > 3) throw std::invalid_argument("ThetaSpectrum: dim must be 2 or 3");
    for (const auto& e : entries) {
        if (e.weight < 0.0) throw std::invalid_argument("ThetaSpectrum: negative weight");
        if (norm_sq(e.k) == 0) throw std::invalid_argument("ThetaSpectrum: zero mode not allowed");
        if (dim == 2 && e.k[2] != 0) throw std::invalid_argument("ThetaSpectrum: 2D entry with k3 != 0");
    }
    std::erase_if(entries, [](const ThetaEntry& e) { return e.weight == 0.0; });
    sort_entries(entries);
    for (std::size_t i = 1; i < entries.size(); ++i)
        if (entries[i].k == entries[i - 1].k) throw std::invalid_argument("ThetaSpectrum: duplicate mode");
    normalize(entries);
    ThetaSpectrum t;
    t.dim_ = dim;
    t.entries_ = std::move(entries);
    return t;
}

double ThetaSpectrum::l2_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.weight * e.weight;
    return std::sqrt(s);
}

double ThetaSpectrum::linf_norm() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, e.weight);
    return m;
}

int ThetaSpectrum::max_component() const {
    int m = 0;
    for (const auto& e : entries_)
        for (int a = 0; a < dim_; ++a) m = std::max(m, std::abs(e.k[a]));
    return m;
}

double ThetaSpectrum::symmetry_defect() const {
    std::map<long long, std::pair<double, double>> shell_range;  // |k|^2 -> (min, max)
    for (const auto& e : entries_) {
        auto [it, fresh] = shell_range.try_emplace(norm_sq(e.k), std::make_pair(e.weight, e.weight));
        if (!fresh) {
            it->second.first = std::min(it->second.first, e.weight);
            it->second.second = std::max(it->second.second, e.weight);
        }
    }
    double worst = 0.0;
    for (const auto& [n2, mm] : shell_range) worst = std::max(worst, mm.second - mm.first);
    return worst;
}

std::string ThetaSpectrum::to_json() const {
    nlohmann::json j;
    j["d"] = dim_;
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries_) {
        nlohmann::json je;
        je["k"] = dim_ == 2 ? std::vector<int>{e.k[0], e.k[1]} : std::vector<int>{e.k[0], e.k[1], e.k[2]};
        je["theta"] = e.weight;
        arr.push_back(je);
    }
    return j.dump(2);
}

ThetaSpectrum ThetaSpectrum::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    const int dim = j.at("d").get<int>();
    std::vector<ThetaEntry> entries;
    for (const auto& je : j.at("entries")) {
        auto kv = je.at("k").get<std::vector<int>>();
        if ((int)kv.size() != dim) throw std::invalid_argument("theta JSON: k length != d");
        Wavevector k{kv[0], kv[1], dim == 3 ? kv[2] : 0};
        entries.push_back({k, je.at("theta").get<double>()});
    }
    // import re-validates symmetry (and re-normalizes)
    return ThetaSpectrum::from_weights(dim, std::move(entries));
}

ThetaSpectrum make_theta_band(int n, double a, int dim) {
    if (n < 1) throw std::invalid_argument("make_theta_band: n must be >= 1");
    auto entries = enumerate_shells(dim, (long long)n * n, 4LL * n * n,
                                    [a](double r) { return std::pow(r, -a); });
    return ThetaSpectrum::from_weights(dim, std::move(entries));
}

ThetaSpectrum make_theta_ball(int n, double a, int dim) {
    if (n < 1) throw std::invalid_argument("make_theta_ball: n must be >= 1");
    auto entries = enumerate_shells(dim, 1, (long long)n * n,
                                    [a](double r) { return std::pow(r, -a); });
    return ThetaSpectrum::from_weights(dim, std::move(entries));
}

namespace {
std::vector<ThetaEntry> kraichnan_raw(double k0, double zeta, double k_max, int dim) {
    if (k0 < 1.0) throw std::invalid_argument("make_theta_kraichnan: k0 must be >= 1");
    if (!(zeta > 0.0 && zeta < 2.0)) throw std::invalid_argument("make_theta_kraichnan: zeta must be in (0,2)");
    if (!(k_max > k0)) throw std::invalid_argument("make_theta_kraichnan: k_max must exceed k0");
    const double amp = std::pow(k0, 0.5 * zeta);
    const double expo = -0.5 * (dim + zeta);
    auto entries = enumerate_shells(dim, (long long)std::ceil(k0 * k0 - 1e-9),
                                    (long long)std::floor(k_max * k_max + 1e-9),
                                    [amp, expo](double r) { return amp * std::pow(r, expo); });
    return entries;
}
}  // namespace

ThetaSpectrum make_theta_kraichnan(double k0, double zeta, double k_max, int dim) {
    return ThetaSpectrum::from_weights(dim, kraichnan_raw(k0, zeta, k_max, dim));
}

double kraichnan_raw_linf(double k0, double zeta, double k_max, int dim) {
    double m = 0.0;
    for (const auto& e : kraichnan_raw(k0, zeta, k_max, dim)) m = std::max(m, e.weight);
    return m;
}

}  // namespace tspde

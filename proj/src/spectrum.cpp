#include "hbt/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hbt/errors.hpp"

namespace hbt {

const char* to_string(SpectrumKind kind) {
    switch (kind) {
        case SpectrumKind::exponential: return "exponential";
        case SpectrumKind::power_law: return "power_law";
        case SpectrumKind::blackbody: return "blackbody";
        case SpectrumKind::tabulated: return "tabulated";
    }
    return "unknown";
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
    if (name == "exponential") return SpectrumKind::exponential;
    if (name == "power_law") return SpectrumKind::power_law;
    if (name == "blackbody") return SpectrumKind::blackbody;
    if (name == "tabulated") return SpectrumKind::tabulated;
    throw DomainError("unknown spectrum kind '" + name + "'");
}

namespace {

void require_domain(const EnergyInterval& d) {
    if (!(d.min > 0.0) || !(d.max > d.min) || !std::isfinite(d.max))
        throw DomainError("spectrum domain must be a finite interval with 0 < min < max");
}

void require_temperature(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("spectral temperature must be positive");
}

// Second derivatives of the natural cubic spline through (x, y).
std::vector<double> natural_spline_curvature(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    std::vector<double> c_prime(n, 0.0);
    std::vector<double> d_prime(n, 0.0);
    // Thomas algorithm on the interior equations.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = x[i] - x[i - 1];
        const double h1 = x[i + 1] - x[i];
        const double a = h0 / 6.0;
        const double b = (h0 + h1) / 3.0;
        const double c = h1 / 6.0;
        const double d = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        const double denom = b - a * c_prime[i - 1];
        c_prime[i] = c / denom;
        d_prime[i] = (d - a * d_prime[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
        m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        if (i == 1) break;
    }
    return m;
}

}  // namespace

Spectrum Spectrum::exponential(double T_eV, EnergyInterval domain) {
    require_temperature(T_eV);
    require_domain(domain);
    Spectrum s;
    s.kind_ = SpectrumKind::exponential;
    s.param_ = T_eV;
    s.domain_ = domain;
    return s;
}

Spectrum Spectrum::power_law(double alpha, EnergyInterval domain) {
    if (!std::isfinite(alpha)) throw DomainError("power-law exponent must be finite");
    require_domain(domain);
    Spectrum s;
    s.kind_ = SpectrumKind::power_law;
    s.param_ = alpha;
    s.domain_ = domain;
    return s;
}

Spectrum Spectrum::blackbody(double T_eV, EnergyInterval domain) {
    require_temperature(T_eV);
    require_domain(domain);
    Spectrum s;
    s.kind_ = SpectrumKind::blackbody;
    s.param_ = T_eV;
    s.domain_ = domain;
    return s;
}

Spectrum Spectrum::tabulated(std::vector<double> energies_eV, std::vector<double> intensities) {
    if (energies_eV.size() != intensities.size())
        throw DomainError("tabulated spectrum: energy and intensity columns differ in length");
    if (energies_eV.size() < 4) throw DomainError("tabulated spectrum needs at least 4 points");
    for (std::size_t i = 0; i < energies_eV.size(); ++i) {
        if (!std::isfinite(energies_eV[i]) || !(energies_eV[i] > 0.0))
            throw DomainError("tabulated spectrum: energies must be positive");
        if (i > 0 && !(energies_eV[i] > energies_eV[i - 1]))
            throw DomainError("tabulated spectrum: energies must be strictly increasing");
        if (!(intensities[i] > 0.0) || !std::isfinite(intensities[i]))
            throw DomainError("tabulated spectrum: intensities must be positive");
    }

    Spectrum s;
    s.kind_ = SpectrumKind::tabulated;
    s.domain_ = {energies_eV.front(), energies_eV.back()};
    s.log_values_.resize(intensities.size());
    std::transform(intensities.begin(), intensities.end(), s.log_values_.begin(),
                   [](double v) { return std::log(v); });
    s.energies_ = std::move(energies_eV);
    s.log_curvature_ = natural_spline_curvature(s.energies_, s.log_values_);
    return s;
}

Spectrum Spectrum::read_table(std::istream& in) {
    std::vector<double> energies;
    std::vector<double> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        double e = 0.0;
        double v = 0.0;
        if (!(row >> e)) continue;
        if (!(row >> v))
            throw ConfigError("spectrum table row needs two columns", {}, line_no);
        energies.push_back(e);
        values.push_back(v);
    }
    return tabulated(std::move(energies), std::move(values));
}

Spectrum Spectrum::read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open spectrum table '" + path.string() + "'");
    return read_table(in);
}

double Spectrum::spline_log(double E) const {
    auto it = std::upper_bound(energies_.begin(), energies_.end(), E);
    std::size_t hi = static_cast<std::size_t>(std::distance(energies_.begin(), it));
    hi = std::clamp<std::size_t>(hi, 1, energies_.size() - 1);
    const std::size_t lo = hi - 1;
    const double h = energies_[hi] - energies_[lo];
    const double a = (energies_[hi] - E) / h;
    const double b = (E - energies_[lo]) / h;
    return a * log_values_[lo] + b * log_values_[hi] +
           ((a * a * a - a) * log_curvature_[lo] + (b * b * b - b) * log_curvature_[hi]) * h * h / 6.0;
}

double Spectrum::log_value(double E) const {
    if (!domain_.contains(E)) {
        std::ostringstream msg;
        msg << "energy " << E << " eV outside spectrum domain [" << domain_.min << ", " << domain_.max << "]";
        throw DomainError(msg.str());
    }
    switch (kind_) {
        case SpectrumKind::exponential: return -E / param_;
        case SpectrumKind::power_law: return param_ * std::log(E);
        case SpectrumKind::blackbody: return 2.0 * std::log(E) - std::log(std::expm1(E / param_));
        case SpectrumKind::tabulated: return spline_log(E);
    }
    return 0.0;
}

double Spectrum::operator()(double E) const { return std::exp(log_value(E)); }

std::string Spectrum::label() const {
    std::ostringstream out;
    out << to_string(kind_);
    switch (kind_) {
        case SpectrumKind::exponential:
        case SpectrumKind::blackbody: out << "(T=" << param_ << " eV)"; break;
        case SpectrumKind::power_law: out << "(alpha=" << param_ << ")"; break;
        case SpectrumKind::tabulated: out << "(" << energies_.size() << " points)"; break;
    }
    return out.str();
}

LogDerivatives finite_difference_log_derivs(const Spectrum& spectrum, double E, double h) {
    const double lp = spectrum.log_value(E + h);
    const double l0 = spectrum.log_value(E);
    const double lm = spectrum.log_value(E - h);
    return {(lp - lm) / (2.0 * h), (lp - 2.0 * l0 + lm) / (h * h)};
}

LogDerivatives spectrum_log_derivs(const Spectrum& spectrum, double E) {
    const double h = kLogDerivativeRelativeStep * E;
    const auto& d = spectrum.domain();
    if (!(E - 2.0 * h >= d.min) || !(E + 2.0 * h <= d.max))
        throw DomainError("insufficient margin: E must sit at least two finite-difference steps inside the "
                          "spectrum domain");

    const double T = spectrum.temperature();
    switch (spectrum.kind()) {
        case SpectrumKind::exponential: return {-1.0 / T, 0.0};
        case SpectrumKind::power_law: {
            const double a = spectrum.alpha();
            return {a / E, -a / (E * E)};
        }
        case SpectrumKind::blackbody: {
            // ln s = 2 ln E - ln(e^x - 1), x = E/T
            const double x = E / T;
            const double em = std::expm1(-x);  // e^-x - 1
            const double occupation = -1.0 / em;  // 1 / (1 - e^-x)
            return {2.0 / E - occupation / T, -2.0 / (E * E) + (occupation * occupation) * std::exp(-x) / (T * T)};
        }
        case SpectrumKind::tabulated: return finite_difference_log_derivs(spectrum, E, h);
    }
    return {0.0, 0.0};
}

}  // namespace hbt

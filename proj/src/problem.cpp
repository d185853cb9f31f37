#include "fbnet/problem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace fbnet {

ProblemSpec preset_stm() { return ProblemSpec{100.0, 0.5, 0.05, 0.20, 6.0, 1e-8}; }
ProblemSpec preset_mtm() { return ProblemSpec{100.0, 1.0, 0.10, 0.30, 6.0, 1e-8}; }
ProblemSpec preset_ltm() { return ProblemSpec{100.0, 3.0, 0.08, 0.20, 6.0, 1e-8}; }

ProblemSpec preset_by_name(const std::string& name) {
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (up == "STM") return preset_stm();
    if (up == "MTM") return preset_mtm();
    if (up == "LTM") return preset_ltm();
    throw std::invalid_argument("problem.preset: unknown preset '" + name +
                                "' (expected STM, MTM or LTM)");
}

double landau_forward(const ProblemSpec&, double S, double s_f) {
    if (!(S > 0.0)) throw std::domain_error("landau_forward: S must be > 0");
    if (!(s_f > 0.0)) throw std::domain_error("landau_forward: s_f must be > 0");
    return std::log(S) - std::log(s_f);
}

std::pair<double, double> to_normalized(const ProblemSpec& spec, double t, double x) {
    if (!(t >= 0.0 && t <= spec.T))
        throw std::domain_error("to_normalized: t must lie in [0,T]");
    if (!(x >= 0.0 && x <= spec.x_max))
        throw std::domain_error("to_normalized: x must lie in [0,x_max]");
    return {t / spec.T, x / spec.x_max};
}

double asset_price_of(const ProblemSpec& spec, double y, double s_f) {
    if (!(s_f > 0.0)) throw std::domain_error("asset_price_of: s_f must be > 0");
    if (!(y >= 0.0 && y <= 1.0))
        throw std::domain_error("asset_price_of: y must lie in [0,1]");
    return s_f * std::exp(y * spec.x_max);
}

}  // namespace fbnet

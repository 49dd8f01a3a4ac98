#pragma once

#include <functional>
#include <string>

#include "errors.hpp"
#include "smoothstep.hpp"

namespace rdalab {

// Scalar map with its derivative.
struct ScalarMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::string name = "custom";

    double operator()(double u) const { return value(u); }
    bool is_zero() const { return name == "zero"; }
};

inline ScalarMap zero_map() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }, "zero"};
}

// Catalog: zero, const, identity, linear, sin, tanh, cubic, each scaled as
// amp * h(scale * u).
inline ScalarMap catalog_map(const std::string& kind, double amp = 1.0, double scale = 1.0) {
    if (kind == "zero") return zero_map();
    if (kind == "const")
        return {[amp](double) { return amp; }, [](double) { return 0.0; }, "const"};
    if (kind == "identity" || kind == "linear")
        return {[amp, scale](double u) { return amp * scale * u; }, [amp, scale](double) { return amp * scale; }, kind};
    if (kind == "sin")
        return {[amp, scale](double u) { return amp * std::sin(scale * u); },
                [amp, scale](double u) { return amp * scale * std::cos(scale * u); }, kind};
    if (kind == "tanh")
        return {[amp, scale](double u) { return amp * std::tanh(scale * u); },
                [amp, scale](double u) {
                    double c = std::cosh(scale * u);
                    return amp * scale / (c * c);
                },
                kind};
    if (kind == "cubic")
        return {[amp, scale](double u) { return amp * std::pow(scale * u, 3); },
                [amp, scale](double u) { return 3.0 * amp * scale * std::pow(scale * u, 2); }, kind};
    throw ConfigError("unknown nonlinearity '" + kind + "'");
}

// h(u) * chi(u^2 / R^2): identical to h for |u| <= R, zero for |u| >= 2R.
inline ScalarMap with_cutoff(const ScalarMap& h, double radius) {
    if (radius <= 0.0 || h.is_zero()) return h;
    Plateau chi{1.0, 4.0};
    double r2 = radius * radius;
    return {[h, chi, r2](double u) { return h.value(u) * chi(u * u / r2); },
            [h, chi, r2](double u) {
                double z = u * u / r2;
                return h.derivative(u) * chi(z) + h.value(u) * chi.derivative(z) * 2.0 * u / r2;
            },
            h.name + "_cut"};
}

}  // namespace rdalab

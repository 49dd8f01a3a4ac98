#pragma once

#include <concepts>

#include "field.hpp"

namespace rdalab {

// u_t = L u + N(t, u) with L diagonal in (component, wavenumber).
template <class S>
concept SemilinearSystem = requires(const S& s, double t, const FourierField& u, int n, int c) {
    { s.n_components() } -> std::convertible_to<int>;
    { s.linear_symbol(n, c) } -> std::convertible_to<cplx>;
    { s.nonlinear(t, u) } -> std::convertible_to<FourierField>;
};

// Cox-Matthews ETDRK4, phi-functions by contour averaging (Kassam-Trefethen).
template <SemilinearSystem System>
class Etdrk4 {
public:
    Etdrk4(const System& sys, int n_max, double dt) : sys_(&sys), n_max_(n_max), dt_(dt) {
        if (!(dt > 0.0)) throw ConfigError("Etdrk4: dt must be positive");
        int nc = sys.n_components();
        std::size_t total = static_cast<std::size_t>(nc) * (2 * n_max + 1);
        E_.resize(total);
        E2_.resize(total);
        Q_.resize(total);
        f1_.resize(total);
        f2_.resize(total);
        f3_.resize(total);
        constexpr int points = 64;
        std::size_t idx = 0;
        for (int c = 0; c < nc; ++c) {
            for (int n = -n_max; n <= n_max; ++n, ++idx) {
                cplx hL = dt * cplx(sys.linear_symbol(n, c));
                E_[idx] = std::exp(hL);
                E2_[idx] = std::exp(0.5 * hL);
                cplx q{}, a{}, b{}, g{};
                for (int k = 0; k < points; ++k) {
                    cplx z = hL + std::exp(cplx(0.0, pi * (k + 0.5) / points * 2.0));
                    cplx ez = std::exp(z);
                    cplx z3 = z * z * z;
                    q += (std::exp(0.5 * z) - 1.0) / z;
                    a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                    b += (2.0 + z + ez * (z - 2.0)) / z3;
                    g += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
                }
                Q_[idx] = dt * q / double(points);
                f1_[idx] = dt * a / double(points);
                f2_[idx] = dt * b / double(points);
                f3_[idx] = dt * g / double(points);
                // Real symbols give real phi-values; drop contour round-off.
                if (hL.imag() == 0.0) {
                    Q_[idx] = Q_[idx].real();
                    f1_[idx] = f1_[idx].real();
                    f2_[idx] = f2_[idx].real();
                    f3_[idx] = f3_[idx].real();
                }
            }
        }
    }

    double dt() const { return dt_; }

    FourierField step(const FourierField& u, double t) const {
        const System& s = *sys_;
        FourierField Nu = s.nonlinear(t, u);
        FourierField a = combine(E2_, u, Q_, Nu);
        FourierField Na = s.nonlinear(t + 0.5 * dt_, a);
        FourierField b = combine(E2_, u, Q_, Na);
        FourierField Nb = s.nonlinear(t + 0.5 * dt_, b);
        FourierField twoNbNu = Nb * 2.0 - Nu;
        FourierField c = combine(E2_, a, Q_, twoNbNu);
        FourierField Nc = s.nonlinear(t + dt_, c);
        FourierField out = u;
        auto& o = out.data();
        const auto& uu = u.data();
        for (std::size_t i = 0; i < o.size(); ++i)
            o[i] = E_[i] * uu[i] + f1_[i] * Nu.data()[i] + 2.0 * f2_[i] * (Na.data()[i] + Nb.data()[i]) +
                   f3_[i] * Nc.data()[i];
        return out;
    }

private:
    FourierField combine(const std::vector<cplx>& e, const FourierField& u, const std::vector<cplx>& q,
                         const FourierField& nl) const {
        FourierField out = u;
        auto& o = out.data();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = e[i] * u.data()[i] + q[i] * nl.data()[i];
        return out;
    }

    const System* sys_;
    int n_max_;
    double dt_;
    std::vector<cplx> E_, E2_, Q_, f1_, f2_, f3_;
};

}  // namespace rdalab

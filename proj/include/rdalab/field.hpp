#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace rdalab {

using cplx = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Truncated Fourier coefficients c_n, |n| <= n_max, for each component.
// u(x) = sum_n c_n e^{inx} on (-pi, pi).
class FourierField {
public:
    FourierField() = default;
    explicit FourierField(int n_max, int n_components = 1)
        : n_max_(n_max), n_components_(n_components),
          coeffs_(static_cast<std::size_t>(n_components) * (2 * n_max + 1)) {
        if (n_max < 0 || n_components < 1)
            throw ConfigError("FourierField: invalid shape");
    }

    static FourierField mode(int n_max, int n, cplx value = 1.0, int comp = 0, int n_components = 1) {
        FourierField f(n_max, n_components);
        f(n, comp) = value;
        return f;
    }

    int n_max() const { return n_max_; }
    int n_components() const { return n_components_; }
    int modes() const { return 2 * n_max_ + 1; }
    std::size_t size() const { return coeffs_.size(); }
    bool empty() const { return coeffs_.empty(); }

    cplx& operator()(int n, int comp = 0) { return coeffs_[index(n, comp)]; }
    const cplx& operator()(int n, int comp = 0) const { return coeffs_[index(n, comp)]; }

    // Zero outside the stored band.
    cplx get(int n, int comp = 0) const {
        return std::abs(n) > n_max_ ? cplx{} : coeffs_[index(n, comp)];
    }

    std::span<cplx> component(int comp) {
        return {coeffs_.data() + static_cast<std::size_t>(comp) * modes(), static_cast<std::size_t>(modes())};
    }
    std::span<const cplx> component(int comp) const {
        return {coeffs_.data() + static_cast<std::size_t>(comp) * modes(), static_cast<std::size_t>(modes())};
    }

    std::vector<cplx>& data() { return coeffs_; }
    const std::vector<cplx>& data() const { return coeffs_; }

    bool same_shape(const FourierField& o) const {
        return n_max_ == o.n_max_ && n_components_ == o.n_components_;
    }

    FourierField extract(int comp) const {
        FourierField out(n_max_, 1);
        std::copy_n(component(comp).begin(), modes(), out.coeffs_.begin());
        return out;
    }

    void assign(int comp, const FourierField& scalar, int src_comp = 0) {
        for (int n = -n_max_; n <= n_max_; ++n) (*this)(n, comp) = scalar.get(n, src_comp);
    }

    // Zero-pad or truncate to a new band limit.
    FourierField resized(int n_max) const {
        FourierField out(n_max, n_components_);
        int m = std::min(n_max, n_max_);
        for (int c = 0; c < n_components_; ++c)
            for (int n = -m; n <= m; ++n) out(n, c) = (*this)(n, c);
        return out;
    }

    bool is_real(double tol = 1e-12) const {
        double scale = 0.0;
        for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
        for (int c = 0; c < n_components_; ++c)
            for (int n = 0; n <= n_max_; ++n)
                if (std::abs((*this)(n, c) - std::conj((*this)(-n, c))) > tol * std::max(scale, 1e-300))
                    return false;
        return true;
    }

    // Enforce conjugate symmetry by averaging.
    void make_real() {
        for (int c = 0; c < n_components_; ++c) {
            (*this)(0, c) = (*this)(0, c).real();
            for (int n = 1; n <= n_max_; ++n) {
                cplx avg = 0.5 * ((*this)(n, c) + std::conj((*this)(-n, c)));
                (*this)(n, c) = avg;
                (*this)(-n, c) = std::conj(avg);
            }
        }
    }

    FourierField& operator+=(const FourierField& o) {
        check(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    FourierField& operator-=(const FourierField& o) {
        check(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    FourierField& operator*=(cplx s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }
    FourierField& operator*=(double s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }
    // this += s * o
    FourierField& axpy(cplx s, const FourierField& o) {
        check(o);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += s * o.coeffs_[i];
        return *this;
    }

    friend FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
    friend FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
    friend FourierField operator*(FourierField a, double s) { return a *= s; }
    friend FourierField operator*(double s, FourierField a) { return a *= s; }
    friend FourierField operator*(FourierField a, cplx s) { return a *= s; }
    friend FourierField operator*(cplx s, FourierField a) { return a *= s; }
    friend FourierField operator-(FourierField a) { return a *= -1.0; }

    bool all_finite() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
    }

private:
    std::size_t index(int n, int comp) const {
        return static_cast<std::size_t>(comp) * (2 * n_max_ + 1) + static_cast<std::size_t>(n + n_max_);
    }
    void check(const FourierField& o) const {
        if (!same_shape(o)) throw ConfigError("FourierField: shape mismatch");
    }

    int n_max_ = 0;
    int n_components_ = 1;
    std::vector<cplx> coeffs_;
};

// Eigenvalues of A = 1 - d_xx in cos/sin ordering: 1, 2, 2, 5, 5, 10, ...
inline double eigenvalue(int k) {
    int n = (k + 1) / 2;
    return static_cast<double>(n) * n + 1.0;
}

// Wavenumber carried by the k-th eigenfunction (e_{2n} = cos nx, e_{2n-1} = sin nx).
inline int eigen_wavenumber(int k) { return (k + 1) / 2; }

inline double symbol_A(int n) { return static_cast<double>(n) * n + 1.0; }

inline FourierField project_PK(const FourierField& u, int K) {
    if (K > u.n_max()) throw TruncationError("project_PK: K exceeds N_max");
    if (K < 0) throw TruncationError("project_PK: negative K");
    FourierField out = u;
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n)
            if (std::abs(n) > K) out(n, c) = 0.0;
    return out;
}

inline FourierField project_QK(const FourierField& u, int K) { return u - project_PK(u, K); }

inline FourierField apply_A(const FourierField& u) {
    FourierField out = u;
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n) out(n, c) *= symbol_A(n);
    return out;
}

inline FourierField derivative(const FourierField& u, int order = 1) {
    FourierField out = u;
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n)
            out(n, c) *= std::pow(cplx(0.0, n), order);
    return out;
}

// Periodic antiderivative of the mean-free part (zero mean output).
inline FourierField antiderivative_periodic(const FourierField& u) {
    FourierField out(u.n_max(), u.n_components());
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n)
            if (n != 0) out(n, c) = u(n, c) / cplx(0.0, n);
    return out;
}

// (sum_n (n^2+1)^s |c_n|^2 2pi)^{1/2}, all components.
inline double sobolev_norm(const FourierField& u, double s) {
    double acc = 0.0;
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n)
            acc += std::pow(symbol_A(n), s) * std::norm(u(n, c));
    return std::sqrt(two_pi * acc);
}

inline double l2_norm(const FourierField& u) { return sobolev_norm(u, 0.0); }
inline double phi_norm(const FourierField& u) { return sobolev_norm(u, 1.0); }

// (u, v) = int u conj(v) over (-pi, pi)
inline cplx inner_product(const FourierField& u, const FourierField& v, double s = 0.0) {
    if (!u.same_shape(v)) throw ConfigError("inner_product: shape mismatch");
    cplx acc = 0.0;
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n)
            acc += std::pow(symbol_A(n), s) * u(n, c) * std::conj(v(n, c));
    return two_pi * acc;
}

inline cplx mean_value(const FourierField& u, int comp = 0) { return u(0, comp); }

// Point evaluation by direct summation.
inline cplx evaluate(const FourierField& u, double x, int comp = 0) {
    cplx acc = 0.0;
    for (int n = -u.n_max(); n <= u.n_max(); ++n) acc += u(n, comp) * std::exp(cplx(0.0, n * x));
    return acc;
}

// Real field from sin/cos coefficients: u = a0 + sum_n a_n cos nx + b_n sin nx
inline FourierField from_trig(int n_max, double a0, const std::vector<std::pair<int, double>>& cos_terms,
                              const std::vector<std::pair<int, double>>& sin_terms) {
    FourierField u(n_max);
    u(0) += a0;
    for (auto [n, a] : cos_terms) {
        u(n) += 0.5 * a;
        u(-n) += 0.5 * a;
    }
    for (auto [n, b] : sin_terms) {
        u(n) += cplx(0.0, -0.5 * b);
        u(-n) += cplx(0.0, 0.5 * b);
    }
    return u;
}

}  // namespace rdalab

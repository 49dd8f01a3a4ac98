#pragma once

#include <fftw3.h>

#include <memory>
#include <mutex>
#include <unordered_map>

#include "field.hpp"

namespace rdalab {

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// In-place complex plans for one size; the planner is not thread-safe.
struct FftPlan {
    explicit FftPlan(int size) : n(size) {
        fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(size));
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd = fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd = fftw_plan_dft_1d(size, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
    }
    ~FftPlan() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    int n;
    fftw_plan fwd;
    fftw_plan bwd;
};

inline const FftPlan& plan_for(int size) {
    thread_local std::unordered_map<int, std::unique_ptr<FftPlan>> cache;
    auto& slot = cache[size];
    if (!slot) slot = std::make_unique<FftPlan>(size);
    return *slot;
}

inline fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace detail

// Unscaled sum_j a_j e^{-2 pi i jk/M}
inline void fft_forward(cplx* data, int size) {
    const auto& p = detail::plan_for(size);
    fftw_execute_dft(p.fwd, detail::as_fftw(data), detail::as_fftw(data));
}

// Unscaled sum_k a_k e^{+2 pi i jk/M}
inline void fft_backward(cplx* data, int size) {
    const auto& p = detail::plan_for(size);
    fftw_execute_dft(p.bwd, detail::as_fftw(data), detail::as_fftw(data));
}

// Smallest even 2^a 3^b 5^c >= n.
inline int fft_friendly_size(int n) {
    for (int m = std::max(n, 2);; ++m) {
        if (m % 2) continue;
        int r = m;
        for (int p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return m;
    }
}

// Physical grid size with 2x padding: M >= 4 N_max + 2, so cubic products alias
// only outside the retained band.
inline int dealiased_size(int n_max) { return fft_friendly_size(4 * n_max + 2); }

inline double grid_point(int j, int M) { return -pi + two_pi * j / M; }

// Values on x_j = -pi + 2 pi j / M, all components; layout comp * M + j.
struct PhysicalField {
    int M = 0;
    int n_components = 0;
    std::vector<cplx> values;

    cplx* component(int c) { return values.data() + static_cast<std::size_t>(c) * M; }
    const cplx* component(int c) const { return values.data() + static_cast<std::size_t>(c) * M; }
    cplx& operator()(int j, int c = 0) { return values[static_cast<std::size_t>(c) * M + j]; }
    const cplx& operator()(int j, int c = 0) const { return values[static_cast<std::size_t>(c) * M + j]; }
};

inline int wrap_index(int n, int M) { return ((n % M) + M) % M; }

// Grid wavenumber of FFT slot k (Nyquist slot mapped to -M/2).
inline int slot_wavenumber(int k, int M) { return k < (M + 1) / 2 ? k : k - M; }

inline void to_physical_component(const FourierField& u, int comp, int M, cplx* out) {
    if (M < 2 * u.n_max() + 1) throw ResolutionError("to_physical: grid too coarse");
    std::fill(out, out + M, cplx{});
    for (int n = -u.n_max(); n <= u.n_max(); ++n) {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        out[wrap_index(n, M)] += sign * u(n, comp);
    }
    fft_backward(out, M);
}

inline PhysicalField to_physical(const FourierField& u, int M) {
    PhysicalField p{M, u.n_components(), std::vector<cplx>(static_cast<std::size_t>(M) * u.n_components())};
    for (int c = 0; c < u.n_components(); ++c) to_physical_component(u, c, M, p.component(c));
    return p;
}

inline PhysicalField to_physical(const FourierField& u) { return to_physical(u, dealiased_size(u.n_max())); }

// Full grid spectrum: slot k holds the coefficient of wavenumber slot_wavenumber(k, M).
inline std::vector<cplx> grid_spectrum(const cplx* values, int M) {
    std::vector<cplx> buf(values, values + M);
    fft_forward(buf.data(), M);
    for (int k = 0; k < M; ++k) {
        int n = slot_wavenumber(k, M);
        buf[k] *= ((n % 2 == 0) ? 1.0 : -1.0) / M;
    }
    return buf;
}

inline std::vector<cplx> grid_values(const std::vector<cplx>& spectrum) {
    int M = static_cast<int>(spectrum.size());
    std::vector<cplx> buf(spectrum);
    for (int k = 0; k < M; ++k) {
        int n = slot_wavenumber(k, M);
        buf[k] *= (n % 2 == 0) ? 1.0 : -1.0;
    }
    fft_backward(buf.data(), M);
    return buf;
}

inline void from_physical_component(const cplx* values, int M, FourierField& out, int comp) {
    if (M < 2 * out.n_max() + 1) throw ResolutionError("from_physical: grid too coarse");
    std::vector<cplx> spec = grid_spectrum(values, M);
    for (int n = -out.n_max(); n <= out.n_max(); ++n) out(n, comp) = spec[wrap_index(n, M)];
}

inline FourierField from_physical(const PhysicalField& p, int n_max) {
    FourierField out(n_max, p.n_components);
    for (int c = 0; c < p.n_components; ++c) from_physical_component(p.component(c), p.M, out, c);
    return out;
}

// Applies fn pointwise on the dealiased grid of the inputs and truncates back.
// fn(const cplx* in, cplx* out, double x) sees all input components in order.
template <class Fn>
FourierField pointwise_apply(const std::vector<const FourierField*>& inputs, int out_components, Fn&& fn) {
    if (inputs.empty()) throw ConfigError("pointwise_apply: no inputs");
    int n_max = inputs.front()->n_max();
    int total = 0;
    for (const auto* f : inputs) {
        if (f->n_max() != n_max) throw ConfigError("pointwise_apply: fields on different grids");
        total += f->n_components();
    }
    int M = dealiased_size(n_max);
    std::vector<PhysicalField> phys;
    phys.reserve(inputs.size());
    for (const auto* f : inputs) phys.push_back(to_physical(*f, M));
    PhysicalField out{M, out_components, std::vector<cplx>(static_cast<std::size_t>(M) * out_components)};
    std::vector<cplx> in(total), res(out_components);
    for (int j = 0; j < M; ++j) {
        int k = 0;
        for (const auto& p : phys)
            for (int c = 0; c < p.n_components; ++c) in[k++] = p(j, c);
        std::fill(res.begin(), res.end(), cplx{});
        fn(in.data(), res.data(), grid_point(j, M));
        for (int c = 0; c < out_components; ++c) out(j, c) = res[c];
    }
    return from_physical(out, n_max);
}

template <class Fn>
FourierField pointwise_apply(const FourierField& u, Fn&& fn) {
    return pointwise_apply({&u}, u.n_components(), std::forward<Fn>(fn));
}

// Pointwise product of two scalar fields, dealiased.
inline FourierField multiply(const FourierField& a, const FourierField& b) {
    return pointwise_apply({&a, &b}, 1, [](const cplx* in, cplx* out, double) { out[0] = in[0] * in[1]; });
}

}  // namespace rdalab

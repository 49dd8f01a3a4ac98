#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "field.hpp"

namespace rdalab {

inline std::ostream& full_precision(std::ostream& os) { return os << std::setprecision(17); }

// n,component,re,im
inline void write_field_csv(std::ostream& os, const FourierField& u) {
    full_precision(os) << "n,component,re,im\n";
    for (int c = 0; c < u.n_components(); ++c)
        for (int n = -u.n_max(); n <= u.n_max(); ++n)
            os << n << ',' << c << ',' << u(n, c).real() << ',' << u(n, c).imag() << '\n';
}

inline FourierField read_field_csv(std::istream& is) {
    std::string line;
    std::getline(is, line);
    struct Row { int n, c; double re, im; };
    std::vector<Row> rows;
    int n_max = 0, n_comp = 1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        Row r{};
        if (!(ss >> r.n >> r.c >> r.re >> r.im)) throw ConfigError("read_field_csv: malformed row: " + line);
        n_max = std::max(n_max, std::abs(r.n));
        n_comp = std::max(n_comp, r.c + 1);
        rows.push_back(r);
    }
    FourierField u(n_max, n_comp);
    for (const auto& r : rows) u(r.n, r.c) = cplx(r.re, r.im);
    return u;
}

// Little-endian blob: int32 n_max, int32 n_components, then (re, im) doubles
// component-major, n ascending from -n_max.
inline std::string to_binary(const FourierField& u) {
    static_assert(std::endian::native == std::endian::little, "little-endian host required");
    std::string out(8 + 16 * u.size(), '\0');
    std::int32_t hdr[2] = {u.n_max(), u.n_components()};
    std::memcpy(out.data(), hdr, 8);
    std::memcpy(out.data() + 8, u.data().data(), 16 * u.size());
    return out;
}

inline FourierField from_binary(const std::string& blob) {
    if (blob.size() < 8) throw ConfigError("from_binary: truncated header");
    std::int32_t hdr[2];
    std::memcpy(hdr, blob.data(), 8);
    FourierField u(hdr[0], hdr[1]);
    if (blob.size() != 8 + 16 * u.size()) throw ConfigError("from_binary: payload size mismatch");
    std::memcpy(u.data().data(), blob.data() + 8, 16 * u.size());
    return u;
}

inline void write_binary(const std::string& path, const FourierField& u) {
    std::ofstream os(path, std::ios::binary);
    os << to_binary(u);
}

inline FourierField read_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return from_binary(ss.str());
}

}  // namespace rdalab

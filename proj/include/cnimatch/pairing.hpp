#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace cni {

// Exact arbitrary-precision integer carrying neighborhood encodings.
// All filter decisions compare these values exactly; no fixed-width
// fast path exists, so large neighborhoods can never overflow silently.
using BigInt = boost::multiprecision::cpp_int;

// h(p,s) = C(s+p-1, p), the p-th term of the pairing sum.
// Computed as the product of the p terms s..s+p-1 with divisions by
// 1..p interleaved as soon as they are exact, so intermediates stay
// close to the final value instead of passing through full factorials.
inline BigInt h_pairing(unsigned p, const BigInt& s) {
    if (p == 0)
        throw std::invalid_argument("h_pairing: p must be >= 1");
    if (s <= 0)
        return 0;  // C(p-1, p) = 0
    BigInt st = 1;
    unsigned divisor = 1;
    const BigInt top = s + static_cast<int>(p) - 1;
    for (BigInt t = s; t <= top; ++t) {
        st *= t;
        while (divisor <= p && st % divisor == 0) {
            st /= divisor;
            ++divisor;
        }
    }
    return st;
}

inline BigInt h_pairing(unsigned p, std::uint64_t s) {
    return h_pairing(p, BigInt(s));
}

// g_k(x_1..x_k) = sum_j h(j, x_1+..+x_j). Bijection N^k -> N.
inline BigInt g_tuple(std::span<const BigInt> xs) {
    if (xs.empty())
        throw std::invalid_argument("g_tuple: empty tuple");
    BigInt prefix = 0;
    BigInt out = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        prefix += xs[j];
        out += h_pairing(static_cast<unsigned>(j + 1), prefix);
    }
    return out;
}

inline BigInt g_tuple(std::span<const std::uint32_t> xs) {
    if (xs.empty())
        throw std::invalid_argument("g_tuple: empty tuple");
    BigInt prefix = 0;
    BigInt out = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) {
        prefix += xs[j];
        out += h_pairing(static_cast<unsigned>(j + 1), prefix);
    }
    return out;
}

inline BigInt g_tuple(std::initializer_list<BigInt> xs) {
    return g_tuple(std::span<const BigInt>(xs.begin(), xs.size()));
}

inline BigInt g_tuple(const std::vector<std::uint32_t>& xs) {
    return g_tuple(std::span<const std::uint32_t>(xs.data(), xs.size()));
}

// Natural log of max(c,1), for telemetry and compressed storage only.
// Filter decisions always compare exact integers.
inline double cni_log(const BigInt& c) {
    if (c <= 1)
        return 0.0;
    const unsigned bits = boost::multiprecision::msb(c);
    if (bits < 900)
        return std::log(c.convert_to<double>());
    // Too large for double: log(m * 2^e) = log(m) + e*log(2).
    const unsigned shift = bits - 64;
    const BigInt mantissa = c >> shift;
    return std::log(mantissa.convert_to<double>()) + shift * std::log(2.0);
}

}  // namespace cni

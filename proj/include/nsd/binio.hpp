#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "nsd/errors.hpp"

// Little-endian binary stream helpers shared by the window dump and the model
// container. Byte order is fixed on disk regardless of host endianness.

namespace nsd::io {

namespace detail {

template <typename T>
T byteswap_if_big(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        auto* p = reinterpret_cast<unsigned char*>(&v);
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
    }
    return v;
}

}  // namespace detail

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    T v = detail::byteswap_if_big(value);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw SectionLengthMismatch(std::string("truncated while reading ") + what);
    return detail::byteswap_if_big(v);
}

inline void write_f32(std::ostream& out, double value) {
    write_le<float>(out, static_cast<float>(value));
}

inline double read_f32(std::istream& in, const char* what) {
    return static_cast<double>(read_le<float>(in, what));
}

}  // namespace nsd::io

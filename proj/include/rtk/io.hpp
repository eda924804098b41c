#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "rtk/image.hpp"
#include "rtk/sinogram.hpp"

namespace rtk {

/// Minimal binary array container:
///   "RTKD" | version u8=1 | dtype u8=1 (f64 LE) | ndim u8 | pad u8=0 |
///   dims (ndim x u64 LE) | payload (row-major f64 LE)
struct RtkdArray {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;

    std::uint64_t element_count() const {
        std::uint64_t n = 1;
        for (auto d : dims) n *= d;
        return n;
    }
};

namespace detail {

inline void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace detail

inline void write_array(const std::string& path, const RtkdArray& a) {
    if (a.data.size() != a.element_count())
        throw DimensionMismatchError("write_array: payload does not match dims");
    std::string buf;
    buf.reserve(8 + 8 * a.dims.size() + 8 * a.data.size());
    buf += "RTKD";
    buf.push_back(1);  // version
    buf.push_back(1);  // dtype: f64 little-endian
    buf.push_back(static_cast<char>(a.dims.size()));
    buf.push_back(0);  // pad
    for (auto d : a.dims) detail::put_u64_le(buf, d);
    for (double v : a.data) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        detail::put_u64_le(buf, bits);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("write_array: cannot open " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("write_array: write failed for " + path);
}

inline RtkdArray read_array(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_array: cannot open " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (raw.size() < 4 || std::memcmp(raw.data(), "RTKD", 4) != 0)
        throw NotRtkdError("read_array: bad magic in " + path);
    if (raw.size() < 8) throw CorruptFileError("read_array: truncated header in " + path);
    if (raw[4] != 1) throw CorruptFileError("read_array: unsupported version in " + path);
    if (raw[5] != 1) throw UnsupportedDtypeError("read_array: dtype must be f64 in " + path);
    const unsigned ndim = raw[6];
    std::size_t pos = 8;
    RtkdArray a;
    a.dims.resize(ndim);
    if (raw.size() < pos + 8ull * ndim)
        throw CorruptFileError("read_array: truncated dims in " + path);
    for (unsigned i = 0; i < ndim; ++i) {
        a.dims[i] = detail::get_u64_le(raw.data() + pos);
        pos += 8;
    }
    const std::uint64_t count = a.element_count();
    if (raw.size() != pos + 8ull * count)
        throw CorruptFileError("read_array: payload size mismatch in " + path);
    a.data.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t bits = detail::get_u64_le(raw.data() + pos);
        pos += 8;
        std::memcpy(&a.data[i], &bits, 8);
    }
    return a;
}

inline void write_image_rtkd(const std::string& path, const Image& x) {
    RtkdArray a;
    a.dims = {static_cast<std::uint64_t>(x.grid.n), static_cast<std::uint64_t>(x.grid.n)};
    a.data = x.values;
    write_array(path, a);
}

inline void write_sinogram_rtkd(const std::string& path, const Sinogram& s) {
    RtkdArray a;
    a.dims = {static_cast<std::uint64_t>(s.geometry.count),
              static_cast<std::uint64_t>(s.time.samples)};
    a.data = s.values;
    write_array(path, a);
}

/// Binary PGM (P5, maxval 65535, big-endian samples) with the value range
/// [min,max] mapped linearly onto [0,65535]; constant images map to 0.
/// Rows are emitted top-down in y, i.e. the highest row index first.
inline void export_pgm(const std::string& path, const Image& x) {
    const int n = x.grid.n;
    const ImageStats s = image_stats(x);
    const double span = s.max - s.min;
    std::string buf = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n65535\n";
    for (int i = n - 1; i >= 0; --i) {
        for (int j = 0; j < n; ++j) {
            unsigned long q = 0;
            if (span > 0) {
                double t = (x.at(i, j) - s.min) / span * 65535.0;
                if (t < 0) t = 0;
                if (t > 65535) t = 65535;
                q = static_cast<unsigned long>(t + 0.5);
            }
            buf.push_back(static_cast<char>((q >> 8) & 0xff));
            buf.push_back(static_cast<char>(q & 0xff));
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("export_pgm: cannot open " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw IoError("export_pgm: write failed for " + path);
}

/// Shortest representation that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
    char tmp[40];
    std::snprintf(tmp, sizeof(tmp), "%.17g", v);
    return tmp;
}

}  // namespace rtk

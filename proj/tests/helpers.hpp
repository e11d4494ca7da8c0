#ifndef TAMPERLAB_TEST_HELPERS_HPP
#define TAMPERLAB_TEST_HELPERS_HPP

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <zlib.h>

#include "tamperlab/image.hpp"
#include "tamperlab/series.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// ARMA simulation oracle: generates series with known parameters so the
// estimators can be checked against ground truth.

inline std::vector<double> simulate_arma(const std::vector<double>& phi,
                                         const std::vector<double>& theta, double mu, double sigma,
                                         std::size_t n, std::uint64_t seed,
                                         std::size_t burn_in = 500) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::size_t total = n + burn_in;
    std::vector<double> e(total), z(total);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = noise(rng);
        double v = e[t];
        for (std::size_t i = 0; i < phi.size(); ++i)
            if (t > i) v += phi[i] * z[t - 1 - i];
        for (std::size_t j = 0; j < theta.size(); ++j)
            if (t > j) v += theta[j] * e[t - 1 - j];
        z[t] = v;
    }
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = mu + z[burn_in + t];
    return out;
}

/// Integrates an ARMA draw once, producing an ARIMA(p,1,q) path.
inline std::vector<double> simulate_arima_d1(const std::vector<double>& phi,
                                             const std::vector<double>& theta, double mu,
                                             double sigma, std::size_t n, std::uint64_t seed) {
    std::vector<double> dz = simulate_arma(phi, theta, mu, sigma, n, seed);
    std::vector<double> y(n + 1);
    y[0] = 0;
    for (std::size_t t = 0; t < n; ++t) y[t + 1] = y[t] + dz[t];
    return y;
}

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    return simulate_arma({}, {}, 0.0, sigma, n, seed, 0);
}

inline std::vector<double> random_walk(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<double> y(n);
    double acc = 0;
    for (std::size_t t = 0; t < n; ++t) {
        acc += noise(rng);
        y[t] = acc;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Image construction

inline tamperlab::Frame constant_frame(int w, int h, std::uint8_t v) {
    return tamperlab::Frame(w, h, v);
}

/// Left half `lo`, right half `hi`.
inline tamperlab::Frame vertical_step(int w, int h, std::uint8_t lo = 0, std::uint8_t hi = 255) {
    tamperlab::Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.at(x, y) = x < w / 2 ? lo : hi;
    return f;
}

inline tamperlab::Frame random_frame(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, 255);
    tamperlab::Frame f(w, h);
    for (auto& v : f.data) v = static_cast<std::uint8_t>(d(rng));
    return f;
}

inline tamperlab::Frame checkerboard(int w, int h, int cell) {
    tamperlab::Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.at(x, y) = ((x / cell + y / cell) % 2) ? 255 : 0;
    return f;
}

// ---------------------------------------------------------------------------
// Minimal PNG encoder (filter 0 rows + zlib), independent of the decoder
// under test.

namespace detail {

inline void put_be32(std::vector<std::uint8_t>& v, std::uint32_t x) {
    v.push_back(std::uint8_t(x >> 24));
    v.push_back(std::uint8_t(x >> 16));
    v.push_back(std::uint8_t(x >> 8));
    v.push_back(std::uint8_t(x));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& payload) {
    put_be32(out, static_cast<std::uint32_t>(payload.size()));
    std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uLong crc = ::crc32(0, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

} // namespace detail

/// channels: 1 = gray, 3 = RGB; pixels is row-major interleaved.
inline void write_png(const std::string& path, int w, int h, int channels,
                      const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> raw;
    std::size_t stride = static_cast<std::size_t>(w) * channels;
    for (int y = 0; y < h; ++y) {
        raw.push_back(0);  // filter none
        raw.insert(raw.end(), pixels.begin() + y * stride, pixels.begin() + (y + 1) * stride);
    }
    uLongf comp_len = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    ::compress(comp.data(), &comp_len, raw.data(), static_cast<uLong>(raw.size()));
    comp.resize(comp_len);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    detail::put_be32(ihdr, static_cast<std::uint32_t>(w));
    detail::put_be32(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);                                  // bit depth
    ihdr.push_back(channels == 3 ? 2 : 0);              // color type
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);                                  // no interlace
    detail::put_chunk(out, "IHDR", ihdr);
    detail::put_chunk(out, "IDAT", comp);
    detail::put_chunk(out, "IEND", {});

    std::ofstream f(path, std::ios::binary);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

/// Unique scratch directory under the system temp root.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("tamperlab_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace testutil

#endif

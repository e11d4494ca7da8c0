#ifndef TAMPERLAB_IMAGE_HPP
#define TAMPERLAB_IMAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

namespace tamperlab {

/// Single-channel 8-bit luminance image, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Frame() = default;
    Frame(int w, int h, std::uint8_t fill = 0) : width(w), height(h) {
        if (w <= 0 || h <= 0) throw std::invalid_argument("Frame: non-positive dimensions");
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }

    std::uint8_t at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }

    /// Clamp-to-border read.
    std::uint8_t at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y);
    }

    std::size_t pixel_count() const { return data.size(); }

    bool operator==(const Frame& o) const {
        return width == o.width && height == o.height && data == o.data;
    }
};

/// Real-valued image used for accumulators and intermediate math.
struct RealImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    RealImage() = default;
    RealImage(int w, int h, double fill = 0.0) : width(w), height(h) {
        data.assign(static_cast<std::size_t>(w) * h, fill);
    }
    explicit RealImage(const Frame& f) : width(f.width), height(f.height) {
        data.resize(f.data.size());
        for (std::size_t i = 0; i < f.data.size(); ++i) data[i] = f.data[i];
    }

    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y);
    }

    Frame round_to_frame() const {
        Frame f(width, height);
        for (std::size_t i = 0; i < data.size(); ++i) {
            f.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(data[i]), 0L, 255L));
        }
        return f;
    }

    double sum() const { return std::accumulate(data.begin(), data.end(), 0.0); }
};

/// Signed per-pixel derivatives with precomputed magnitude.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> magnitude;
};

inline std::uint8_t luma_bt601(int r, int g, int b) {
    double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

// ---------------------------------------------------------------------------
// PGM (binary P5, maxval 255)

namespace detail {

inline int pnm_read_token(std::istream& in) {
    // skips whitespace and '#' comments
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int v = -1;
    in >> v;
    return v;
}

} // namespace detail

inline Frame load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw std::runtime_error(path + ": not a binary P5 PGM");
    int w = detail::pnm_read_token(in);
    int h = detail::pnm_read_token(in);
    int maxval = detail::pnm_read_token(in);
    if (w <= 0 || h <= 0) throw std::runtime_error(path + ": zero-dimension image");
    if (maxval != 255) throw std::runtime_error(path + ": unsupported maxval (want 255)");
    in.get(); // single whitespace after header
    Frame f(w, h);
    in.read(reinterpret_cast<char*>(f.data.data()), static_cast<std::streamsize>(f.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(f.data.size()))
        throw std::runtime_error(path + ": truncated pixel data");
    return f;
}

inline void save_pgm(const Frame& f, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << f.width << " " << f.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(f.data.data()),
              static_cast<std::streamsize>(f.data.size()));
}

// ---------------------------------------------------------------------------
// PNG (8-bit grayscale or RGB, non-interlaced)

namespace detail {

inline std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

inline std::uint8_t paeth(int a, int b, int c) {
    int p = a + b - c;
    int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

inline std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& in,
                                              std::size_t expected) {
    std::vector<std::uint8_t> out(expected);
    uLongf out_len = static_cast<uLongf>(expected);
    int rc = ::uncompress(out.data(), &out_len, in.data(), static_cast<uLong>(in.size()));
    if (rc != Z_OK || out_len != expected)
        throw std::runtime_error("PNG: corrupt compressed stream");
    return out;
}

} // namespace detail

inline Frame load_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw std::runtime_error(path + ": not a PNG file");

    std::size_t pos = 8;
    int w = 0, h = 0, bit_depth = 0, color_type = 0, interlace = 0;
    std::vector<std::uint8_t> idat;
    bool saw_ihdr = false;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t len = detail::be32(&bytes[pos]);
        std::string type(reinterpret_cast<const char*>(&bytes[pos + 4]), 4);
        if (pos + 12 + len > bytes.size()) throw std::runtime_error(path + ": truncated chunk");
        const std::uint8_t* payload = &bytes[pos + 8];
        if (type == "IHDR") {
            if (len != 13) throw std::runtime_error(path + ": bad IHDR");
            w = static_cast<int>(detail::be32(payload));
            h = static_cast<int>(detail::be32(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            interlace = payload[12];
            saw_ihdr = true;
        } else if (type == "IDAT") {
            idat.insert(idat.end(), payload, payload + len);
        } else if (type == "IEND") {
            break;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr) throw std::runtime_error(path + ": missing IHDR");
    if (w <= 0 || h <= 0) throw std::runtime_error(path + ": zero-dimension image");
    if (bit_depth != 8) throw std::runtime_error(path + ": unsupported bit depth");
    if (color_type != 0 && color_type != 2)
        throw std::runtime_error(path + ": unsupported color type (want 8-bit gray or RGB)");
    if (interlace != 0) throw std::runtime_error(path + ": interlaced PNG not supported");

    int channels = (color_type == 2) ? 3 : 1;
    std::size_t stride = static_cast<std::size_t>(w) * channels;
    std::vector<std::uint8_t> raw =
        detail::zlib_inflate(idat, (stride + 1) * static_cast<std::size_t>(h));

    // undo per-scanline filters
    std::vector<std::uint8_t> img(stride * h);
    for (int y = 0; y < h; ++y) {
        std::uint8_t filter = raw[y * (stride + 1)];
        const std::uint8_t* src = &raw[y * (stride + 1) + 1];
        std::uint8_t* dst = &img[y * stride];
        const std::uint8_t* up = (y > 0) ? &img[(y - 1) * stride] : nullptr;
        for (std::size_t x = 0; x < stride; ++x) {
            int a = (x >= static_cast<std::size_t>(channels)) ? dst[x - channels] : 0;
            int b = up ? up[x] : 0;
            int c = (up && x >= static_cast<std::size_t>(channels)) ? up[x - channels] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += detail::paeth(a, b, c); break;
                default: throw std::runtime_error(path + ": bad filter byte");
            }
            dst[x] = static_cast<std::uint8_t>(v & 0xff);
        }
    }

    Frame f(w, h);
    if (channels == 1) {
        std::copy(img.begin(), img.end(), f.data.begin());
    } else {
        for (std::size_t i = 0; i < f.data.size(); ++i) {
            f.data[i] = luma_bt601(img[3 * i], img[3 * i + 1], img[3 * i + 2]);
        }
    }
    return f;
}

inline Frame load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char head[2] = {0, 0};
    in.read(head, 2);
    in.close();
    if (head[0] == 'P' && head[1] == '5') return load_pgm(path);
    if (static_cast<unsigned char>(head[0]) == 0x89 && head[1] == 'P') return load_png(path);
    throw std::runtime_error(path + ": unsupported image format");
}

// ---------------------------------------------------------------------------
// Frame sequences

/// Ordered same-size frame stream backed by a list of files.
class FrameSequence {
public:
    static FrameSequence from_directory(const std::string& dir) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) throw std::runtime_error(dir + ": not a directory");
        std::vector<std::string> paths;
        for (const auto& e : fs::directory_iterator(dir)) {
            if (!e.is_regular_file()) continue;
            auto ext = e.path().extension().string();
            if (ext == ".pgm" || ext == ".png") paths.push_back(e.path().string());
        }
        std::sort(paths.begin(), paths.end());
        return FrameSequence(std::move(paths));
    }

    static FrameSequence from_manifest(const std::string& manifest_path) {
        std::ifstream in(manifest_path);
        if (!in) throw std::runtime_error("cannot open " + manifest_path);
        std::vector<std::string> paths;
        std::string line;
        auto base = std::filesystem::path(manifest_path).parent_path();
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::filesystem::path p(line);
            paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
        }
        return FrameSequence(std::move(paths));
    }

    /// Directory path or newline-delimited manifest file.
    static FrameSequence open(const std::string& source) {
        if (std::filesystem::is_directory(source)) return from_directory(source);
        return from_manifest(source);
    }

    std::size_t size() const { return paths_.size(); }
    const std::vector<std::string>& paths() const { return paths_; }

    /// Loads frame i, enforcing the constant-dimension invariant.
    Frame frame(std::size_t i) const {
        Frame f = load_frame(paths_.at(i));
        if (width_ == 0) {
            width_ = f.width;
            height_ = f.height;
        } else if (f.width != width_ || f.height != height_) {
            throw std::runtime_error(paths_[i] + ": dimension mismatch mid-sequence");
        }
        return f;
    }

private:
    explicit FrameSequence(std::vector<std::string> paths) : paths_(std::move(paths)) {
        if (paths_.empty()) throw std::runtime_error("empty frame source");
    }

    std::vector<std::string> paths_;
    mutable int width_ = 0;
    mutable int height_ = 0;
};

// ---------------------------------------------------------------------------
// Kernels

inline Frame resize(const Frame& src, int w, int h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("resize: non-positive target");
    if (w == src.width && h == src.height) return src;
    Frame dst(w, h);
    double sx = static_cast<double>(src.width) / w;
    double sy = static_cast<double>(src.height) / h;
    for (int y = 0; y < h; ++y) {
        double fy = (y + 0.5) * sy - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        for (int x = 0; x < w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            double v = (1 - wy) * ((1 - wx) * src.at_clamped(x0, y0) +
                                   wx * src.at_clamped(x0 + 1, y0)) +
                       wy * ((1 - wx) * src.at_clamped(x0, y0 + 1) +
                             wx * src.at_clamped(x0 + 1, y0 + 1));
            dst.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
        }
    }
    return dst;
}

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

inline RealImage separable_convolve(const RealImage& src, const std::vector<double>& k) {
    int radius = static_cast<int>(k.size() / 2);
    RealImage tmp(src.width, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * src.at_clamped(x + i, y);
            tmp.at(x, y) = acc;
        }
    RealImage out(src.width, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) {
            double acc = 0;
            for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp.at_clamped(x, y + i);
            out.at(x, y) = acc;
        }
    return out;
}

} // namespace detail

inline RealImage gaussian_blur(const RealImage& src, double sigma) {
    if (sigma <= 0) throw std::invalid_argument("gaussian_blur: sigma must be > 0");
    return detail::separable_convolve(src, detail::gaussian_kernel(sigma));
}

inline Frame gaussian_blur(const Frame& src, double sigma) {
    return gaussian_blur(RealImage(src), sigma).round_to_frame();
}

inline GradientField sobel_gradient(const Frame& f) {
    if (f.width < 3 || f.height < 3)
        throw std::invalid_argument("sobel_gradient: frame smaller than 3x3");
    GradientField g;
    g.width = f.width;
    g.height = f.height;
    std::size_t n = f.pixel_count();
    g.gx.resize(n);
    g.gy.resize(n);
    g.magnitude.resize(n);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double p00 = f.at_clamped(x - 1, y - 1), p10 = f.at_clamped(x, y - 1),
                   p20 = f.at_clamped(x + 1, y - 1);
            double p01 = f.at_clamped(x - 1, y), p21 = f.at_clamped(x + 1, y);
            double p02 = f.at_clamped(x - 1, y + 1), p12 = f.at_clamped(x, y + 1),
                   p22 = f.at_clamped(x + 1, y + 1);
            double gx = (p20 + 2 * p21 + p22) - (p00 + 2 * p01 + p02);
            double gy = (p02 + 2 * p12 + p22) - (p00 + 2 * p10 + p20);
            std::size_t i = static_cast<std::size_t>(y) * f.width + x;
            g.gx[i] = gx;
            g.gy[i] = gy;
            g.magnitude[i] = std::sqrt(gx * gx + gy * gy);
        }
    }
    return g;
}

/// 256 must be divisible by bins; pixel v maps to bin floor(v*bins/256).
inline std::vector<std::size_t> histogram(const Frame& f, int bins = 256) {
    if (bins < 1 || bins > 256 || 256 % bins != 0)
        throw std::invalid_argument("histogram: invalid bin count");
    std::vector<std::size_t> h(bins, 0);
    for (std::uint8_t v : f.data) ++h[(static_cast<int>(v) * bins) >> 8];
    return h;
}

/// Shannon entropy in nats over a count histogram.
inline double entropy(const std::vector<std::size_t>& h) {
    if (h.empty()) throw std::invalid_argument("entropy: empty histogram");
    double total = 0;
    for (std::size_t c : h) total += static_cast<double>(c);
    if (total == 0) throw std::invalid_argument("entropy: all-zero histogram");
    double e = 0;
    for (std::size_t c : h) {
        if (c == 0) continue;
        double p = c / total;
        e -= p * std::log(p);
    }
    return e;
}

} // namespace tamperlab

#endif

#ifndef TAMPERLAB_FEATURES_HPP
#define TAMPERLAB_FEATURES_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tamperlab/image.hpp"

namespace tamperlab {

inline const std::array<std::string, 10>& feature_ids() {
    static const std::array<std::string, 10> ids = {"b1", "b2", "b3", "b4", "e1",
                                                    "e2", "e3", "e4", "k1", "k2"};
    return ids;
}

struct FeatureConfig {
    double alpha = 0.95;             // reference smoothing weight, in [0,1)
    int n_delay = 30;                // b3 time delay in frames
    int hist_neighborhood = 10;      // K, histogram window half-width for b4
    double strong_edge_threshold = 100.0;  // on the 0..1020 Sobel magnitude scale
    double harris_k = 0.04;
    double harris_sigma = 1.0;
    double harris_threshold = 1e6;
    int keypoint_refresh = 30;       // frames between reference keypoint recomputes
    bool e4_and_only = false;        // count joint edge presence instead of agreement

    void validate() const {
        if (alpha < 0.0 || alpha >= 1.0)
            throw std::invalid_argument("feature config: alpha must be in [0,1)");
        if (n_delay < 1) throw std::invalid_argument("feature config: n_delay must be >= 1");
        if (hist_neighborhood < 0)
            throw std::invalid_argument("feature config: hist_neighborhood must be >= 0");
        if (keypoint_refresh < 1)
            throw std::invalid_argument("feature config: keypoint_refresh must be >= 1");
    }
};

struct Keypoint {
    int x = 0;
    int y = 0;
    double response = 0.0;
};

using KeypointSet = std::vector<Keypoint>;

/// Harris corner response over a Gaussian-weighted structure tensor,
/// 3x3 non-maximum suppression, response cutoff from config.
inline KeypointSet detect_keypoints(const Frame& f, const FeatureConfig& cfg) {
    if (f.width < 7 || f.height < 7)
        throw std::invalid_argument("detect_keypoints: frame smaller than 7x7");
    GradientField g = sobel_gradient(f);
    std::size_t n = f.pixel_count();
    RealImage ixx(f.width, f.height), ixy(f.width, f.height), iyy(f.width, f.height);
    for (std::size_t i = 0; i < n; ++i) {
        ixx.data[i] = g.gx[i] * g.gx[i];
        ixy.data[i] = g.gx[i] * g.gy[i];
        iyy.data[i] = g.gy[i] * g.gy[i];
    }
    ixx = gaussian_blur(ixx, cfg.harris_sigma);
    ixy = gaussian_blur(ixy, cfg.harris_sigma);
    iyy = gaussian_blur(iyy, cfg.harris_sigma);

    RealImage resp(f.width, f.height);
    for (std::size_t i = 0; i < n; ++i) {
        double det = ixx.data[i] * iyy.data[i] - ixy.data[i] * ixy.data[i];
        double tr = ixx.data[i] + iyy.data[i];
        resp.data[i] = det - cfg.harris_k * tr * tr;
    }

    KeypointSet kps;
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double r = resp.at(x, y);
            if (r <= cfg.harris_threshold) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    if (resp.at_clamped(x + dx, y + dy) > r) {
                        is_max = false;
                        break;
                    }
                }
            if (is_max) kps.push_back({x, y, r});
        }
    }
    return kps;
}

/// F = (1/n) sum sqrt(x^2+y^2) * |response|; 0 for an empty set.
inline double keypoint_descriptor(const KeypointSet& kps) {
    if (kps.empty()) return 0.0;
    double acc = 0;
    for (const Keypoint& k : kps)
        acc += std::sqrt(double(k.x) * k.x + double(k.y) * k.y) * std::fabs(k.response);
    return acc / static_cast<double>(kps.size());
}

struct EdgeMaps {
    RealImage magnitude;
    std::vector<std::uint8_t> binary;  // 1 where magnitude > strong_edge_threshold
};

inline EdgeMaps edge_maps(const Frame& f, const FeatureConfig& cfg) {
    GradientField g = sobel_gradient(f);
    EdgeMaps m;
    m.magnitude = RealImage(f.width, f.height);
    m.magnitude.data = std::move(g.magnitude);
    m.binary.resize(f.pixel_count());
    for (std::size_t i = 0; i < m.binary.size(); ++i)
        m.binary[i] = m.magnitude.data[i] > cfg.strong_edge_threshold ? 1 : 0;
    return m;
}

/// One frame's ten residuals plus per-feature validity.
struct ResidualSample {
    std::size_t frame_index = 0;
    std::array<double, 10> values{};
    std::array<bool, 10> valid{};

    double value(const std::string& id) const { return values[index_of(id)]; }
    bool is_valid(const std::string& id) const { return valid[index_of(id)]; }

    static std::size_t index_of(const std::string& id) {
        const auto& ids = feature_ids();
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (ids[i] == id) return i;
        throw std::invalid_argument("unknown feature id: " + id);
    }

    /// Bit i set = feature i valid, b1 = LSB.
    unsigned valid_mask() const {
        unsigned m = 0;
        for (std::size_t i = 0; i < valid.size(); ++i)
            if (valid[i]) m |= 1u << i;
        return m;
    }
};

/// Per-camera adaptive reference state. Single writer; process frames in order.
class FeatureState {
public:
    FeatureState(const Frame& first_frame, const FeatureConfig& cfg) : cfg_(cfg) {
        cfg_.validate();
        width_ = first_frame.width;
        height_ = first_frame.height;
        background_ = RealImage(first_frame);
        delay_buffer_.push_back(background_);
        EdgeMaps m = edge_maps(first_frame, cfg_);
        ref_edge_magnitude_ = m.magnitude;
        ref_edge_binary_ = RealImage(width_, height_);
        for (std::size_t i = 0; i < m.binary.size(); ++i)
            ref_edge_binary_.data[i] = m.binary[i];
        ref_keypoints_ = detect_keypoints(first_frame, cfg_);
        frames_since_refresh_ = 0;
        frames_seen_ = 1;
    }

    const FeatureConfig& config() const { return cfg_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const RealImage& background() const { return background_; }
    std::size_t delay_buffer_size() const { return delay_buffer_.size(); }
    std::size_t frames_seen() const { return frames_seen_; }
    const KeypointSet& reference_keypoints() const { return ref_keypoints_; }
    const RealImage& reference_edge_magnitude() const { return ref_edge_magnitude_; }

    /// Binary reference edges: accumulator thresholded at 0.5.
    std::vector<std::uint8_t> reference_edge_binary() const {
        std::vector<std::uint8_t> b(ref_edge_binary_.data.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = ref_edge_binary_.data[i] > 0.5 ? 1 : 0;
        return b;
    }

    void update_background(const Frame& frame) {
        check_dims(frame);
        // snapshot of the pre-update background keeps the b3 delay span at
        // exactly n_delay frames
        delay_buffer_.push_back(background_);
        while (delay_buffer_.size() > static_cast<std::size_t>(cfg_.n_delay))
            delay_buffer_.pop_front();
        double a = cfg_.alpha;
        for (std::size_t i = 0; i < background_.data.size(); ++i)
            background_.data[i] = a * background_.data[i] + (1 - a) * frame.data[i];
    }

    void update_reference_edges(const EdgeMaps& maps) {
        double a = cfg_.alpha;
        for (std::size_t i = 0; i < ref_edge_magnitude_.data.size(); ++i) {
            ref_edge_magnitude_.data[i] =
                a * ref_edge_magnitude_.data[i] + (1 - a) * maps.magnitude.data[i];
            ref_edge_binary_.data[i] = a * ref_edge_binary_.data[i] + (1 - a) * maps.binary[i];
        }
    }

    double residual_b1(const Frame& frame) const {
        check_dims(frame);
        double acc = 0;
        for (std::size_t i = 0; i < frame.data.size(); ++i)
            acc += background_.data[i] - frame.data[i];
        return acc;
    }

    double residual_b2(const Frame& frame) const {
        check_dims(frame);
        Frame bg = background_.round_to_frame();
        return entropy(histogram(bg, 256)) - entropy(histogram(frame, 256));
    }

    bool b3_ready() const {
        return delay_buffer_.size() >= static_cast<std::size_t>(cfg_.n_delay) &&
               frames_seen_ > static_cast<std::size_t>(cfg_.n_delay);
    }

    double residual_b3() const {
        const RealImage& oldest = delay_buffer_.front();
        double acc = 0;
        for (std::size_t i = 0; i < background_.data.size(); ++i)
            acc += background_.data[i] - oldest.data[i];
        return acc;
    }

    double residual_b4(const Frame& frame) const {
        check_dims(frame);
        Frame bg = background_.round_to_frame();
        auto h_i = histogram(frame, 256);
        auto h_b = histogram(bg, 256);
        auto arg_max = [](const std::vector<std::size_t>& h) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < h.size(); ++i)
                if (h[i] > h[best]) best = i;  // ties break to the lowest bin
            return static_cast<int>(best);
        };
        int m_i = arg_max(h_i);
        int m_b = arg_max(h_b);
        int k = cfg_.hist_neighborhood;
        auto window_sum = [](const std::vector<std::size_t>& h, int center, int k) {
            double acc = 0;
            for (int a = std::max(0, center - k); a <= std::min(255, center + k); ++a)
                acc += static_cast<double>(h[a]);
            return acc;
        };
        return window_sum(h_b, m_i, k) - window_sum(h_i, m_b, k);
    }

    double residual_e1(const EdgeMaps& test) const {
        auto ref = reference_edge_binary();
        long ref_count = 0, test_count = 0;
        for (std::size_t i = 0; i < ref.size(); ++i) {
            ref_count += ref[i];
            test_count += test.binary[i];
        }
        return static_cast<double>(ref_count - test_count);
    }

    double residual_e2(const EdgeMaps& test) const {
        double acc = 0;
        for (std::size_t i = 0; i < ref_edge_magnitude_.data.size(); ++i)
            acc += ref_edge_magnitude_.data[i] - test.magnitude.data[i];
        return acc;
    }

    double residual_e3(const EdgeMaps& test) const {
        double thr = cfg_.strong_edge_threshold;
        double acc = 0;
        for (std::size_t i = 0; i < ref_edge_magnitude_.data.size(); ++i) {
            double r = ref_edge_magnitude_.data[i];
            double t = test.magnitude.data[i];
            acc += (r > thr ? r : 0.0) - (t > thr ? t : 0.0);
        }
        return acc;
    }

    double residual_e4(const EdgeMaps& test) const {
        auto ref = reference_edge_binary();
        long count = 0;
        if (cfg_.e4_and_only) {
            for (std::size_t i = 0; i < ref.size(); ++i)
                count += (ref[i] && test.binary[i]) ? 1 : 0;
        } else {
            for (std::size_t i = 0; i < ref.size(); ++i)
                count += (ref[i] == test.binary[i]) ? 1 : 0;
        }
        return static_cast<double>(count);
    }

    double residual_k1(const KeypointSet& test) const {
        return static_cast<double>(ref_keypoints_.size()) - static_cast<double>(test.size());
    }

    double residual_k2(const KeypointSet& test) const {
        return keypoint_descriptor(ref_keypoints_) - keypoint_descriptor(test);
    }

    /// Computes all ten residuals against the pre-update references, then
    /// advances the background and edge accumulators.
    ResidualSample process_frame(const Frame& frame) {
        check_dims(frame);
        ResidualSample s;
        s.frame_index = frames_seen_;

        EdgeMaps test_edges = edge_maps(frame, cfg_);
        KeypointSet test_kps = detect_keypoints(frame, cfg_);

        s.values[0] = residual_b1(frame);
        s.values[1] = residual_b2(frame);
        bool b3_valid = b3_ready();
        s.values[2] = b3_valid ? residual_b3() : 0.0;
        s.values[3] = residual_b4(frame);
        s.values[4] = residual_e1(test_edges);
        s.values[5] = residual_e2(test_edges);
        s.values[6] = residual_e3(test_edges);
        s.values[7] = residual_e4(test_edges);
        s.values[8] = residual_k1(test_kps);
        s.values[9] = residual_k2(test_kps);
        s.valid.fill(true);
        s.valid[2] = b3_valid;

        update_background(frame);
        update_reference_edges(test_edges);
        if (++frames_since_refresh_ >= cfg_.keypoint_refresh) {
            ref_keypoints_ = detect_keypoints(background_.round_to_frame(), cfg_);
            frames_since_refresh_ = 0;
        }
        ++frames_seen_;
        return s;
    }

private:
    void check_dims(const Frame& f) const {
        if (f.width != width_ || f.height != height_)
            throw std::invalid_argument("frame dimensions do not match feature state");
    }

    FeatureConfig cfg_;
    int width_ = 0;
    int height_ = 0;
    RealImage background_;
    std::deque<RealImage> delay_buffer_;
    RealImage ref_edge_magnitude_;
    RealImage ref_edge_binary_;
    KeypointSet ref_keypoints_;
    int frames_since_refresh_ = 0;
    std::size_t frames_seen_ = 0;
};

// ---------------------------------------------------------------------------
// Residual CSV interchange

inline void write_residual_csv(const std::vector<ResidualSample>& samples,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "frame_index,b1,b2,b3,b4,e1,e2,e3,e4,k1,k2,valid_mask\n";
    out.precision(17);
    for (const ResidualSample& s : samples) {
        out << s.frame_index;
        for (double v : s.values) out << ',' << v;
        out << ',' << s.valid_mask() << '\n';
    }
}

inline std::vector<ResidualSample> read_residual_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line != "frame_index,b1,b2,b3,b4,e1,e2,e3,e4,k1,k2,valid_mask")
        throw std::runtime_error(path + ": bad residual CSV header");
    std::vector<ResidualSample> samples;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        ResidualSample s;
        std::getline(ss, tok, ',');
        s.frame_index = std::stoull(tok);
        for (int i = 0; i < 10; ++i) {
            if (!std::getline(ss, tok, ','))
                throw std::runtime_error(path + ": missing feature column");
            s.values[i] = std::stod(tok);
        }
        if (!std::getline(ss, tok, ','))
            throw std::runtime_error(path + ": missing valid_mask column");
        unsigned mask = static_cast<unsigned>(std::stoul(tok));
        for (int i = 0; i < 10; ++i) s.valid[i] = (mask >> i) & 1u;
        samples.push_back(s);
    }
    return samples;
}

} // namespace tamperlab

#endif

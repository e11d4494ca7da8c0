#ifndef TAMPERLAB_SYNTH_HPP
#define TAMPERLAB_SYNTH_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tamperlab/image.hpp"

namespace tamperlab {

enum class TamperKind { covered, defocussed, moved };

inline const char* tamper_kind_name(TamperKind k) {
    switch (k) {
        case TamperKind::covered: return "covered";
        case TamperKind::defocussed: return "defocussed";
        case TamperKind::moved: return "moved";
    }
    return "?";
}

inline TamperKind tamper_kind_from_name(const std::string& s) {
    if (s == "covered") return TamperKind::covered;
    if (s == "defocussed") return TamperKind::defocussed;
    if (s == "moved") return TamperKind::moved;
    throw std::invalid_argument("unknown tamper kind: " + s);
}

struct TamperEvent {
    TamperKind kind = TamperKind::covered;
    std::size_t start_frame = 0;
    std::size_t end_frame = 0;  // exclusive
    double extent = 1.0;        // severity fraction in (0,1]
    std::size_t rate_frames = 0;  // onset ramp length; 0 = abrupt

    void validate() const {
        if (start_frame >= end_frame) throw std::invalid_argument("tamper event: start >= end");
        if (extent <= 0.0 || extent > 1.0)
            throw std::invalid_argument("tamper event: extent out of (0,1]");
        if (rate_frames > end_frame - start_frame)
            throw std::invalid_argument("tamper event: ramp longer than event");
    }

    /// Linear onset ramp, holding at 1 after rate_frames.
    double progress(std::size_t frame) const {
        if (frame < start_frame || frame >= end_frame) return 0.0;
        if (rate_frames == 0) return 1.0;
        std::size_t into = frame - start_frame;
        if (into >= rate_frames) return 1.0;
        return static_cast<double>(into + 1) / static_cast<double>(rate_frames);
    }
};

struct TamperSchedule {
    std::vector<TamperEvent> events;  // sorted, pairwise disjoint
    std::size_t total_frames = 0;
    std::uint64_t seed = 0;

    const TamperEvent* event_at(std::size_t frame) const {
        for (const TamperEvent& e : events)
            if (frame >= e.start_frame && frame < e.end_frame) return &e;
        return nullptr;
    }
};

struct Annotation {
    std::size_t frame_index = 0;
    std::string label = "normal";  // normal | covered | defocussed | moved
};

/// One event per period; kinds cycle covered, defocussed, moved; durations
/// drawn uniformly in [dur_min_s, dur_max_s] from the seeded generator.
inline TamperSchedule make_schedule(std::size_t total_frames, double fps, double period_s = 600,
                                    double dur_min_s = 300, double dur_max_s = 600,
                                    std::uint64_t seed = 0, double extent = 1.0,
                                    double rate_s = 0.0) {
    if (total_frames == 0 || static_cast<double>(total_frames) <= period_s * fps)
        throw std::invalid_argument("make_schedule: total_frames must exceed one period");
    if (dur_max_s > period_s) throw std::invalid_argument("make_schedule: duration exceeds period");
    if (dur_min_s > dur_max_s) throw std::invalid_argument("make_schedule: dur_min > dur_max");

    TamperSchedule sched;
    sched.total_frames = total_frames;
    sched.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dur(dur_min_s, dur_max_s);
    std::size_t period_frames = static_cast<std::size_t>(period_s * fps);
    int kind_idx = 0;
    for (std::size_t start = 0; start < total_frames; start += period_frames) {
        std::size_t dur_frames = static_cast<std::size_t>(dur(rng) * fps);
        std::size_t end = std::min(start + dur_frames, total_frames);
        if (end <= start) break;
        TamperEvent e;
        e.kind = static_cast<TamperKind>(kind_idx % 3);
        e.start_frame = start;
        e.end_frame = end;
        e.extent = extent;
        e.rate_frames = std::min(static_cast<std::size_t>(rate_s * fps), end - start);
        e.validate();
        sched.events.push_back(e);
        ++kind_idx;
    }
    return sched;
}

/// Center rectangle of area extent*progress*(w*h) replaced with seeded
/// uniform noise.
inline Frame apply_covered(const Frame& src, double extent, double progress, std::uint64_t seed) {
    if (extent <= 0.0 || extent > 1.0) throw std::invalid_argument("apply_covered: bad extent");
    if (progress <= 0.0) return src;
    double frac = std::min(extent * progress, 1.0);
    double aspect = static_cast<double>(src.width) / src.height;
    int rh = std::clamp(static_cast<int>(std::lround(std::sqrt(frac * src.width * src.height / aspect))),
                        1, src.height);
    int rw = std::clamp(static_cast<int>(std::lround(frac * src.width * src.height / rh)), 1,
                        src.width);
    int x0 = (src.width - rw) / 2;
    int y0 = (src.height - rh) / 2;
    Frame out = src;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> noise(0, 255);
    for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x)
            out.at(x, y) = static_cast<std::uint8_t>(noise(rng));
    return out;
}

/// Flat-color cover variant; the random-texture fill is the default.
inline Frame apply_covered_flat(const Frame& src, double extent, double progress,
                                std::uint8_t color = 0) {
    if (extent <= 0.0 || extent > 1.0) throw std::invalid_argument("apply_covered_flat: bad extent");
    if (progress <= 0.0) return src;
    double frac = std::min(extent * progress, 1.0);
    double aspect = static_cast<double>(src.width) / src.height;
    int rh = std::clamp(static_cast<int>(std::lround(std::sqrt(frac * src.width * src.height / aspect))),
                        1, src.height);
    int rw = std::clamp(static_cast<int>(std::lround(frac * src.width * src.height / rh)), 1,
                        src.width);
    int x0 = (src.width - rw) / 2;
    int y0 = (src.height - rh) / 2;
    Frame out = src;
    for (int y = y0; y < y0 + rh; ++y)
        for (int x = x0; x < x0 + rw; ++x) out.at(x, y) = color;
    return out;
}

constexpr double kDefocusSigmaMax = 8.0;

inline Frame apply_defocussed(const Frame& src, double extent, double progress) {
    if (extent <= 0.0 || extent > 1.0) throw std::invalid_argument("apply_defocussed: bad extent");
    double sigma = kDefocusSigmaMax * extent * progress;
    if (sigma <= 0.0) return src;
    return gaussian_blur(src, sigma);
}

/// Translation by round(extent*progress*(w/2, h/2)), exposed border filled
/// by clamp replication.
inline Frame apply_moved(const Frame& src, double extent, double progress) {
    if (extent <= 0.0 || extent > 1.0) throw std::invalid_argument("apply_moved: bad extent");
    int dx = static_cast<int>(std::lround(extent * progress * src.width / 2.0));
    int dy = static_cast<int>(std::lround(extent * progress * src.height / 2.0));
    if (dx == 0 && dy == 0) return src;
    Frame out(src.width, src.height);
    for (int y = 0; y < src.height; ++y)
        for (int x = 0; x < src.width; ++x) out.at(x, y) = src.at_clamped(x - dx, y - dy);
    return out;
}

inline Frame apply_tamper(const Frame& src, const TamperEvent& e, std::size_t frame,
                          std::uint64_t noise_seed, bool covered_flat = false) {
    double prog = e.progress(frame);
    if (prog <= 0.0) return src;
    switch (e.kind) {
        case TamperKind::covered:
            return covered_flat ? apply_covered_flat(src, e.extent, prog)
                                : apply_covered(src, e.extent, prog, noise_seed ^ frame);
        case TamperKind::defocussed: return apply_defocussed(src, e.extent, prog);
        case TamperKind::moved: return apply_moved(src, e.extent, prog);
    }
    return src;
}

inline Annotation annotate(const TamperSchedule& sched, std::size_t frame) {
    Annotation a;
    a.frame_index = frame;
    const TamperEvent* e = sched.event_at(frame);
    a.label = e ? tamper_kind_name(e->kind) : "normal";
    return a;
}

// ---------------------------------------------------------------------------
// Toy scene generator

struct ToySceneConfig {
    std::size_t total_frames = 3600;
    int width = 64;
    int height = 64;
    std::uint64_t seed = 0;
    double illumination_amplitude = 0.10;   // +-10% gain drift
    double illumination_period = 900.0;     // frames per drift cycle
    int sprite_size = 8;                    // bright square side, pixels
    double orbit_period = 120.0;            // frames per sprite revolution
};

/// Deterministic synthetic surveillance scene: smoothed-noise background,
/// a bright square orbiting an ellipse, and a slow sinusoidal gain drift.
class ToyScene {
public:
    explicit ToyScene(const ToySceneConfig& cfg) : cfg_(cfg) {
        if (cfg.width < 64 || cfg.height < 64)
            throw std::invalid_argument("toy scene: dimensions must be at least 64x64");
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<int> noise(0, 255);
        Frame raw(cfg.width, cfg.height);
        for (auto& v : raw.data) v = static_cast<std::uint8_t>(noise(rng));
        background_ = gaussian_blur(raw, 2.0);
    }

    std::size_t size() const { return cfg_.total_frames; }
    const Frame& background() const { return background_; }

    Frame frame(std::size_t t) const {
        double gain =
            1.0 + cfg_.illumination_amplitude *
                      std::sin(2.0 * 3.14159265358979323846 * t / cfg_.illumination_period);
        Frame f(cfg_.width, cfg_.height);
        for (std::size_t i = 0; i < f.data.size(); ++i)
            f.data[i] = static_cast<std::uint8_t>(
                std::clamp(std::lround(background_.data[i] * gain), 0L, 255L));
        // sprite on a fixed ellipse
        double phase = 2.0 * 3.14159265358979323846 * t / cfg_.orbit_period;
        int cx = cfg_.width / 2 + static_cast<int>(std::lround(cfg_.width * 0.3 * std::cos(phase)));
        int cy = cfg_.height / 2 + static_cast<int>(std::lround(cfg_.height * 0.2 * std::sin(phase)));
        int half = cfg_.sprite_size / 2;
        for (int y = cy - half; y < cy + half; ++y)
            for (int x = cx - half; x < cx + half; ++x)
                if (x >= 0 && x < cfg_.width && y >= 0 && y < cfg_.height) f.at(x, y) = 255;
        return f;
    }

private:
    ToySceneConfig cfg_;
    Frame background_;
};

} // namespace tamperlab

#endif

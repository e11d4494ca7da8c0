#ifndef TAMPERLAB_CONFIG_HPP
#define TAMPERLAB_CONFIG_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tamperlab/features.hpp"
#include "tamperlab/synth.hpp"

namespace tamperlab {

/// Every tunable of the pipeline, loaded from a [section] key=value file.
/// Unknown keys are rejected; every field is range-checked.
struct RunConfig {
    // [run]
    std::uint64_t seed = 1;
    double fps = 3.0;

    // [pipeline] working resolution; 0 = keep native frame size
    int resize_width = 320;
    int resize_height = 240;

    // [features]
    FeatureConfig features;

    // [toy]
    ToySceneConfig toy;

    // [synth]
    double synth_period_s = 600.0;
    double synth_dur_min_s = 300.0;
    double synth_dur_max_s = 600.0;
    double synth_extent = 1.0;
    double synth_rate_s = 0.0;
    bool synth_covered_flat = false;

    // [tsa]
    int tsa_p_max = 6;
    int tsa_q_max = 6;
    int tsa_d = 1;
    int tsa_forecast_window = 1000;
    double tsa_segment_seconds = 3600.0;

    // [eval]
    int eval_score_warmup = 300;

    void validate() const {
        if (fps <= 0) throw std::invalid_argument("run.fps must be > 0");
        if (resize_width < 0 || resize_height < 0 ||
            (resize_width == 0) != (resize_height == 0))
            throw std::invalid_argument("pipeline.resize dimensions must both be positive or both 0");
        features.validate();
        if (synth_extent <= 0 || synth_extent > 1)
            throw std::invalid_argument("synth.extent must be in (0,1]");
        if (synth_rate_s < 0) throw std::invalid_argument("synth.rate_s must be >= 0");
        if (synth_dur_min_s <= 0 || synth_dur_min_s > synth_dur_max_s)
            throw std::invalid_argument("synth durations must satisfy 0 < min <= max");
        if (tsa_p_max < 0 || tsa_q_max < 0 || tsa_d < 0)
            throw std::invalid_argument("tsa grid caps must be >= 0");
        if (tsa_forecast_window < 1)
            throw std::invalid_argument("tsa.forecast_window must be >= 1");
        if (tsa_segment_seconds <= 0)
            throw std::invalid_argument("tsa.segment_seconds must be > 0");
        if (eval_score_warmup < 1) throw std::invalid_argument("eval.score_warmup must be >= 1");
    }

    /// Per-module seed expansion from the root seed.
    std::uint64_t module_seed(std::uint64_t salt) const {
        std::uint64_t x = seed ^ (salt * 0x9e3779b97f4a7c15ull);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ull;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebull;
        x ^= x >> 31;
        return x;
    }
    std::uint64_t toy_seed() const { return module_seed(1); }
    std::uint64_t synth_seed() const { return module_seed(2); }
    std::uint64_t cover_noise_seed() const { return module_seed(3); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: " + key + " expects a boolean");
}

} // namespace detail

/// Applies one "section.key=value" assignment; throws on unknown keys.
inline void config_set(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
    const std::string& k = dotted_key;
    const std::string& v = value;
    auto as_int = [&] { return std::stoi(v); };
    auto as_u64 = [&] { return static_cast<std::uint64_t>(std::stoull(v)); };
    auto as_double = [&] { return std::stod(v); };
    auto as_size = [&] { return static_cast<std::size_t>(std::stoull(v)); };

    try {
        if (k == "run.seed") cfg.seed = as_u64();
        else if (k == "run.fps") cfg.fps = as_double();
        else if (k == "pipeline.resize_width") cfg.resize_width = as_int();
        else if (k == "pipeline.resize_height") cfg.resize_height = as_int();
        else if (k == "features.alpha") cfg.features.alpha = as_double();
        else if (k == "features.n_delay") cfg.features.n_delay = as_int();
        else if (k == "features.hist_neighborhood") cfg.features.hist_neighborhood = as_int();
        else if (k == "features.strong_edge_threshold")
            cfg.features.strong_edge_threshold = as_double();
        else if (k == "features.harris_k") cfg.features.harris_k = as_double();
        else if (k == "features.harris_sigma") cfg.features.harris_sigma = as_double();
        else if (k == "features.harris_threshold") cfg.features.harris_threshold = as_double();
        else if (k == "features.keypoint_refresh") cfg.features.keypoint_refresh = as_int();
        else if (k == "features.e4_and_only") cfg.features.e4_and_only = detail::parse_bool(v, k);
        else if (k == "toy.frames") cfg.toy.total_frames = as_size();
        else if (k == "toy.width") cfg.toy.width = as_int();
        else if (k == "toy.height") cfg.toy.height = as_int();
        else if (k == "toy.illumination_amplitude") cfg.toy.illumination_amplitude = as_double();
        else if (k == "toy.illumination_period") cfg.toy.illumination_period = as_double();
        else if (k == "toy.sprite_size") cfg.toy.sprite_size = as_int();
        else if (k == "toy.orbit_period") cfg.toy.orbit_period = as_double();
        else if (k == "synth.period_s") cfg.synth_period_s = as_double();
        else if (k == "synth.dur_min_s") cfg.synth_dur_min_s = as_double();
        else if (k == "synth.dur_max_s") cfg.synth_dur_max_s = as_double();
        else if (k == "synth.extent") cfg.synth_extent = as_double();
        else if (k == "synth.rate_s") cfg.synth_rate_s = as_double();
        else if (k == "synth.covered_flat") cfg.synth_covered_flat = detail::parse_bool(v, k);
        else if (k == "tsa.p_max") cfg.tsa_p_max = as_int();
        else if (k == "tsa.q_max") cfg.tsa_q_max = as_int();
        else if (k == "tsa.d") cfg.tsa_d = as_int();
        else if (k == "tsa.forecast_window") cfg.tsa_forecast_window = as_int();
        else if (k == "tsa.segment_seconds") cfg.tsa_segment_seconds = as_double();
        else if (k == "eval.score_warmup") cfg.eval_score_warmup = as_int();
        else throw std::invalid_argument("config: unknown key '" + k + "'");
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad value for '" + k + "': " + v);
    }
}

inline RunConfig load_config(std::istream& in) {
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = detail::trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value");
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        config_set(cfg, section.empty() ? key : section + "." + key, value);
    }
    cfg.validate();
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return load_config(in);
}

} // namespace tamperlab

#endif

#ifndef TAMPERLAB_PIPELINE_HPP
#define TAMPERLAB_PIPELINE_HPP

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tamperlab/arima.hpp"
#include "tamperlab/config.hpp"
#include "tamperlab/eval.hpp"
#include "tamperlab/features.hpp"
#include "tamperlab/image.hpp"
#include "tamperlab/series.hpp"
#include "tamperlab/stationarity.hpp"
#include "tamperlab/synth.hpp"

namespace tamperlab::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

inline std::string frame_name(std::size_t i) {
    std::ostringstream ss;
    ss << "frame_" << std::setw(6) << std::setfill('0') << i << ".pgm";
    return ss.str();
}

// ---------------------------------------------------------------------------
// toy

struct ToyOutputs {
    std::string frames_dir;
    std::string manifest;
};

inline ToyOutputs run_toy(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    ToySceneConfig tc = cfg.toy;
    tc.seed = cfg.toy_seed();
    ToyScene scene(tc);
    fs::path frames = fs::path(out_dir) / "frames";
    fs::create_directories(frames);
    std::ofstream manifest(fs::path(out_dir) / "manifest.txt");
    if (!manifest) throw std::runtime_error("cannot write manifest in " + out_dir);
    manifest << "# toy scene, seed=" << tc.seed << " root_seed=" << cfg.seed << "\n";
    for (std::size_t t = 0; t < scene.size(); ++t) {
        std::string name = frame_name(t);
        save_pgm(scene.frame(t), (frames / name).string());
        manifest << "frames/" << name << "\n";
    }
    return {frames.string(), (fs::path(out_dir) / "manifest.txt").string()};
}

// ---------------------------------------------------------------------------
// synth

struct SynthOutputs {
    std::string tampered_manifest;
    std::string normal_manifest;
    std::string schedule_json;
    std::string annotations_csv;
};

inline json schedule_to_json(const TamperSchedule& sched, std::uint64_t root_seed) {
    json j;
    j["total_frames"] = sched.total_frames;
    j["seed"] = sched.seed;
    j["root_seed"] = root_seed;
    j["events"] = json::array();
    for (const TamperEvent& e : sched.events) {
        j["events"].push_back({{"kind", tamper_kind_name(e.kind)},
                               {"start_frame", e.start_frame},
                               {"end_frame", e.end_frame},
                               {"extent", e.extent},
                               {"rate_frames", e.rate_frames}});
    }
    return j;
}

inline TamperSchedule schedule_from_json(const json& j) {
    TamperSchedule sched;
    sched.total_frames = j.at("total_frames").get<std::size_t>();
    sched.seed = j.at("seed").get<std::uint64_t>();
    for (const json& ej : j.at("events")) {
        TamperEvent e;
        e.kind = tamper_kind_from_name(ej.at("kind").get<std::string>());
        e.start_frame = ej.at("start_frame").get<std::size_t>();
        e.end_frame = ej.at("end_frame").get<std::size_t>();
        e.extent = ej.at("extent").get<double>();
        e.rate_frames = ej.at("rate_frames").get<std::size_t>();
        e.validate();
        sched.events.push_back(e);
    }
    return sched;
}

inline SynthOutputs run_synth(const RunConfig& cfg, const std::string& source,
                              const std::string& out_dir, bool empty_schedule = false) {
    cfg.validate();
    FrameSequence seq = FrameSequence::open(source);

    TamperSchedule sched;
    sched.total_frames = seq.size();
    sched.seed = cfg.synth_seed();
    if (!empty_schedule) {
        sched = make_schedule(seq.size(), cfg.fps, cfg.synth_period_s, cfg.synth_dur_min_s,
                              cfg.synth_dur_max_s, cfg.synth_seed(), cfg.synth_extent,
                              cfg.synth_rate_s);
    }

    fs::path out(out_dir);
    fs::path tampered_dir = out / "tampered";
    fs::create_directories(tampered_dir);

    std::ofstream tampered_manifest(out / "tampered_manifest.txt");
    std::ofstream normal_manifest(out / "normal_manifest.txt");
    std::ofstream annotations(out / "annotations.csv");
    if (!tampered_manifest || !normal_manifest || !annotations)
        throw std::runtime_error("cannot write outputs in " + out_dir);
    annotations << "frame_index,label\n";

    std::uint64_t noise_seed = cfg.cover_noise_seed();
    for (std::size_t t = 0; t < seq.size(); ++t) {
        Frame f = seq.frame(t);
        normal_manifest << seq.paths()[t] << "\n";
        const TamperEvent* ev = sched.event_at(t);
        Annotation a = annotate(sched, t);
        annotations << t << "," << a.label << "\n";
        std::string name = frame_name(t);
        if (ev) {
            Frame g = apply_tamper(f, *ev, t, noise_seed, cfg.synth_covered_flat);
            save_pgm(g, (tampered_dir / name).string());
            tampered_manifest << "tampered/" << name << "\n";
        } else {
            // frames outside events pass through untouched
            save_pgm(f, (tampered_dir / name).string());
            tampered_manifest << "tampered/" << name << "\n";
        }
    }

    std::ofstream sched_out(out / "schedule.json");
    sched_out << schedule_to_json(sched, cfg.seed).dump(2) << "\n";

    return {(out / "tampered_manifest.txt").string(), (out / "normal_manifest.txt").string(),
            (out / "schedule.json").string(), (out / "annotations.csv").string()};
}

// ---------------------------------------------------------------------------
// extract

inline Frame to_working_resolution(const RunConfig& cfg, const Frame& f) {
    if (cfg.resize_width == 0) return f;
    return resize(f, cfg.resize_width, cfg.resize_height);
}

inline std::vector<ResidualSample> extract_residuals(const RunConfig& cfg,
                                                     const FrameSequence& seq) {
    if (seq.size() < 2) throw std::runtime_error("extract: need at least 2 frames");
    FeatureState state(to_working_resolution(cfg, seq.frame(0)), cfg.features);
    std::vector<ResidualSample> samples;
    samples.reserve(seq.size() - 1);
    for (std::size_t t = 1; t < seq.size(); ++t)
        samples.push_back(state.process_frame(to_working_resolution(cfg, seq.frame(t))));
    return samples;
}

inline std::string run_extract(const RunConfig& cfg, const std::string& source,
                               const std::string& out_csv) {
    cfg.validate();
    FrameSequence seq = FrameSequence::open(source);
    write_residual_csv(extract_residuals(cfg, seq), out_csv);
    return out_csv;
}

// ---------------------------------------------------------------------------
// common series plumbing

/// Valid residual values of one feature, in frame order.
inline Series feature_series(const std::vector<ResidualSample>& samples, std::size_t feature_idx) {
    Series s;
    s.origin_feature = feature_ids()[feature_idx];
    for (const ResidualSample& r : samples)
        if (r.valid[feature_idx]) s.values.push_back(r.values[feature_idx]);
    return s;
}

// ---------------------------------------------------------------------------
// stationarity

inline std::string run_stationarity(const RunConfig& cfg, const std::string& residuals_csv,
                                    const std::string& out_json) {
    cfg.validate();
    auto samples = read_residual_csv(residuals_csv);
    json rows = json::array();
    for (std::size_t i = 0; i < feature_ids().size(); ++i) {
        Series raw = feature_series(samples, i);
        json row;
        row["feature"] = feature_ids()[i];
        auto report_of = [](const Series& s) -> json {
            try {
                StationarityReport r = stationarity_report(s);
                return {{"adf_stat", r.adf_stat},
                        {"adf_reject_unit_root", r.adf_reject_unit_root},
                        {"kpss_stat", r.kpss_stat},
                        {"kpss_accept_stationary", r.kpss_accept_stationary}};
            } catch (const std::exception& e) {
                return {{"error", e.what()}};
            }
        };
        row["raw"] = report_of(raw);
        try {
            row["transformed"] = report_of(log_lag_transform(raw));
        } catch (const std::exception& e) {
            row["transformed"] = {{"error", e.what()}};
        }
        rows.push_back(row);
    }
    json doc;
    doc["root_seed"] = cfg.seed;
    doc["critical_values"] = {{"adf_5pct", kAdfCritical5}, {"kpss_5pct", kKpssCritical5}};
    doc["features"] = rows;
    std::ofstream out(out_json);
    if (!out) throw std::runtime_error("cannot write " + out_json);
    out << doc.dump(2) << "\n";
    return out_json;
}

// ---------------------------------------------------------------------------
// fit

struct FitOutputs {
    std::string fits_json;
    std::string predictions_csv;
};

inline json fit_to_json(const ArimaFit& f) {
    json j;
    j["order"] = {{"p", f.order.p}, {"d", f.order.d}, {"q", f.order.q}};
    j["phi"] = f.phi;
    j["theta"] = f.theta;
    j["intercept"] = f.intercept;
    j["sigma2"] = f.sigma2;
    j["loglik"] = f.loglik;
    j["aic"] = f.aic;
    j["converged"] = f.converged;
    return j;
}

inline ArimaFit fit_from_json(const json& j) {
    ArimaFit f;
    f.order.p = j.at("order").at("p").get<int>();
    f.order.d = j.at("order").at("d").get<int>();
    f.order.q = j.at("order").at("q").get<int>();
    f.phi = j.at("phi").get<std::vector<double>>();
    f.theta = j.at("theta").get<std::vector<double>>();
    f.intercept = j.at("intercept").get<double>();
    f.sigma2 = j.at("sigma2").get<double>();
    f.loglik = j.at("loglik").get<double>();
    f.aic = j.at("aic").get<double>();
    f.converged = j.at("converged").get<bool>();
    return f;
}

/// Hourly per-feature ARIMA protocol: offset-log the segment, AIC order
/// selection at fixed d, then one-step in-sample prediction over the
/// trailing window. Predictability sRMSE is computed on the fit domain
/// (the differenced log series).
inline FitOutputs run_fit(const RunConfig& cfg, const std::string& residuals_csv,
                          const std::string& fits_json, const std::string& predictions_csv) {
    cfg.validate();
    auto samples = read_residual_csv(residuals_csv);
    if (samples.empty()) throw std::runtime_error("fit: empty residual CSV");
    std::size_t segment_frames =
        static_cast<std::size_t>(cfg.tsa_segment_seconds * cfg.fps);
    if (segment_frames < 2) throw std::runtime_error("fit: segment too short");
    std::size_t last_index = samples.back().frame_index;
    std::size_t n_segments = last_index / segment_frames + 1;

    std::ofstream pred_out(predictions_csv);
    if (!pred_out) throw std::runtime_error("cannot write " + predictions_csv);
    pred_out << "feature,segment,offset,actual,predicted\n";
    pred_out.precision(17);

    json fits = json::array();
    for (std::size_t fi = 0; fi < feature_ids().size(); ++fi) {
        for (std::size_t seg = 0; seg < n_segments; ++seg) {
            std::size_t lo = seg * segment_frames;
            std::size_t hi = lo + segment_frames;
            Series raw;
            raw.origin_feature = feature_ids()[fi];
            for (const ResidualSample& r : samples)
                if (r.frame_index >= lo && r.frame_index < hi && r.valid[fi])
                    raw.values.push_back(r.values[fi]);
            json row;
            row["feature"] = feature_ids()[fi];
            row["segment"] = seg;
            row["samples"] = raw.size();
            if (raw.size() < 50) {
                row["skipped"] = "segment too short";
                fits.push_back(row);
                continue;
            }
            try {
                Series transformed = log_lag_transform(raw);  // already d=1 differenced
                int extra_d = std::max(cfg.tsa_d - 1, 0);
                Series work = difference(transformed, extra_d);
                OrderSelection sel = select_order(work, cfg.tsa_p_max, cfg.tsa_q_max, 0);
                ArimaFit fit = sel.fit;
                fit.order.d = cfg.tsa_d;
                std::size_t window =
                    std::min<std::size_t>(cfg.tsa_forecast_window, work.size() - 1);
                std::vector<double> pred = forecast_insample(fit, work, window);
                std::vector<double> actual(work.values.end() - window, work.values.end());
                double s = srmse(actual, pred);
                row["fit"] = fit_to_json(fit);
                row["log_offset"] = transformed.transform_log_offset;
                row["predictability_srmse"] =
                    std::isnan(s) ? json() : json(s);
                for (std::size_t i = 0; i < window; ++i)
                    pred_out << feature_ids()[fi] << ',' << seg << ',' << i << ',' << actual[i]
                             << ',' << pred[i] << '\n';
            } catch (const std::exception& e) {
                row["error"] = e.what();
            }
            fits.push_back(row);
        }
    }
    json doc;
    doc["root_seed"] = cfg.seed;
    doc["grid"] = {{"p_max", cfg.tsa_p_max}, {"q_max", cfg.tsa_q_max}, {"d", cfg.tsa_d}};
    doc["segment_frames"] = segment_frames;
    doc["fits"] = fits;
    std::ofstream out(fits_json);
    if (!out) throw std::runtime_error("cannot write " + fits_json);
    out << doc.dump(2) << "\n";
    return {fits_json, predictions_csv};
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateInputs {
    std::string tampered_residuals_csv;
    std::string annotations_csv;
    std::string normal_residuals_csv;  // optional, enables deviation sRMSE
    std::string fits_json;             // optional, enables predictability + t-tests
};

inline std::map<std::size_t, std::string> read_annotations(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "frame_index,label")
        throw std::runtime_error(path + ": bad annotations header");
    std::map<std::size_t, std::string> ann;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        ann[std::stoull(line.substr(0, comma))] = line.substr(comma + 1);
    }
    return ann;
}

inline void write_roc_csv(const RocCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "threshold,fpr,tpr\n";
    out.precision(17);
    for (const RocPoint& p : curve.points)
        out << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
}

inline json confusion_to_json(const ConfusionReport& c) {
    json j;
    j["tn"] = c.tn;
    j["fp"] = c.fp;
    j["fn"] = c.fn;
    j["tp"] = c.tp;
    j["accuracy"] = c.accuracy;
    j["f1"] = c.f1_defined() ? json(c.f1) : json();  // null mirrors the undefined dash
    return j;
}

inline std::string run_evaluate(const RunConfig& cfg, const EvaluateInputs& in,
                                const std::string& report_json, const std::string& roc_dir = "",
                                const std::string& feature_filter = "") {
    cfg.validate();
    auto tampered = read_residual_csv(in.tampered_residuals_csv);
    auto ann = read_annotations(in.annotations_csv);
    std::vector<ResidualSample> normal;
    if (!in.normal_residuals_csv.empty()) normal = read_residual_csv(in.normal_residuals_csv);
    if (!normal.empty() && normal.size() != tampered.size())
        throw std::runtime_error("evaluate: normal/tampered residual row mismatch");

    // hourly predictability sRMSE samples per feature, from the fit artifact
    std::map<std::string, std::vector<double>> hourly_srmse;
    if (!in.fits_json.empty()) {
        std::ifstream fin(in.fits_json);
        if (!fin) throw std::runtime_error("cannot open " + in.fits_json);
        json fdoc = json::parse(fin);
        for (const json& row : fdoc.at("fits")) {
            if (!row.contains("predictability_srmse") || row["predictability_srmse"].is_null())
                continue;
            hourly_srmse[row.at("feature").get<std::string>()].push_back(
                row["predictability_srmse"].get<double>());
        }
    }

    const std::vector<std::string> classes = {"covered", "defocussed", "moved", "unified"};
    json features_json;
    if (!roc_dir.empty()) fs::create_directories(roc_dir);

    for (std::size_t fi = 0; fi < feature_ids().size(); ++fi) {
        const std::string& fid = feature_ids()[fi];
        if (!feature_filter.empty() && fid != feature_filter) continue;

        // valid samples with labels
        std::vector<double> values;
        std::vector<std::string> labels;
        std::vector<double> normal_values;
        for (std::size_t k = 0; k < tampered.size(); ++k) {
            const ResidualSample& r = tampered[k];
            if (!r.valid[fi]) continue;
            auto it = ann.find(r.frame_index);
            if (it == ann.end()) throw std::runtime_error("evaluate: missing annotation for frame " +
                                                          std::to_string(r.frame_index));
            values.push_back(r.values[fi]);
            labels.push_back(it->second);
            if (!normal.empty()) {
                if (normal[k].frame_index != r.frame_index)
                    throw std::runtime_error("evaluate: misaligned frame indices");
                normal_values.push_back(normal[k].values[fi]);
            }
        }
        if (values.empty()) continue;
        std::vector<double> scores =
            robust_abs_zscores(values, static_cast<std::size_t>(cfg.eval_score_warmup));

        json feat;
        if (auto it = hourly_srmse.find(fid); it != hourly_srmse.end() && !it->second.empty()) {
            feat["hourly_srmse"] = it->second;
            feat["predictability_srmse"] = series_mean(it->second);
        } else {
            feat["predictability_srmse"] = json();
        }

        for (const std::string& cls : classes) {
            json cj;
            std::vector<double> cls_scores;
            std::vector<bool> cls_labels;
            std::vector<double> dev_normal, dev_tampered;
            for (std::size_t k = 0; k < values.size(); ++k) {
                bool positive = cls == "unified" ? labels[k] != "normal" : labels[k] == cls;
                bool negative = labels[k] == "normal";
                if (positive || negative) {
                    cls_scores.push_back(scores[k]);
                    cls_labels.push_back(positive);
                }
                if (positive && !normal_values.empty()) {
                    dev_normal.push_back(normal_values[k]);
                    dev_tampered.push_back(values[k]);
                }
            }
            try {
                RocCurve curve = roc(cls_scores, cls_labels);
                double thr = optimal_threshold(curve);
                ConfusionReport conf = confusion(cls_scores, cls_labels, thr);
                cj["auc"] = curve.auc;
                cj["optimal_threshold"] = thr;
                cj["confusion"] = confusion_to_json(conf);
                if (!roc_dir.empty())
                    write_roc_csv(curve,
                                  (fs::path(roc_dir) / ("roc_" + fid + "_" + cls + ".csv")).string());
            } catch (const std::exception& e) {
                cj["error"] = e.what();
            }
            if (!dev_normal.empty()) {
                double d = deviation_srmse(dev_normal, dev_tampered);
                cj["deviation_srmse"] = std::isnan(d) ? json() : json(d);
            }
            feat["classes"][cls] = cj;
        }
        features_json[fid] = feat;
    }

    // 10x10 Welch matrix over hourly predictability sRMSE samples
    json ttest = json();
    if (!hourly_srmse.empty()) {
        ttest = json::array();
        for (const std::string& a : feature_ids()) {
            json row = json::array();
            for (const std::string& b : feature_ids()) {
                auto ia = hourly_srmse.find(a);
                auto ib = hourly_srmse.find(b);
                if (a == b || ia == hourly_srmse.end() || ib == hourly_srmse.end() ||
                    ia->second.size() < 2 || ib->second.size() < 2) {
                    row.push_back(json());
                    continue;
                }
                try {
                    row.push_back(welch_ttest(ia->second, ib->second));
                } catch (const std::exception&) {
                    row.push_back(json());
                }
            }
            ttest.push_back(row);
        }
    }

    json doc;
    doc["root_seed"] = cfg.seed;
    doc["score_metadata"] = {{"standardization", "abs-z (median/MAD of warm-up window)"},
                             {"warmup_samples", cfg.eval_score_warmup}};
    doc["features"] = features_json;
    doc["ttest_pvalues"] = ttest;
    doc["ttest_feature_order"] = feature_ids();
    std::ofstream out(report_json);
    if (!out) throw std::runtime_error("cannot write " + report_json);
    out << doc.dump(2) << "\n";
    return report_json;
}

} // namespace tamperlab::pipeline

#endif

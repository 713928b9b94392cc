#ifndef CWRU_REPORT_HPP
#define CWRU_REPORT_HPP

// Result serialization: a JSON report with provenance fields, CSV tables in
// the layout of the result tables, and SVG ROC plots with std bands.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwru/eval.hpp"
#include "cwru/prng.hpp"
#include "cwru/protocol.hpp"

namespace cwru::report {

struct Provenance {
    std::string manifest_hash;    // sha256 of the manifest file, empty if unknown
    std::string experiment_hash;  // hash of the experiment configuration
    std::string prng = std::string(SplitMix64::algorithm_id);
};

inline nlohmann::json mean_std_json(const eval::MeanStd& ms) {
    nlohmann::json j;
    j["mean"] = ms.mean;
    j["std"] = ms.std;
    j["n"] = ms.n;
    return j;
}

inline nlohmann::json averaged_roc_json(const eval::AveragedRoc& roc) {
    nlohmann::json j;
    j["tpr_grid"] = roc.tpr_grid;
    j["mean_fpr"] = roc.mean_fpr;
    j["std_fpr"] = roc.std_fpr;
    return j;
}

inline std::string detector_name(std::size_t d) {
    const auto& col = catalog::fault_columns()[d];
    return catalog::to_string(col.location) + "-" + catalog::to_string(col.fault_type);
}

inline nlohmann::json report_json(const eval::RunReport& report, const protocol::Experiment& exp,
                                  const nn::HyperParams& hypers, const Provenance& prov) {
    nlohmann::json j;
    j["experiment"] = protocol::to_json(exp);
    j["hyperparameters"]["batch_size"] = hypers.batch_size;
    j["hyperparameters"]["learning_rate"] = hypers.learning_rate;
    j["hyperparameters"]["epochs"] = hypers.max_epochs;
    j["provenance"]["manifest_sha256"] = prov.manifest_hash;
    j["provenance"]["experiment_hash"] = prov.experiment_hash;
    j["provenance"]["prng"] = prov.prng;
    // Fixed conventions that affect numeric results, recorded so reports are
    // self-describing.
    j["provenance"]["conventions"] = {
        {"stft_window", "hann-periodic-104"},
        {"spectrogram_scale", "linear-magnitude"},
        {"normalization", "pooled-scalar-zscore-population-std"},
        {"resampler", "kaiser-windowed-sinc-301"},
    };
    j["n_realizations"] = report.n_realizations;
    j["single_realization"] = report.single_realization;
    j["seeds"] = report.seeds;

    for (std::size_t d = 0; d < eval::kNumDetectors; ++d)
        j["diagnosis"]["cells"][detector_name(d)] = mean_std_json(report.cells[d]);
    const std::array<std::string, 3> types{"inner", "outer", "ball"};
    for (std::size_t t = 0; t < 3; ++t)
        j["diagnosis"]["fe_de_average"][types[t]] = mean_std_json(report.fe_de_average[t]);
    j["diagnosis"]["macro"] = mean_std_json(report.macro);

    j["detection"]["fe"] = mean_std_json(report.detection_cells[0]);
    j["detection"]["de"] = mean_std_json(report.detection_cells[1]);
    j["detection"]["macro"] = mean_std_json(report.detection_macro);

    for (std::size_t d = 0; d < eval::kNumDetectors; ++d)
        j["roc"][detector_name(d)] = averaged_roc_json(report.averaged_curves[d]);
    j["roc"]["detection-fe"] = averaged_roc_json(report.detection_curves[0]);
    j["roc"]["detection-de"] = averaged_roc_json(report.detection_curves[1]);

    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : report.logit_boxes) {
        nlohmann::json e;
        e["detector"] = catalog::to_string(b.detector.location) + "-" +
                        catalog::to_string(b.detector.fault_type);
        e["condition"] = catalog::condition_id(b.condition);
        e["min"] = b.stats.min;
        e["q1"] = b.stats.q1;
        e["median"] = b.stats.median;
        e["q3"] = b.stats.q3;
        e["max"] = b.stats.max;
        e["count"] = b.stats.count;
        boxes.push_back(std::move(e));
    }
    j["logit_boxplots"] = std::move(boxes);
    return j;
}

// ---------------------------------------------------------------------------
// CSV.

namespace detail {

inline std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

inline std::string cell(const eval::MeanStd& ms, bool single) {
    if (ms.n == 0) return "n/a";
    if (single) return fmt(ms.mean);
    return fmt(ms.mean) + " +/- " + fmt(ms.std);
}

}  // namespace detail

// One row per fault type, columns FE / DE / average, plus the macro row:
// the layout of the per-detector result table.
inline std::string diagnosis_csv(const eval::RunReport& r) {
    std::ostringstream os;
    os << "fault_type,fe,de,average\n";
    const std::array<std::string, 3> types{"inner", "outer", "ball"};
    const auto& cols = catalog::fault_columns();
    for (std::size_t t = 0; t < 3; ++t) {
        os << types[t];
        for (auto loc : {catalog::Location::FanEnd, catalog::Location::DriveEnd}) {
            for (std::size_t d = 0; d < eval::kNumDetectors; ++d)
                if (cols[d].location == loc && eval::label_bit(cols[d].fault_type) == t)
                    os << "," << detail::cell(r.cells[d], r.single_realization);
        }
        os << "," << detail::fmt(r.fe_de_average[t].mean) << "\n";
    }
    os << "macro,,," << detail::cell(r.macro, r.single_realization) << "\n";
    return os.str();
}

inline std::string detection_csv(const eval::RunReport& r) {
    std::ostringstream os;
    os << "location,auroc\n";
    os << "fe," << detail::cell(r.detection_cells[0], r.single_realization) << "\n";
    os << "de," << detail::cell(r.detection_cells[1], r.single_realization) << "\n";
    os << "macro," << detail::cell(r.detection_macro, r.single_realization) << "\n";
    return os.str();
}

inline std::string boxplot_csv(const eval::RunReport& r) {
    std::ostringstream os;
    os << "detector,condition,min,q1,median,q3,max,count\n";
    for (const auto& b : r.logit_boxes) {
        os << catalog::to_string(b.detector.location) << "-"
           << catalog::to_string(b.detector.fault_type) << ","
           << catalog::condition_id(b.condition) << "," << detail::fmt(b.stats.min, 6) << ","
           << detail::fmt(b.stats.q1, 6) << "," << detail::fmt(b.stats.median, 6) << ","
           << detail::fmt(b.stats.q3, 6) << "," << detail::fmt(b.stats.max, 6) << ","
           << b.stats.count << "\n";
    }
    return os.str();
}

// Ablation table: one row per configuration.
inline std::string ablation_csv(const std::vector<protocol::AblationRow>& rows) {
    std::ostringstream os;
    os << "scope,split_type,split_ratio,signal_length,batch_size,learning_rate,epochs,"
          "macro_auroc\n";
    for (const auto& row : rows) {
        const auto& e = row.experiment;
        const auto& r = row.outcome.report;
        os << protocol::to_string(e.scope) << "," << protocol::to_string(e.split_type) << ","
           << protocol::to_string(e.split_ratio) << "," << protocol::to_string(e.signal_length)
           << "," << row.selection.hypers.batch_size << ","
           << detail::fmt(row.selection.hypers.learning_rate, 8) << ","
           << row.selection.hypers.max_epochs << ","
           << detail::cell(r.macro, r.single_realization) << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// SVG ROC plot: mean curve with a +/- 1 std band, axes and a diagonal
// reference. The band is clipped to [0,1] on the FPR axis.

inline std::string roc_svg(const eval::AveragedRoc& roc, const std::string& title) {
    const double w = 480, h = 480, m = 50;  // canvas and margin
    auto px = [&](double fpr) { return m + fpr * (w - 2 * m); };
    auto py = [&](double tpr) { return h - m - tpr * (h - 2 * m); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << title << "</text>\n";

    // Std band as a closed polygon: lower edge forward, upper edge back.
    os << "<polygon fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < roc.tpr_grid.size(); ++i) {
        const double f = std::clamp(roc.mean_fpr[i] - roc.std_fpr[i], 0.0, 1.0);
        os << px(f) << "," << py(roc.tpr_grid[i]) << " ";
    }
    for (std::size_t i = roc.tpr_grid.size(); i-- > 0;) {
        const double f = std::clamp(roc.mean_fpr[i] + roc.std_fpr[i], 0.0, 1.0);
        os << px(f) << "," << py(roc.tpr_grid[i]) << " ";
    }
    os << "\"/>\n";

    os << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < roc.tpr_grid.size(); ++i)
        os << px(roc.mean_fpr[i]) << "," << py(roc.tpr_grid[i]) << " ";
    os << "\"/>\n";

    os << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
       << py(1) << "\" stroke=\"#999\" stroke-dasharray=\"4 4\"/>\n";
    os << "<rect x=\"" << m << "\" y=\"" << m << "\" width=\"" << w - 2 * m << "\" height=\""
       << h - 2 * m << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = i / 4.0;
        os << "<text x=\"" << px(v) << "\" y=\"" << h - m + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << detail::fmt(v, 2) << "</text>\n";
        os << "<text x=\"" << m - 8 << "\" y=\"" << py(v) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << detail::fmt(v, 2) << "</text>\n";
    }
    os << "<text x=\"" << w / 2 << "\" y=\"" << h - 10
       << "\" text-anchor=\"middle\" font-size=\"13\">false positive rate</text>\n";
    os << "<text x=\"16\" y=\"" << h / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " << h / 2
       << ")\">true positive rate</text>\n";
    os << "</svg>\n";
    return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

// Writes report.json, the CSV tables, and one SVG per averaged curve into
// `dir`.
inline void write_report(const std::filesystem::path& dir, const eval::RunReport& report,
                         const protocol::Experiment& exp, const nn::HyperParams& hypers,
                         const Provenance& prov) {
    std::filesystem::create_directories(dir);
    write_text(dir / "report.json", report_json(report, exp, hypers, prov).dump(2) + "\n");
    write_text(dir / "diagnosis.csv", diagnosis_csv(report));
    write_text(dir / "detection.csv", detection_csv(report));
    write_text(dir / "logit_boxplots.csv", boxplot_csv(report));
    for (std::size_t d = 0; d < eval::kNumDetectors; ++d)
        if (!report.averaged_curves[d].tpr_grid.empty())
            write_text(dir / ("roc_" + detector_name(d) + ".svg"),
                       roc_svg(report.averaged_curves[d], "ROC " + detector_name(d)));
    const std::array<std::string, 2> det{"fe", "de"};
    for (std::size_t loc = 0; loc < 2; ++loc)
        if (!report.detection_curves[loc].tpr_grid.empty())
            write_text(dir / ("roc_detection_" + det[loc] + ".svg"),
                       roc_svg(report.detection_curves[loc], "ROC detection " + det[loc]));
}

}  // namespace cwru::report

#endif  // CWRU_REPORT_HPP

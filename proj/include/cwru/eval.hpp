#ifndef CWRU_EVAL_HPP
#define CWRU_EVAL_HPP

// Per-label ROC/AUROC, cross-realization horizontal ROC averaging,
// per-detector result aggregation, the fault-detection ensemble, and logit
// boxplot statistics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwru/catalog.hpp"
#include "cwru/features.hpp"
#include "cwru/nn.hpp"

namespace cwru::eval {

inline constexpr std::size_t kNumDetectors = 6;  // fault_columns order
inline constexpr std::size_t kRocGridSize = 1001;

inline std::size_t label_bit(catalog::FaultType t) {
    switch (t) {
        case catalog::FaultType::Inner: return 0;
        case catalog::FaultType::Outer: return 1;
        case catalog::FaultType::Ball: return 2;
        default: throw std::invalid_argument("label_bit: healthy has no bit");
    }
}

struct ScoredEntry {
    std::string record_id;
    catalog::FaultCondition condition;
    catalog::Accelerometer accelerometer = catalog::Accelerometer::DE;
    std::array<double, 3> logits{0, 0, 0};
    std::array<std::uint8_t, 3> labels{0, 0, 0};
};

using ScoredSet = std::vector<ScoredEntry>;

// Segment-level inference; location is the segment's source accelerometer.
template <typename Real>
ScoredSet score(nn::Model<Real>& model, const dsp::FeatureSet& features,
                std::size_t inference_batch = 256) {
    if (features.input_length() != model.input_size())
        throw std::invalid_argument("score: feature length does not match model input");
    ScoredSet out;
    out.reserve(features.size());
    const std::size_t n = features.size();
    const std::size_t len = features.input_length();
    for (std::size_t start = 0; start < n; start += inference_batch) {
        const std::size_t batch = std::min(inference_batch, n - start);
        std::vector<Real> x(batch * len);
        for (std::size_t i = 0; i < batch; ++i)
            for (std::size_t j = 0; j < len; ++j)
                x[i * len + j] = static_cast<Real>(features.inputs[start + i][j]);
        const auto logits = model.forward(x, batch, /*training=*/false);
        for (std::size_t i = 0; i < batch; ++i) {
            ScoredEntry e;
            e.record_id = features.provenance[start + i].record_id;
            e.condition = features.conditions[start + i];
            e.accelerometer = features.accelerometers[start + i];
            e.labels = features.labels[start + i];
            for (std::size_t k = 0; k < 3; ++k) e.logits[k] = logits[i * 3 + k];
            out.push_back(std::move(e));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// ROC.

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (FPR, TPR), (0,0)..(1,1)
    double auroc = 0.0;
};

// Threshold sweep over unique scores descending; tied scores collapse to a
// single point; AUROC by trapezoid. Throws on single-class input.
inline RocCurve roc(const std::vector<double>& scores, const std::vector<std::uint8_t>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("roc: size mismatch");
    std::size_t pos = 0;
    for (auto y : labels) pos += y;
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0)
        throw std::invalid_argument("roc: undefined AUROC for single-class input");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    double auc = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    while (i < order.size()) {
        const double threshold = scores[order[i]];
        while (i < order.size() && scores[order[i]] == threshold) {
            if (labels[order[i]]) ++tp;
            else ++fp;
            ++i;
        }
        const double fpr = static_cast<double>(fp) / static_cast<double>(neg);
        const double tpr = static_cast<double>(tp) / static_cast<double>(pos);
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        curve.points.emplace_back(fpr, tpr);
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    curve.auroc = auc;
    return curve;
}

// ---------------------------------------------------------------------------
// Horizontal averaging: per TPR grid level, the per-curve FPR is the infimum
// FPR achieving at least that TPR (step interpolation).

struct AveragedRoc {
    std::vector<double> tpr_grid;
    std::vector<double> mean_fpr;
    std::vector<double> std_fpr;  // sample std; 0 for a single curve
};

inline std::vector<double> default_tpr_grid(std::size_t n = kRocGridSize) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

inline double fpr_at_tpr_step(const RocCurve& curve, double tpr) {
    for (const auto& [f, t] : curve.points)
        if (t >= tpr - 1e-15) return f;
    return 1.0;
}

inline AveragedRoc average_rocs_horizontal(const std::vector<RocCurve>& curves,
                                           const std::vector<double>& grid) {
    if (curves.empty()) throw std::invalid_argument("average_rocs_horizontal: no curves");
    if (grid.empty()) throw std::invalid_argument("average_rocs_horizontal: empty grid");
    AveragedRoc out;
    out.tpr_grid = grid;
    out.mean_fpr.resize(grid.size());
    out.std_fpr.resize(grid.size());
    std::vector<double> vals(curves.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (std::size_t c = 0; c < curves.size(); ++c)
            vals[c] = fpr_at_tpr_step(curves[c], grid[i]);
        const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) /
                            static_cast<double>(vals.size());
        out.mean_fpr[i] = mean;
        if (curves.size() > 1) {
            double ss = 0.0;
            for (double v : vals) ss += (v - mean) * (v - mean);
            out.std_fpr[i] = std::sqrt(ss / static_cast<double>(curves.size() - 1));
        } else {
            out.std_fpr[i] = 0.0;
        }
    }
    return out;
}

inline double fpr_at_tpr(const AveragedRoc& avg, double tpr) {
    if (!(tpr > 0.0) || tpr > 1.0)
        throw std::invalid_argument("fpr_at_tpr: tpr must be in (0,1]");
    const std::size_t n = avg.tpr_grid.size();
    const std::size_t idx =
        static_cast<std::size_t>(std::lround(tpr * static_cast<double>(n - 1)));
    return avg.mean_fpr[std::min(idx, n - 1)];
}

// ---------------------------------------------------------------------------
// Fault detection ensemble: p_hat = mean of the three sigmoid probabilities;
// label condensed by OR over the three diagnosis bits.

struct DetectionEntry {
    std::string record_id;
    catalog::FaultCondition condition;
    catalog::Accelerometer accelerometer = catalog::Accelerometer::DE;
    double probability = 0.0;
    std::uint8_t label = 0;
};

inline std::vector<DetectionEntry> fault_detection(const ScoredSet& scored) {
    std::vector<DetectionEntry> out;
    out.reserve(scored.size());
    for (const auto& e : scored) {
        DetectionEntry d;
        d.record_id = e.record_id;
        d.condition = e.condition;
        d.accelerometer = e.accelerometer;
        double p = 0.0;
        for (double z : e.logits) p += 1.0 / (1.0 + std::exp(-z));
        d.probability = p / 3.0;
        d.label = (e.labels[0] | e.labels[1] | e.labels[2]) ? 1 : 0;
        out.push_back(std::move(d));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Per-detector evaluation of one realization's test-set scores.

struct RealizationScores {
    std::uint64_t seed = 0;
    ScoredSet scored;
    std::array<std::optional<double>, kNumDetectors> auroc;  // nullopt: single-class
    std::array<std::optional<RocCurve>, kNumDetectors> curves;
    // Fault detection per location: index 0 = FE, 1 = DE.
    std::array<std::optional<double>, 2> detection_auroc;
    std::array<std::optional<RocCurve>, 2> detection_curves;
};

inline RealizationScores evaluate_scored(ScoredSet scored, std::uint64_t seed = 0) {
    RealizationScores r;
    r.seed = seed;
    const auto& cols = catalog::fault_columns();
    for (std::size_t d = 0; d < kNumDetectors; ++d) {
        const auto acc = cols[d].location == catalog::Location::FanEnd
                             ? catalog::Accelerometer::FE
                             : catalog::Accelerometer::DE;
        const std::size_t bit = label_bit(cols[d].fault_type);
        std::vector<double> s;
        std::vector<std::uint8_t> y;
        for (const auto& e : scored)
            if (e.accelerometer == acc) {
                s.push_back(e.logits[bit]);
                y.push_back(e.labels[bit]);
            }
        try {
            auto curve = roc(s, y);
            r.auroc[d] = curve.auroc;
            r.curves[d] = std::move(curve);
        } catch (const std::invalid_argument&) {
            // single-class detector for this realization
        }
    }
    const auto detections = fault_detection(scored);
    for (std::size_t loc = 0; loc < 2; ++loc) {
        const auto acc = loc == 0 ? catalog::Accelerometer::FE : catalog::Accelerometer::DE;
        std::vector<double> s;
        std::vector<std::uint8_t> y;
        for (const auto& e : detections)
            if (e.accelerometer == acc) {
                s.push_back(e.probability);
                y.push_back(e.label);
            }
        try {
            auto curve = roc(s, y);
            r.detection_auroc[loc] = curve.auroc;
            r.detection_curves[loc] = std::move(curve);
        } catch (const std::invalid_argument&) {
        }
    }
    r.scored = std::move(scored);
    return r;
}

// ---------------------------------------------------------------------------
// Logit boxplot statistics: 19 condition groups x 6 detectors, pooled over
// all realizations where the condition was in the test set.

struct BoxStats {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    std::size_t count = 0;
};

struct LogitSummary {
    catalog::Column detector;
    catalog::FaultCondition condition;
    BoxStats stats;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& v, double q) {
    // Linear interpolation between order statistics (type-7).
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

}  // namespace detail

inline BoxStats box_stats(std::vector<double> values) {
    BoxStats b;
    b.count = values.size();
    if (values.empty()) return b;
    std::sort(values.begin(), values.end());
    b.min = values.front();
    b.max = values.back();
    b.q1 = detail::quantile_sorted(values, 0.25);
    b.median = detail::quantile_sorted(values, 0.5);
    b.q3 = detail::quantile_sorted(values, 0.75);
    return b;
}

inline std::vector<LogitSummary> logit_summaries(const std::vector<ScoredSet>& realizations) {
    std::vector<LogitSummary> out;
    const auto conditions = catalog::all_conditions();
    for (const auto& col : catalog::fault_columns()) {
        const auto acc = col.location == catalog::Location::FanEnd ? catalog::Accelerometer::FE
                                                                   : catalog::Accelerometer::DE;
        const std::size_t bit = label_bit(col.fault_type);
        for (const auto& cond : conditions) {
            std::vector<double> pool;
            for (const auto& scored : realizations)
                for (const auto& e : scored)
                    if (e.accelerometer == acc && e.condition == cond)
                        pool.push_back(e.logits[bit]);
            out.push_back({col, cond, box_stats(std::move(pool))});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation across realizations: per-detector cells, FE/DE averages, macro.

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample std; 0 with a flag for single realization
    std::size_t n = 0;
};

inline MeanStd mean_std(const std::vector<double>& values) {
    MeanStd ms;
    ms.n = values.size();
    if (values.empty()) return ms;
    ms.mean = std::accumulate(values.begin(), values.end(), 0.0) /
              static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - ms.mean) * (v - ms.mean);
        ms.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return ms;
}

struct RunReport {
    std::size_t n_realizations = 0;
    bool single_realization = false;
    std::array<MeanStd, kNumDetectors> cells;        // fault_columns order
    std::array<MeanStd, 3> fe_de_average;            // per fault type (I, O, B)
    MeanStd macro;                                   // mean over detectors per realization
    std::array<AveragedRoc, kNumDetectors> averaged_curves;
    std::array<MeanStd, 2> detection_cells;          // FE, DE
    MeanStd detection_macro;
    std::array<AveragedRoc, 2> detection_curves;
    std::vector<LogitSummary> logit_boxes;
    std::vector<std::uint64_t> seeds;
};

inline RunReport aggregate(const std::vector<RealizationScores>& realizations) {
    if (realizations.empty()) throw std::invalid_argument("aggregate: no realizations");
    RunReport report;
    report.n_realizations = realizations.size();
    report.single_realization = realizations.size() == 1;

    for (std::size_t d = 0; d < kNumDetectors; ++d) {
        std::vector<double> vals;
        std::vector<RocCurve> curves;
        for (const auto& r : realizations) {
            if (r.auroc[d]) vals.push_back(*r.auroc[d]);
            if (r.curves[d]) curves.push_back(*r.curves[d]);
        }
        report.cells[d] = mean_std(vals);
        if (!curves.empty())
            report.averaged_curves[d] = average_rocs_horizontal(curves, default_tpr_grid());
    }

    // FE/DE average per fault type: mean of the two location cell means.
    const auto& cols = catalog::fault_columns();
    for (std::size_t bit = 0; bit < 3; ++bit) {
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t d = 0; d < kNumDetectors; ++d)
            if (label_bit(cols[d].fault_type) == bit) {
                sum += report.cells[d].mean;
                ++n;
            }
        report.fe_de_average[bit] = {sum / static_cast<double>(n), 0.0, n};
    }

    // Macro: per-realization mean over available detectors, then mean +/- std.
    std::vector<double> macros;
    for (const auto& r : realizations) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& a : r.auroc)
            if (a) {
                sum += *a;
                ++n;
            }
        if (n > 0) macros.push_back(sum / static_cast<double>(n));
    }
    report.macro = mean_std(macros);
    // The report's macro mean is defined as the mean of the six cell means
    // (identical up to summation order when all detectors are defined).
    {
        double sum = 0.0;
        for (const auto& c : report.cells) sum += c.mean;
        report.macro.mean = sum / static_cast<double>(kNumDetectors);
    }

    for (std::size_t loc = 0; loc < 2; ++loc) {
        std::vector<double> vals;
        std::vector<RocCurve> curves;
        for (const auto& r : realizations) {
            if (r.detection_auroc[loc]) vals.push_back(*r.detection_auroc[loc]);
            if (r.detection_curves[loc]) curves.push_back(*r.detection_curves[loc]);
        }
        report.detection_cells[loc] = mean_std(vals);
        if (!curves.empty())
            report.detection_curves[loc] = average_rocs_horizontal(curves, default_tpr_grid());
    }
    std::vector<double> det_macros;
    for (const auto& r : realizations) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& a : r.detection_auroc)
            if (a) {
                sum += *a;
                ++n;
            }
        if (n > 0) det_macros.push_back(sum / static_cast<double>(n));
    }
    report.detection_macro = mean_std(det_macros);

    std::vector<ScoredSet> pools;
    for (const auto& r : realizations) {
        pools.push_back(r.scored);
        report.seeds.push_back(r.seed);
    }
    report.logit_boxes = logit_summaries(pools);
    return report;
}

}  // namespace cwru::eval

#endif  // CWRU_EVAL_HPP

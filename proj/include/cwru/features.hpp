#ifndef CWRU_FEATURES_HPP
#define CWRU_FEATURES_HPP

// Segmented, transformed model inputs with per-segment provenance back to
// the source SignalRecord. Inputs are float32; transform math runs in
// double.

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cwru/catalog.hpp"
#include "cwru/container.hpp"
#include "cwru/dsp.hpp"

namespace cwru::dsp {

enum class Representation { Time, Spectrum, PowerCepstrum, Spectrogram };

inline std::string to_string(Representation r) {
    switch (r) {
        case Representation::Time: return "time";
        case Representation::Spectrum: return "spectrum";
        case Representation::PowerCepstrum: return "power-cepstrum";
        case Representation::Spectrogram: return "spectrogram";
    }
    return "?";
}

inline Representation parse_representation(const std::string& s) {
    if (s == "time") return Representation::Time;
    if (s == "spectrum") return Representation::Spectrum;
    if (s == "power-cepstrum") return Representation::PowerCepstrum;
    if (s == "spectrogram") return Representation::Spectrogram;
    throw std::invalid_argument("unknown representation: " + s);
}

inline std::size_t segmentation_window(Representation r) {
    switch (r) {
        case Representation::Time: return kTimeWindow;
        case Representation::Spectrum:
        case Representation::PowerCepstrum: return kSpectrumWindow;
        case Representation::Spectrogram: return kSpectrogramWindow;
    }
    return 0;
}

inline constexpr double kOverlapFraction = 0.97;

struct Provenance {
    std::string record_id;
    std::size_t segment_index = 0;
};

struct FeatureSet {
    Representation representation = Representation::Time;
    std::vector<std::size_t> dims;  // {L} for 1-D, {224,224} for spectrograms
    std::vector<std::vector<float>> inputs;
    std::vector<Provenance> provenance;
    std::vector<std::array<std::uint8_t, 3>> labels;
    // Copied from the parent records so evaluation never re-resolves ids.
    std::vector<catalog::FaultCondition> conditions;
    std::vector<catalog::Accelerometer> accelerometers;
    ZScoreStats norm_stats;

    std::size_t size() const { return inputs.size(); }
    std::size_t input_length() const {
        std::size_t n = 1;
        for (std::size_t d : dims) n *= d;
        return n;
    }
};

namespace detail {

inline std::vector<float> transform_segment(Representation rep, const std::vector<double>& seg) {
    std::vector<double> t;
    switch (rep) {
        case Representation::Time: t = seg; break;
        case Representation::Spectrum: t = spectrum(seg); break;
        case Representation::PowerCepstrum: t = power_cepstrum(seg); break;
        case Representation::Spectrogram: t = spectrogram(seg).data; break;
    }
    std::vector<float> out(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = static_cast<float>(t[i]);
    return out;
}

}  // namespace detail

inline std::vector<std::size_t> feature_dims(Representation rep) {
    switch (rep) {
        case Representation::Time: return {kTimeWindow};
        case Representation::Spectrum: return {kSpectrumWindow / 2};
        case Representation::PowerCepstrum: return {kSpectrumWindow / 4};
        case Representation::Spectrogram: return {kSpectrogramSide, kSpectrogramSide};
    }
    return {};
}

// Per-record feature extraction, usable for caching one record at a time.
inline FeatureSet make_features_for_record(const catalog::SignalRecord& record,
                                           Representation rep) {
    FeatureSet fs;
    fs.representation = rep;
    fs.dims = feature_dims(rep);
    const SegmentationSpec spec{segmentation_window(rep), kOverlapFraction};
    auto segments = segment(record.samples, spec);
    fs.inputs.reserve(segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
        fs.inputs.push_back(detail::transform_segment(rep, segments[i]));
        fs.provenance.push_back({record.id(), i});
        fs.labels.push_back(record.label);
        fs.conditions.push_back(record.condition);
        fs.accelerometers.push_back(record.accelerometer);
    }
    return fs;
}

inline void append_features(FeatureSet& dst, const FeatureSet& src) {
    if (dst.inputs.empty()) {
        dst.representation = src.representation;
        dst.dims = src.dims;
    } else if (dst.dims != src.dims || dst.representation != src.representation) {
        throw std::invalid_argument("append_features: incompatible feature sets");
    }
    dst.inputs.insert(dst.inputs.end(), src.inputs.begin(), src.inputs.end());
    dst.provenance.insert(dst.provenance.end(), src.provenance.begin(), src.provenance.end());
    dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
    dst.conditions.insert(dst.conditions.end(), src.conditions.begin(), src.conditions.end());
    dst.accelerometers.insert(dst.accelerometers.end(), src.accelerometers.begin(),
                              src.accelerometers.end());
}

inline FeatureSet make_features(const std::vector<catalog::SignalRecord>& records,
                                Representation rep) {
    if (records.empty()) throw std::invalid_argument("make_features: no records");
    FeatureSet fs;
    for (const auto& rec : records) append_features(fs, make_features_for_record(rec, rep));
    return fs;
}

// ---------------------------------------------------------------------------
// Disk cache: one container file per (record, representation).

inline void save_features(const std::filesystem::path& path, const FeatureSet& fs) {
    nlohmann::json h;
    h["dtype"] = "float32";
    h["representation"] = to_string(fs.representation);
    h["shape"] = fs.dims;
    h["count"] = fs.inputs.size();
    nlohmann::json prov = nlohmann::json::array();
    for (std::size_t i = 0; i < fs.size(); ++i) {
        nlohmann::json p;
        p["record_id"] = fs.provenance[i].record_id;
        p["segment"] = fs.provenance[i].segment_index;
        p["condition"] = catalog::condition_id(fs.conditions[i]);
        p["accelerometer"] = catalog::to_string(fs.accelerometers[i]);
        p["label"] = {fs.labels[i][0], fs.labels[i][1], fs.labels[i][2]};
        prov.push_back(std::move(p));
    }
    h["provenance"] = std::move(prov);
    std::vector<float> payload;
    payload.reserve(fs.size() * fs.input_length());
    for (const auto& input : fs.inputs)
        payload.insert(payload.end(), input.begin(), input.end());
    container::write_file(path, h, payload);
}

inline FeatureSet load_features(const std::filesystem::path& path) {
    auto fp = container::read_file(path);
    FeatureSet fs;
    fs.representation = parse_representation(fp.header.at("representation").get<std::string>());
    fs.dims = fp.header.at("shape").get<std::vector<std::size_t>>();
    const std::size_t count = fp.header.at("count").get<std::size_t>();
    const std::size_t n = fs.input_length();
    if (fp.payload.size() != count * n)
        throw std::runtime_error("feature cache payload size mismatch in " + path.string());
    fs.inputs.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        fs.inputs[i].assign(fp.payload.begin() + static_cast<std::ptrdiff_t>(i * n),
                            fp.payload.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    for (const auto& p : fp.header.at("provenance")) {
        fs.provenance.push_back({p.at("record_id").get<std::string>(),
                                 p.at("segment").get<std::size_t>()});
        fs.conditions.push_back(catalog::parse_condition_id(p.at("condition").get<std::string>()));
        fs.accelerometers.push_back(p.at("accelerometer").get<std::string>() == "FE"
                                        ? catalog::Accelerometer::FE
                                        : catalog::Accelerometer::DE);
        const auto lab = p.at("label");
        fs.labels.push_back({lab.at(0).get<std::uint8_t>(), lab.at(1).get<std::uint8_t>(),
                             lab.at(2).get<std::uint8_t>()});
    }
    if (fs.provenance.size() != count)
        throw std::runtime_error("feature cache provenance mismatch in " + path.string());
    return fs;
}

}  // namespace cwru::dsp

#endif  // CWRU_FEATURES_HPP

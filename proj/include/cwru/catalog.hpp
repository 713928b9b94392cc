#ifndef CWRU_CATALOG_HPP
#define CWRU_CATALOG_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "cwru/dsp.hpp"
#include "cwru/matfile.hpp"

namespace cwru::catalog {

enum class Location { FanEnd, DriveEnd, Healthy };
enum class FaultType { Inner, Outer, Ball, None };
enum class Accelerometer { FE, DE };

// One of the 19 fault conditions: (location, type, size) or the healthy state.
struct FaultCondition {
    Location location = Location::Healthy;
    FaultType fault_type = FaultType::None;
    int fault_size_mils = 0;  // 0 = n/a (healthy)

    bool healthy() const { return location == Location::Healthy; }

    auto operator<=>(const FaultCondition&) const = default;
};

inline std::string to_string(Location l) {
    switch (l) {
        case Location::FanEnd: return "fan";
        case Location::DriveEnd: return "drive";
        default: return "healthy";
    }
}

inline std::string to_string(FaultType t) {
    switch (t) {
        case FaultType::Inner: return "inner";
        case FaultType::Outer: return "outer";
        case FaultType::Ball: return "ball";
        default: return "none";
    }
}

inline std::string to_string(Accelerometer a) {
    return a == Accelerometer::FE ? "FE" : "DE";
}

inline std::string condition_id(const FaultCondition& c) {
    if (c.healthy()) return "healthy";
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%02d", c.fault_size_mils);
    return to_string(c.location) + "-" + to_string(c.fault_type) + "-" + buf;
}

inline FaultCondition parse_condition_id(const std::string& id) {
    if (id == "healthy") return {};
    FaultCondition c;
    std::stringstream ss(id);
    std::string loc, type, size;
    std::getline(ss, loc, '-');
    std::getline(ss, type, '-');
    std::getline(ss, size, '-');
    if (loc == "fan") c.location = Location::FanEnd;
    else if (loc == "drive") c.location = Location::DriveEnd;
    else throw std::invalid_argument("bad condition id: " + id);
    if (type == "inner") c.fault_type = FaultType::Inner;
    else if (type == "outer") c.fault_type = FaultType::Outer;
    else if (type == "ball") c.fault_type = FaultType::Ball;
    else throw std::invalid_argument("bad condition id: " + id);
    c.fault_size_mils = std::stoi(size);
    if (c.fault_size_mils != 7 && c.fault_size_mils != 14 && c.fault_size_mils != 21)
        throw std::invalid_argument("bad fault size in condition id: " + id);
    return c;
}

// A (location, fault type) pair; each has exactly three size variants.
struct Column {
    Location location;
    FaultType fault_type;
    auto operator<=>(const Column&) const = default;
};

// Canonical column order used by the split generators.
inline const std::array<Column, 6>& fault_columns() {
    static const std::array<Column, 6> cols{{
        {Location::FanEnd, FaultType::Inner},
        {Location::FanEnd, FaultType::Outer},
        {Location::FanEnd, FaultType::Ball},
        {Location::DriveEnd, FaultType::Inner},
        {Location::DriveEnd, FaultType::Outer},
        {Location::DriveEnd, FaultType::Ball},
    }};
    return cols;
}

inline constexpr std::array<int, 3> kFaultSizes{7, 14, 21};
inline constexpr std::array<int, 3> kLoadsHp{1, 2, 3};

inline std::vector<FaultCondition> faulty_conditions() {
    std::vector<FaultCondition> out;
    out.reserve(18);
    for (const auto& col : fault_columns())
        for (int size : kFaultSizes)
            out.push_back({col.location, col.fault_type, size});
    return out;
}

inline std::vector<FaultCondition> all_conditions() {
    auto out = faulty_conditions();
    out.push_back(FaultCondition{});  // healthy
    return out;
}

// One accelerometer signal plus its 3-bit (inner, outer, ball) target.
struct SignalRecord {
    FaultCondition condition;
    Accelerometer accelerometer = Accelerometer::DE;
    int load_hp = 1;
    int sample_rate_hz = 12000;
    std::vector<double> samples;
    std::array<std::uint8_t, 3> label{0, 0, 0};
    std::string source_file;
    std::optional<double> rpm;

    std::string id() const {
        return condition_id(condition) + "/L" + std::to_string(load_hp) + "/" +
               to_string(accelerometer);
    }
};

// A fault type is labeled positive iff it occurred at the location where the
// signal was acquired. Cross-location fault signals and healthy signals get
// (0,0,0).
inline std::array<std::uint8_t, 3> make_label(const FaultCondition& c, Accelerometer acc) {
    std::array<std::uint8_t, 3> label{0, 0, 0};
    if (c.healthy()) return label;
    const bool same_location = (c.location == Location::FanEnd && acc == Accelerometer::FE) ||
                               (c.location == Location::DriveEnd && acc == Accelerometer::DE);
    if (!same_location) return label;
    switch (c.fault_type) {
        case FaultType::Inner: label[0] = 1; break;
        case FaultType::Outer: label[1] = 1; break;
        case FaultType::Ball: label[2] = 1; break;
        default: break;
    }
    return label;
}

// ---------------------------------------------------------------------------
// Manifest: checked-in enumeration of CWRU record numbers, channel variable
// names and (optional) checksums. One entry per (condition, load): 57 total.

struct ManifestEntry {
    FaultCondition condition;
    int load_hp = 1;
    int record_number = 0;
    std::string url;
    std::string sha256;  // empty = unverified
    std::string de_var;
    std::string fe_var;
    std::string rpm_var;  // empty = none
    int native_rate_hz = 12000;

    std::string filename() const { return std::to_string(record_number) + ".mat"; }
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

inline Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    nlohmann::json j;
    in >> j;
    Manifest m;
    for (const auto& e : j.at("entries")) {
        ManifestEntry me;
        me.condition = parse_condition_id(e.at("condition").get<std::string>());
        me.load_hp = e.at("load_hp").get<int>();
        me.record_number = e.at("record").get<int>();
        me.url = e.value("url", std::string{});
        me.sha256 = e.value("sha256", std::string{});
        me.de_var = e.at("de_var").get<std::string>();
        me.fe_var = e.at("fe_var").get<std::string>();
        me.rpm_var = e.value("rpm_var", std::string{});
        me.native_rate_hz = e.value("native_rate_hz", 12000);
        m.entries.push_back(std::move(me));
    }
    return m;
}

inline std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

inline std::string sha256_string(const std::string& s) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, s.data(), s.size());
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

enum class EntryStatus { Present, Missing, Corrupted };

struct VerifyReport {
    struct Item {
        const ManifestEntry* entry;
        EntryStatus status;
        std::string detail;
    };
    std::vector<Item> items;

    bool all_present() const {
        for (const auto& i : items)
            if (i.status != EntryStatus::Present) return false;
        return true;
    }
    std::size_t count(EntryStatus s) const {
        std::size_t n = 0;
        for (const auto& i : items)
            if (i.status == s) ++n;
        return n;
    }
};

inline VerifyReport verify_manifest(const Manifest& manifest,
                                    const std::filesystem::path& raw_dir) {
    VerifyReport report;
    for (const auto& e : manifest.entries) {
        const auto path = raw_dir / e.filename();
        if (!std::filesystem::exists(path)) {
            report.items.push_back({&e, EntryStatus::Missing, path.string()});
            continue;
        }
        if (!e.sha256.empty()) {
            const std::string got = sha256_file(path);
            if (got != e.sha256) {
                report.items.push_back({&e, EntryStatus::Corrupted,
                                        "sha256 mismatch: expected " + e.sha256 + ", got " + got});
                continue;
            }
        }
        report.items.push_back({&e, EntryStatus::Present, {}});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Catalog construction: 18 faulty configurations x 2 accelerometers x 3 loads
// plus 6 healthy records = 114. Healthy signals (48 kHz only) are resampled
// to 12 kHz.

inline std::vector<SignalRecord> build_catalog(const Manifest& manifest,
                                               const std::filesystem::path& raw_dir) {
    std::vector<SignalRecord> records;
    records.reserve(manifest.entries.size() * 2);
    for (const auto& e : manifest.entries) {
        const auto path = raw_dir / e.filename();
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("missing raw file: " + path.string());
        if (!e.sha256.empty()) {
            const std::string got = sha256_file(path);
            if (got != e.sha256)
                throw std::runtime_error("checksum mismatch for " + path.string());
        }
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        auto parsed = matfile::parse_mat(bytes);

        std::optional<double> rpm;
        if (!e.rpm_var.empty()) {
            auto it = parsed.variables.find(e.rpm_var);
            if (it != parsed.variables.end() && !it->second.data.empty())
                rpm = it->second.data.front();
        }

        const std::array<std::pair<Accelerometer, const std::string*>, 2> channels{{
            {Accelerometer::DE, &e.de_var},
            {Accelerometer::FE, &e.fe_var},
        }};
        for (const auto& [acc, var_name] : channels) {
            auto it = parsed.variables.find(*var_name);
            if (it == parsed.variables.end())
                throw std::runtime_error("missing variable '" + *var_name + "' in " +
                                         path.string());
            SignalRecord rec;
            rec.condition = e.condition;
            rec.accelerometer = acc;
            rec.load_hp = e.load_hp;
            rec.samples = it->second.data;  // [N,1]/[1,N] arrays flatten trivially
            rec.source_file = path.string();
            rec.rpm = rpm;
            rec.label = make_label(e.condition, acc);
            if (e.native_rate_hz == 48000) {
                rec.samples = dsp::resample_4to1(rec.samples);
            } else if (e.native_rate_hz != 12000) {
                throw std::runtime_error("unsupported native sample rate " +
                                         std::to_string(e.native_rate_hz) + " in " +
                                         path.string());
            }
            rec.sample_rate_hz = 12000;
            records.push_back(std::move(rec));
        }
    }
    return records;
}

// Ablation: keep only the first half of each signal (floor), before
// segmentation. Labels and metadata unchanged.
inline std::vector<SignalRecord> truncate_half(std::vector<SignalRecord> records) {
    for (auto& r : records) r.samples.resize(r.samples.size() / 2);
    return records;
}

}  // namespace cwru::catalog

#endif  // CWRU_CATALOG_HPP

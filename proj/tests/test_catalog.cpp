#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "cwru/catalog.hpp"
#include "cwru/prng.hpp"

using namespace cwru;
namespace fs = std::filesystem;

namespace {

// Minimal little-endian level-5 MAT writer for catalog fixtures.
struct MatBuilder {
    std::vector<std::uint8_t> bytes;

    MatBuilder() {
        std::string text = "MATLAB 5.0 MAT-file, synthetic catalog fixture";
        text.resize(116, ' ');
        raw(text.data(), text.size());
        const std::uint8_t subsys[8]{};
        raw(subsys, 8);
        u16(0x0100);
        bytes.push_back('I');
        bytes.push_back('M');
    }

    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), b, b + n);
    }
    void u16(std::uint16_t v) { raw(&v, 2); }
    void u32(std::uint32_t v) { raw(&v, 4); }
    void i32(std::int32_t v) { raw(&v, 4); }
    void f64(double v) { raw(&v, 8); }
    void pad8() { while (bytes.size() % 8) bytes.push_back(0); }

    void matrix(const std::string& name, const std::vector<double>& data) {
        std::vector<std::uint8_t> body;
        std::swap(bytes, body);  // reuse the writers on an empty buffer

        u32(6);  // miUINT32 array flags
        u32(8);
        u32(6);  // mxDOUBLE_CLASS
        u32(0);
        u32(5);  // miINT32 dimensions
        u32(8);
        i32(static_cast<std::int32_t>(data.size()));
        i32(1);
        u32(1);  // miINT8 name
        u32(static_cast<std::uint32_t>(name.size()));
        raw(name.data(), name.size());
        pad8();
        u32(9);  // miDOUBLE payload
        u32(static_cast<std::uint32_t>(data.size() * 8));
        for (double v : data) f64(v);
        pad8();

        std::swap(bytes, body);
        u32(14);  // miMATRIX
        u32(static_cast<std::uint32_t>(body.size()));
        raw(body.data(), body.size());
    }

    void save(const fs::path& path) const {
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
};

fs::path fresh_dir(const std::string& leaf) {
    auto dir = fs::temp_directory_path() / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

catalog::Manifest synthetic_manifest() {
    catalog::Manifest m;
    int record = 500;
    for (const auto& cond : catalog::all_conditions()) {
        for (int load : catalog::kLoadsHp) {
            catalog::ManifestEntry e;
            e.condition = cond;
            e.load_hp = load;
            e.record_number = record++;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "X%03d", e.record_number);
            e.de_var = std::string(buf) + "_DE_time";
            e.fe_var = std::string(buf) + "_FE_time";
            e.rpm_var = std::string(buf) + "RPM";
            e.native_rate_hz = cond.healthy() ? 48000 : 12000;
            m.entries.push_back(std::move(e));
        }
    }
    return m;
}

void write_raw_files(const catalog::Manifest& m, const fs::path& raw_dir,
                     std::size_t faulty_samples = 1024, std::size_t healthy_samples = 4096) {
    SplitMix64 rng(99);
    for (const auto& e : m.entries) {
        MatBuilder b;
        const std::size_t n = e.condition.healthy() ? healthy_samples : faulty_samples;
        std::vector<double> de(n), fe(n);
        for (auto& v : de) v = 2.0 * rng.next_double() - 1.0;
        for (auto& v : fe) v = 2.0 * rng.next_double() - 1.0;
        b.matrix(e.de_var, de);
        b.matrix(e.fe_var, fe);
        b.matrix(e.rpm_var, {1750.0 + e.load_hp});
        b.save(raw_dir / e.filename());
    }
}

}  // namespace

TEST_CASE("condition ids round-trip and reject junk") {
    for (const auto& cond : catalog::all_conditions())
        CHECK(catalog::parse_condition_id(catalog::condition_id(cond)) == cond);
    CHECK(catalog::condition_id({catalog::Location::DriveEnd, catalog::FaultType::Inner, 7}) ==
          "drive-inner-07");
    CHECK(catalog::condition_id({}) == "healthy");
    CHECK_THROWS_AS(catalog::parse_condition_id("drive-inner-10"), std::invalid_argument);
    CHECK_THROWS_AS(catalog::parse_condition_id("rear-inner-07"), std::invalid_argument);
    CHECK_THROWS_AS(catalog::parse_condition_id("drive-dent-07"), std::invalid_argument);
}

TEST_CASE("labels are positive only at the acquisition location") {
    using catalog::Accelerometer;
    const catalog::FaultCondition fan_outer{catalog::Location::FanEnd,
                                            catalog::FaultType::Outer, 14};
    CHECK(catalog::make_label(fan_outer, Accelerometer::FE) ==
          std::array<std::uint8_t, 3>{0, 1, 0});
    CHECK(catalog::make_label(fan_outer, Accelerometer::DE) ==
          std::array<std::uint8_t, 3>{0, 0, 0});

    const catalog::FaultCondition drive_ball{catalog::Location::DriveEnd,
                                             catalog::FaultType::Ball, 21};
    CHECK(catalog::make_label(drive_ball, Accelerometer::DE) ==
          std::array<std::uint8_t, 3>{0, 0, 1});
    CHECK(catalog::make_label(drive_ball, Accelerometer::FE) ==
          std::array<std::uint8_t, 3>{0, 0, 0});

    CHECK(catalog::make_label({}, Accelerometer::DE) == std::array<std::uint8_t, 3>{0, 0, 0});
    CHECK(catalog::make_label({}, Accelerometer::FE) == std::array<std::uint8_t, 3>{0, 0, 0});
}

TEST_CASE("the checked-in manifest enumerates all 57 acquisitions") {
    const auto manifest = catalog::load_manifest(fs::path(CWRU_REPO_DIR) / "data/manifest.json");
    REQUIRE(manifest.entries.size() == 57);

    std::set<std::pair<std::string, int>> keys;
    std::set<int> records;
    for (const auto& e : manifest.entries) {
        keys.insert({catalog::condition_id(e.condition), e.load_hp});
        records.insert(e.record_number);
        CHECK((e.load_hp >= 1 && e.load_hp <= 3));
        char buf[32];
        std::snprintf(buf, sizeof(buf), "X%03d", e.record_number);
        CHECK(e.de_var == std::string(buf) + "_DE_time");
        CHECK(e.fe_var == std::string(buf) + "_FE_time");
        CHECK(e.url.find(e.filename()) != std::string::npos);
        if (e.condition.healthy()) CHECK(e.native_rate_hz == 48000);
        else CHECK(e.native_rate_hz == 12000);
    }
    CHECK(keys.size() == 57);      // every (condition, load) exactly once
    CHECK(records.size() == 57);   // no record number reused
}

TEST_CASE("load_manifest applies defaults and rejects bad input") {
    auto dir = fresh_dir("cwru_manifest_test");
    {
        std::ofstream out(dir / "m.json");
        out << R"({"entries":[{"condition":"fan-ball-21","load_hp":2,"record":293,
                   "de_var":"X293_DE_time","fe_var":"X293_FE_time"}]})";
    }
    auto m = catalog::load_manifest(dir / "m.json");
    REQUIRE(m.entries.size() == 1);
    CHECK(m.entries[0].native_rate_hz == 12000);
    CHECK(m.entries[0].sha256.empty());
    CHECK(m.entries[0].rpm_var.empty());
    CHECK(m.entries[0].filename() == "293.mat");

    CHECK_THROWS(catalog::load_manifest(dir / "absent.json"));
    {
        std::ofstream out(dir / "bad.json");
        out << R"({"entries":[{"condition":"fan-ball-9","load_hp":2,"record":1,
                   "de_var":"a","fe_var":"b"}]})";
    }
    CHECK_THROWS_AS(catalog::load_manifest(dir / "bad.json"), std::invalid_argument);
}

TEST_CASE("build_catalog produces 114 labeled records from synthetic raw data") {
    auto raw = fresh_dir("cwru_catalog_raw");
    auto manifest = synthetic_manifest();
    write_raw_files(manifest, raw);

    auto records = catalog::build_catalog(manifest, raw);
    REQUIRE(records.size() == 114);

    std::set<std::string> ids;
    std::size_t healthy = 0;
    for (const auto& r : records) {
        ids.insert(r.id());
        CHECK(r.sample_rate_hz == 12000);
        CHECK(r.label == catalog::make_label(r.condition, r.accelerometer));
        REQUIRE(r.rpm.has_value());
        CHECK(*r.rpm == Catch::Approx(1750.0 + r.load_hp));
        if (r.condition.healthy()) {
            ++healthy;
            CHECK(r.samples.size() == 1024);  // 48 kHz resampled 4:1
        } else {
            CHECK(r.samples.size() == 1024);
        }
    }
    CHECK(ids.size() == 114);
    CHECK(healthy == 6);
    CHECK(records.front().id() ==
          catalog::condition_id(records.front().condition) + "/L" +
              std::to_string(records.front().load_hp) + "/" +
              catalog::to_string(records.front().accelerometer));
}

TEST_CASE("build_catalog preserves faulty samples bit-exactly") {
    auto raw = fresh_dir("cwru_catalog_exact");
    catalog::Manifest m;
    catalog::ManifestEntry e;
    e.condition = {catalog::Location::DriveEnd, catalog::FaultType::Inner, 7};
    e.load_hp = 1;
    e.record_number = 106;
    e.de_var = "X106_DE_time";
    e.fe_var = "X106_FE_time";
    m.entries.push_back(e);

    std::vector<double> de{0.125, -3.5, 1e-9, 42.0};
    std::vector<double> fe{1.0, 2.0, 3.0, 4.0};
    MatBuilder b;
    b.matrix(e.de_var, de);
    b.matrix(e.fe_var, fe);
    b.save(raw / "106.mat");

    auto records = catalog::build_catalog(m, raw);
    REQUIRE(records.size() == 2);
    CHECK(records[0].accelerometer == catalog::Accelerometer::DE);
    CHECK(records[0].samples == de);
    CHECK(records[0].label == std::array<std::uint8_t, 3>{1, 0, 0});
    CHECK_FALSE(records[0].rpm.has_value());
    CHECK(records[1].accelerometer == catalog::Accelerometer::FE);
    CHECK(records[1].samples == fe);
    CHECK(records[1].label == std::array<std::uint8_t, 3>{0, 0, 0});
}

TEST_CASE("verify_manifest distinguishes present, missing and corrupted files") {
    auto raw = fresh_dir("cwru_verify_raw");
    auto manifest = synthetic_manifest();
    manifest.entries.resize(3);
    write_raw_files(manifest, raw);

    // pin real checksums, then corrupt one file and delete another
    for (auto& e : manifest.entries) e.sha256 = catalog::sha256_file(raw / e.filename());
    {
        std::fstream f(raw / manifest.entries[1].filename(),
                       std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(200);
        f.put('\x7f');
    }
    fs::remove(raw / manifest.entries[2].filename());

    auto report = catalog::verify_manifest(manifest, raw);
    REQUIRE(report.items.size() == 3);
    CHECK_FALSE(report.all_present());
    CHECK(report.count(catalog::EntryStatus::Present) == 1);
    CHECK(report.count(catalog::EntryStatus::Corrupted) == 1);
    CHECK(report.count(catalog::EntryStatus::Missing) == 1);
    CHECK(report.items[1].detail.find("sha256 mismatch") != std::string::npos);

    CHECK_THROWS_AS(catalog::build_catalog(manifest, raw), std::runtime_error);
}

TEST_CASE("build_catalog enforces pinned checksums") {
    auto raw = fresh_dir("cwru_checksum_raw");
    auto manifest = synthetic_manifest();
    manifest.entries.resize(1);
    write_raw_files(manifest, raw);
    manifest.entries[0].sha256 = catalog::sha256_file(raw / manifest.entries[0].filename());
    CHECK(catalog::build_catalog(manifest, raw).size() == 2);

    manifest.entries[0].sha256[0] = manifest.entries[0].sha256[0] == 'a' ? 'b' : 'a';
    CHECK_THROWS_WITH(catalog::build_catalog(manifest, raw),
                      Catch::Matchers::ContainsSubstring("checksum mismatch"));
}

TEST_CASE("unsupported native sample rates are rejected") {
    auto raw = fresh_dir("cwru_rate_raw");
    auto manifest = synthetic_manifest();
    manifest.entries.resize(1);
    write_raw_files(manifest, raw);
    manifest.entries[0].native_rate_hz = 24000;
    CHECK_THROWS_WITH(catalog::build_catalog(manifest, raw),
                      Catch::Matchers::ContainsSubstring("sample rate"));
}

TEST_CASE("truncate_half floors odd lengths and keeps metadata") {
    catalog::SignalRecord r;
    r.condition = {catalog::Location::FanEnd, catalog::FaultType::Inner, 7};
    r.label = {1, 0, 0};
    r.samples = {1, 2, 3, 4, 5};
    auto out = catalog::truncate_half({r});
    REQUIRE(out.size() == 1);
    CHECK(out[0].samples == std::vector<double>{1, 2});
    CHECK(out[0].label == r.label);
    CHECK(out[0].condition == r.condition);
}

TEST_CASE("file and string hashes agree on identical bytes") {
    auto dir = fresh_dir("cwru_hash");
    const std::string payload = "catalog hash fixture";
    {
        std::ofstream out(dir / "f.bin", std::ios::binary);
        out << payload;
    }
    CHECK(catalog::sha256_file(dir / "f.bin") == catalog::sha256_string(payload));
    CHECK(catalog::sha256_string("").size() == 64);
    CHECK_THROWS(catalog::sha256_file(dir / "nope.bin"));
}

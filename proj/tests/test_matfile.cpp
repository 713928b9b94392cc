#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <zlib.h>

#include "cwru/matfile.hpp"

using namespace cwru;

namespace {

// Byte-level MAT v5 writer, independent of the parser. Big-endian mode swaps
// every multi-byte value and sets the "MI" indicator.
struct MatWriter {
    std::vector<std::uint8_t> bytes;
    bool big_endian = false;

    void u16(std::uint16_t v) {
        if (big_endian) v = __builtin_bswap16(v);
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        bytes.insert(bytes.end(), p, p + 2);
    }
    void u32(std::uint32_t v) {
        if (big_endian) v = __builtin_bswap32(v);
        const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
        bytes.insert(bytes.end(), p, p + 4);
    }
    void f64(double v) {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        if (big_endian) u = __builtin_bswap64(u);
        const auto* p = reinterpret_cast<const std::uint8_t*>(&u);
        bytes.insert(bytes.end(), p, p + 8);
    }
    void raw(const void* p, std::size_t n) {
        const auto* q = static_cast<const std::uint8_t*>(p);
        bytes.insert(bytes.end(), q, q + n);
    }
    void pad8() {
        while (bytes.size() % 8 != 0) bytes.push_back(0);
    }

    void header() {
        std::string text = "MATLAB 5.0 MAT-file, synthetic test fixture";
        text.resize(124, ' ');
        raw(text.data(), 124);
        u16(0x0100);
        if (big_endian) {
            bytes.push_back('M');
            bytes.push_back('I');
        } else {
            bytes.push_back('I');
            bytes.push_back('M');
        }
    }

    // One full miMATRIX element holding a [rows, cols] double array.
    std::vector<std::uint8_t> matrix_element(const std::string& name,
                                             const std::vector<double>& data, std::uint32_t rows,
                                             std::uint32_t cols, std::uint32_t cls = 6) {
        MatWriter body;
        body.big_endian = big_endian;
        body.u32(6);  // miUINT32 array flags
        body.u32(8);
        body.u32(cls);
        body.u32(0);
        body.u32(5);  // miINT32 dims
        body.u32(8);
        body.u32(rows);
        body.u32(cols);
        body.u32(1);  // miINT8 name
        body.u32(static_cast<std::uint32_t>(name.size()));
        body.raw(name.data(), name.size());
        body.pad8();
        body.u32(9);  // miDOUBLE data
        body.u32(static_cast<std::uint32_t>(data.size() * 8));
        for (double v : data) body.f64(v);
        body.pad8();

        MatWriter elem;
        elem.big_endian = big_endian;
        elem.u32(14);  // miMATRIX
        elem.u32(static_cast<std::uint32_t>(body.bytes.size()));
        elem.raw(body.bytes.data(), body.bytes.size());
        return elem.bytes;
    }

    void matrix(const std::string& name, const std::vector<double>& data, std::uint32_t rows,
                std::uint32_t cols, std::uint32_t cls = 6) {
        auto e = matrix_element(name, data, rows, cols, cls);
        raw(e.data(), e.size());
    }

    void compressed_matrix(const std::string& name, const std::vector<double>& data,
                           std::uint32_t rows, std::uint32_t cols) {
        auto inner = matrix_element(name, data, rows, cols);
        uLongf dest_len = compressBound(static_cast<uLong>(inner.size()));
        std::vector<std::uint8_t> deflated(dest_len);
        REQUIRE(compress(deflated.data(), &dest_len, inner.data(),
                         static_cast<uLong>(inner.size())) == Z_OK);
        deflated.resize(dest_len);
        u32(15);  // miCOMPRESSED
        u32(static_cast<std::uint32_t>(deflated.size()));
        raw(deflated.data(), deflated.size());
        pad8();
    }
};

std::vector<double> ramp(std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 0.125 * static_cast<double>(i) - 3.0;
    return v;
}

}  // namespace

TEST_CASE("plain double matrix round-trips bit-exactly") {
    MatWriter w;
    w.header();
    const auto data = ramp(1000);
    w.matrix("X097_DE_time", data, 1000, 1);

    auto result = matfile::parse_mat(w.bytes);
    REQUIRE(result.variables.count("X097_DE_time") == 1);
    const auto& v = result.variables.at("X097_DE_time");
    CHECK(v.shape == std::vector<std::size_t>{1000, 1});
    CHECK(v.element_kind == matfile::ElementKind::Float64);
    REQUIRE(v.data.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        // bit-exact, not just approximately equal
        std::uint64_t a, b;
        std::memcpy(&a, &v.data[i], 8);
        std::memcpy(&b, &data[i], 8);
        CHECK(a == b);
    }
    CHECK(result.warnings.empty());
}

TEST_CASE("multiple variables in one file") {
    MatWriter w;
    w.header();
    w.matrix("X105_DE_time", ramp(64), 64, 1);
    w.matrix("X105_FE_time", ramp(32), 32, 1);
    w.matrix("X105RPM", {1772.0}, 1, 1);

    auto result = matfile::parse_mat(w.bytes);
    CHECK(result.variables.size() == 3);
    CHECK(result.variables.at("X105RPM").data == std::vector<double>{1772.0});
}

TEST_CASE("big-endian file parses to the same values") {
    MatWriter w;
    w.big_endian = true;
    w.header();
    const auto data = ramp(257);
    w.matrix("be_var", data, 257, 1);

    auto result = matfile::parse_mat(w.bytes);
    REQUIRE(result.variables.count("be_var") == 1);
    CHECK(result.variables.at("be_var").data == data);
}

TEST_CASE("compressed element inflates and parses") {
    MatWriter w;
    w.header();
    const auto data = ramp(5000);
    w.compressed_matrix("X100_DE_time", data, 5000, 1);

    auto result = matfile::parse_mat(w.bytes);
    REQUIRE(result.variables.count("X100_DE_time") == 1);
    CHECK(result.variables.at("X100_DE_time").data == data);
}

TEST_CASE("mixed compressed and plain elements") {
    MatWriter w;
    w.header();
    w.compressed_matrix("a", ramp(10), 10, 1);
    w.matrix("b", ramp(4), 2, 2);
    auto result = matfile::parse_mat(w.bytes);
    CHECK(result.variables.size() == 2);
    CHECK(result.variables.at("b").shape == std::vector<std::size_t>{2, 2});
}

TEST_CASE("int16 data widens to double") {
    MatWriter w;
    w.header();
    // Build the data subelement as miINT16 by hand.
    MatWriter body;
    body.u32(6);
    body.u32(8);
    body.u32(10);  // mxINT16
    body.u32(0);
    body.u32(5);
    body.u32(8);
    body.u32(3);
    body.u32(1);
    body.u32(1);
    body.u32(2);
    body.raw("iv", 2);
    body.pad8();
    body.u32(3);  // miINT16
    body.u32(6);
    body.u16(static_cast<std::uint16_t>(-5));
    body.u16(0);
    body.u16(300);
    body.pad8();
    w.u32(14);
    w.u32(static_cast<std::uint32_t>(body.bytes.size()));
    w.raw(body.bytes.data(), body.bytes.size());

    auto result = matfile::parse_mat(w.bytes);
    const auto& v = result.variables.at("iv");
    CHECK(v.element_kind == matfile::ElementKind::Int16);
    CHECK(v.data == std::vector<double>{-5.0, 0.0, 300.0});
}

TEST_CASE("non-numeric classes are skipped with a warning, not an error") {
    MatWriter w;
    w.header();
    w.matrix("keep", ramp(4), 4, 1);
    w.matrix("chars", {65.0, 66.0}, 1, 2, /*cls=*/4);  // mxCHAR

    auto result = matfile::parse_mat(w.bytes);
    CHECK(result.variables.size() == 1);
    CHECK(result.variables.count("keep") == 1);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].variable == "chars");
}

TEST_CASE("header errors carry byte offsets") {
    SECTION("file shorter than the 128-byte header") {
        std::vector<std::uint8_t> tiny(16, 0);
        try {
            matfile::parse_mat(tiny);
            FAIL("expected MatError");
        } catch (const matfile::MatError& e) {
            CHECK(e.offset() == 0);
        }
    }
    SECTION("missing descriptive text") {
        std::vector<std::uint8_t> junk(128, 'x');
        try {
            matfile::parse_mat(junk);
            FAIL("expected MatError");
        } catch (const matfile::MatError& e) {
            CHECK(e.offset() == 0);
            CHECK(std::string(e.what()).find("MATLAB 5.0") != std::string::npos);
        }
    }
    SECTION("bad endianness indicator") {
        MatWriter w;
        w.header();
        w.bytes[126] = 'Q';
        try {
            matfile::parse_mat(w.bytes);
            FAIL("expected MatError");
        } catch (const matfile::MatError& e) {
            CHECK(e.offset() == 126);
        }
    }
}

TEST_CASE("truncated element reports an offset past the header") {
    MatWriter w;
    w.header();
    w.matrix("x", ramp(100), 100, 1);
    w.bytes.resize(w.bytes.size() - 40);  // chop into the data payload
    try {
        matfile::parse_mat(w.bytes);
        FAIL("expected MatError");
    } catch (const matfile::MatError& e) {
        CHECK(e.offset() >= 128);
    }
}

TEST_CASE("element count vs dimensions mismatch is an error") {
    MatWriter w;
    w.header();
    w.matrix("bad", ramp(6), 4, 2);  // claims 8 elements, carries 6
    CHECK_THROWS_AS(matfile::parse_mat(w.bytes), matfile::MatError);
}

TEST_CASE("corrupted compressed payload is a distinct diagnostic") {
    MatWriter w;
    w.header();
    w.compressed_matrix("x", ramp(100), 100, 1);
    w.bytes[140] ^= 0xFF;  // flip a byte inside the deflate stream
    try {
        matfile::parse_mat(w.bytes);
        FAIL("expected MatError");
    } catch (const matfile::MatError& e) {
        CHECK(std::string(e.what()).find("decompress") != std::string::npos);
    }
}

TEST_CASE("parsing is pure: same bytes, same result") {
    MatWriter w;
    w.header();
    w.compressed_matrix("x", ramp(333), 333, 1);
    auto a = matfile::parse_mat(w.bytes);
    auto b = matfile::parse_mat(w.bytes);
    CHECK(a.variables.at("x").data == b.variables.at("x").data);
}

#ifndef CWRU_MATFILE_HPP
#define CWRU_MATFILE_HPP

// Reader for the subset of the MATLAB Level-5 MAT-file format that CWRU
// records use: numeric 2-D arrays (full, real), stored either as plain
// miMATRIX elements or inside zlib-compressed miCOMPRESSED elements.
// Cell arrays, structs, sparse matrices and v7.3 (HDF5) files are out of
// scope and rejected with diagnostics.

#include <cstdint>
#include <cstring>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <zlib.h>

namespace cwru::matfile {

enum class ElementKind { Float64, Float32, Int8, UInt8, Int16, UInt16, Int32, UInt32 };

struct MatVariable {
    std::string name;
    std::vector<std::size_t> shape;   // column-major dimension sizes
    ElementKind element_kind = ElementKind::Float64;
    std::vector<double> data;         // flat, column-major
};

struct ParseWarning {
    std::string variable;
    std::string reason;
};

struct ParseResult {
    std::map<std::string, MatVariable> variables;
    std::vector<ParseWarning> warnings;
};

class MatError : public std::runtime_error {
public:
    MatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

// miTYPE codes from the MAT-file format reference.
enum : std::uint32_t {
    miINT8 = 1, miUINT8 = 2, miINT16 = 3, miUINT16 = 4,
    miINT32 = 5, miUINT32 = 6, miSINGLE = 7, miDOUBLE = 9,
    miINT64 = 12, miUINT64 = 13, miMATRIX = 14, miCOMPRESSED = 15,
    miUTF8 = 16, miUTF16 = 17, miUTF32 = 18,
};

enum : std::uint32_t {
    mxCELL = 1, mxSTRUCT = 2, mxOBJECT = 3, mxCHAR = 4, mxSPARSE = 5,
    mxDOUBLE = 6, mxSINGLE = 7, mxINT8 = 8, mxUINT8 = 9,
    mxINT16 = 10, mxUINT16 = 11, mxINT32 = 12, mxUINT32 = 13,
    mxINT64 = 14, mxUINT64 = 15,
};

class Cursor {
public:
    Cursor(const std::uint8_t* data, std::size_t size, std::size_t base_offset, bool swap)
        : data_(data), size_(size), base_(base_offset), pos_(0), swap_(swap) {}

    std::size_t file_offset() const { return base_ + pos_; }
    std::size_t remaining() const { return size_ - pos_; }
    bool done() const { return pos_ >= size_; }
    bool swap() const { return swap_; }

    const std::uint8_t* raw(std::size_t n) {
        if (remaining() < n) throw MatError("truncated element", file_offset());
        const std::uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }

    std::uint32_t read_u32() {
        const std::uint8_t* p = raw(4);
        std::uint32_t v;
        std::memcpy(&v, p, 4);
        if (swap_) v = __builtin_bswap32(v);
        return v;
    }

    void align8() {
        const std::size_t rem = pos_ % 8;
        if (rem != 0) {
            const std::size_t pad = 8 - rem;
            if (remaining() < pad) pos_ = size_;  // trailing pad may be absent at EOF
            else pos_ += pad;
        }
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t base_;
    std::size_t pos_;
    bool swap_;
};

struct Tag {
    std::uint32_t type = 0;
    std::uint32_t bytes = 0;
    bool small = false;           // small data element: payload packed in the tag
    const std::uint8_t* small_payload = nullptr;
};

inline Tag read_tag(Cursor& cur) {
    Tag t;
    const std::size_t at = cur.file_offset();
    const std::uint8_t* p = cur.raw(8);
    std::uint32_t first;
    std::memcpy(&first, p, 4);
    if (cur.swap()) first = __builtin_bswap32(first);
    if ((first >> 16) != 0) {
        // Small data element: upper 16 bits carry the byte count.
        t.small = true;
        t.type = first & 0xFFFF;
        t.bytes = first >> 16;
        if (t.bytes > 4) throw MatError("small element longer than 4 bytes", at);
        t.small_payload = p + 4;
    } else {
        t.type = first;
        std::uint32_t second;
        std::memcpy(&second, p + 4, 4);
        if (cur.swap()) second = __builtin_bswap32(second);
        t.bytes = second;
    }
    return t;
}

inline std::size_t mi_size(std::uint32_t type, std::size_t offset) {
    switch (type) {
        case miINT8: case miUINT8: return 1;
        case miINT16: case miUINT16: return 2;
        case miINT32: case miUINT32: case miSINGLE: return 4;
        case miDOUBLE: case miINT64: case miUINT64: return 8;
        default:
            throw MatError("unsupported element type " + std::to_string(type) +
                           " inside a numeric matrix", offset);
    }
}

template <typename T>
T load_scalar(const std::uint8_t* p, bool swap) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if (swap) {
        if constexpr (sizeof(T) == 2) {
            std::uint16_t u; std::memcpy(&u, &v, 2); u = __builtin_bswap16(u); std::memcpy(&v, &u, 2);
        } else if constexpr (sizeof(T) == 4) {
            std::uint32_t u; std::memcpy(&u, &v, 4); u = __builtin_bswap32(u); std::memcpy(&v, &u, 4);
        } else if constexpr (sizeof(T) == 8) {
            std::uint64_t u; std::memcpy(&u, &v, 8); u = __builtin_bswap64(u); std::memcpy(&v, &u, 8);
        }
    }
    return v;
}

inline void decode_numeric(std::uint32_t type, const std::uint8_t* p, std::size_t nbytes,
                           bool swap, std::size_t offset, std::vector<double>& out) {
    const std::size_t esz = mi_size(type, offset);
    if (nbytes % esz != 0) throw MatError("numeric payload not a multiple of element size", offset);
    const std::size_t n = nbytes / esz;
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* q = p + i * esz;
        switch (type) {
            case miINT8:   out[i] = static_cast<double>(load_scalar<std::int8_t>(q, swap)); break;
            case miUINT8:  out[i] = static_cast<double>(load_scalar<std::uint8_t>(q, swap)); break;
            case miINT16:  out[i] = static_cast<double>(load_scalar<std::int16_t>(q, swap)); break;
            case miUINT16: out[i] = static_cast<double>(load_scalar<std::uint16_t>(q, swap)); break;
            case miINT32:  out[i] = static_cast<double>(load_scalar<std::int32_t>(q, swap)); break;
            case miUINT32: out[i] = static_cast<double>(load_scalar<std::uint32_t>(q, swap)); break;
            case miSINGLE: out[i] = static_cast<double>(load_scalar<float>(q, swap)); break;
            case miDOUBLE: out[i] = load_scalar<double>(q, swap); break;
            default: throw MatError("unsupported numeric type", offset);
        }
    }
}

inline ElementKind kind_of_class(std::uint32_t cls) {
    switch (cls) {
        case mxDOUBLE: return ElementKind::Float64;
        case mxSINGLE: return ElementKind::Float32;
        case mxINT8: return ElementKind::Int8;
        case mxUINT8: return ElementKind::UInt8;
        case mxINT16: return ElementKind::Int16;
        case mxUINT16: return ElementKind::UInt16;
        case mxINT32: return ElementKind::Int32;
        case mxUINT32: return ElementKind::UInt32;
        default: return ElementKind::Float64;
    }
}

// Parses one miMATRIX payload. Returns false (with a warning) for
// non-numeric classes; throws on structural damage.
inline bool parse_matrix(Cursor cur, MatVariable& out, std::vector<ParseWarning>& warnings) {
    // Array flags subelement (miUINT32, 8 bytes).
    Tag flags_tag = read_tag(cur);
    if (flags_tag.type != miUINT32 || flags_tag.bytes != 8)
        throw MatError("malformed array flags", cur.file_offset());
    std::uint32_t flags = cur.read_u32();
    (void)cur.read_u32();  // nzmax, sparse only
    const std::uint32_t cls = flags & 0xFF;
    const bool complex_flag = (flags & 0x0800) != 0;

    // Dimensions.
    Tag dims_tag = read_tag(cur);
    if (dims_tag.type != miINT32)
        throw MatError("malformed dimensions element", cur.file_offset());
    const std::size_t ndims = dims_tag.bytes / 4;
    std::vector<std::size_t> shape(ndims);
    for (std::size_t i = 0; i < ndims; ++i) {
        const std::int32_t d = static_cast<std::int32_t>(cur.read_u32());
        if (d < 0) throw MatError("negative dimension", cur.file_offset());
        shape[i] = static_cast<std::size_t>(d);
    }
    cur.align8();

    // Name.
    Tag name_tag = read_tag(cur);
    if (name_tag.type != miINT8)
        throw MatError("malformed array name element", cur.file_offset());
    std::string name;
    if (name_tag.small) {
        name.assign(reinterpret_cast<const char*>(name_tag.small_payload), name_tag.bytes);
    } else {
        const std::uint8_t* p = cur.raw(name_tag.bytes);
        name.assign(reinterpret_cast<const char*>(p), name_tag.bytes);
        cur.align8();
    }

    if (cls == mxCELL || cls == mxSTRUCT || cls == mxOBJECT || cls == mxCHAR || cls == mxSPARSE) {
        warnings.push_back({name, "skipped non-numeric variable class " + std::to_string(cls)});
        return false;
    }
    if (complex_flag) {
        warnings.push_back({name, "skipped complex variable"});
        return false;
    }

    // Real part.
    Tag data_tag = read_tag(cur);
    const std::size_t data_off = cur.file_offset();
    if (data_tag.small) {
        decode_numeric(data_tag.type, data_tag.small_payload, data_tag.bytes, cur.swap(),
                       data_off, out.data);
    } else {
        const std::uint8_t* p = cur.raw(data_tag.bytes);
        decode_numeric(data_tag.type, p, data_tag.bytes, cur.swap(), data_off, out.data);
    }

    std::size_t expect = 1;
    for (std::size_t d : shape) expect *= d;
    if (expect != out.data.size())
        throw MatError("element count does not match dimensions for '" + name + "'", data_off);

    out.name = std::move(name);
    out.shape = std::move(shape);
    out.element_kind = kind_of_class(cls);
    if (out.name.empty()) throw MatError("empty variable name", data_off);
    return true;
}

inline std::vector<std::uint8_t> inflate_element(const std::uint8_t* p, std::size_t n,
                                                 std::size_t offset) {
    std::vector<std::uint8_t> out;
    out.reserve(n * 4);
    z_stream zs{};
    if (inflateInit(&zs) != Z_OK) throw MatError("zlib init failure", offset);
    zs.next_in = const_cast<Bytef*>(p);
    zs.avail_in = static_cast<uInt>(n);
    std::uint8_t buf[1 << 15];
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = buf;
        zs.avail_out = sizeof(buf);
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw MatError("decompression failure (zlib rc " + std::to_string(rc) + ")", offset);
        }
        out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw MatError("truncated compressed element", offset);
        }
    }
    inflateEnd(&zs);
    return out;
}

}  // namespace detail

// Parse a complete MAT v5 byte buffer. Pure: same bytes, same result.
inline ParseResult parse_mat(const std::uint8_t* bytes, std::size_t size) {
    using namespace detail;
    if (size < 128) throw MatError("malformed header: file shorter than 128 bytes", 0);
    if (std::memcmp(bytes, "MATLAB 5.0", 10) != 0)
        throw MatError("malformed header: missing 'MATLAB 5.0' descriptive text", 0);

    // Endianness indicator at bytes 126..127: "IM" little-endian, "MI" big-endian.
    bool swap;
    if (bytes[126] == 'I' && bytes[127] == 'M') {
        swap = false;
    } else if (bytes[126] == 'M' && bytes[127] == 'I') {
        swap = true;
    } else {
        throw MatError("malformed header: bad endianness indicator", 126);
    }
    std::uint16_t version;
    std::memcpy(&version, bytes + 124, 2);
    if (swap) version = __builtin_bswap16(version);
    if (version != 0x0100)
        throw MatError("malformed header: unsupported version", 124);

    ParseResult result;
    Cursor cur(bytes + 128, size - 128, 128, swap);
    while (!cur.done()) {
        if (cur.remaining() < 8) break;  // trailing padding
        const std::size_t elem_off = cur.file_offset();
        Tag tag = read_tag(cur);

        if (tag.type == miCOMPRESSED) {
            const std::uint8_t* payload = cur.raw(tag.bytes);
            std::vector<std::uint8_t> inflated = inflate_element(payload, tag.bytes, elem_off);
            Cursor inner(inflated.data(), inflated.size(), elem_off, swap);
            Tag itag = read_tag(inner);
            if (itag.type != miMATRIX) {
                result.warnings.push_back({"", "skipped compressed non-matrix element"});
            } else {
                Cursor body(inflated.data() + 8, std::min<std::size_t>(itag.bytes, inflated.size() - 8),
                            elem_off, swap);
                MatVariable v;
                if (parse_matrix(body, v, result.warnings))
                    result.variables[v.name] = std::move(v);
            }
            cur.align8();
        } else if (tag.type == miMATRIX) {
            const std::uint8_t* payload = cur.raw(tag.bytes);
            Cursor body(payload, tag.bytes, elem_off + 8, swap);
            MatVariable v;
            if (parse_matrix(body, v, result.warnings))
                result.variables[v.name] = std::move(v);
            cur.align8();
        } else {
            result.warnings.push_back({"", "skipped top-level element type " + std::to_string(tag.type)});
            if (!tag.small) {
                cur.raw(tag.bytes);
                cur.align8();
            }
        }
    }
    return result;
}

inline ParseResult parse_mat(const std::vector<std::uint8_t>& bytes) {
    return parse_mat(bytes.data(), bytes.size());
}

}  // namespace cwru::matfile

#endif  // CWRU_MATFILE_HPP

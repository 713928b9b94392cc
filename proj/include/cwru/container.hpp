#ifndef CWRU_CONTAINER_HPP
#define CWRU_CONTAINER_HPP

// Binary container used for feature caches and model checkpoints:
//   bytes 0..3   magic "CWF1"
//   bytes 4..7   little-endian uint32, JSON header length H
//   bytes 8..8+H JSON header (shape, dtype, representation, provenance, ...)
//   rest         little-endian float32 payload

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cwru::container {

inline constexpr char kMagic[4] = {'C', 'W', 'F', '1'};

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

inline void write_file(const std::filesystem::path& path, const nlohmann::json& header,
                       const std::vector<float>& payload) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const std::string h = header.dump();
    const std::uint32_t len = static_cast<std::uint32_t>(h.size());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(float)));
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

struct FilePayload {
    nlohmann::json header;
    std::vector<float> payload;
};

inline FilePayload read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("bad container magic in " + path.string());
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    std::string h(len, '\0');
    in.read(h.data(), len);
    if (!in) throw std::runtime_error("truncated container header in " + path.string());
    FilePayload fp;
    fp.header = nlohmann::json::parse(h);
    std::vector<char> rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (rest.size() % sizeof(float) != 0)
        throw std::runtime_error("payload size not a multiple of 4 in " + path.string());
    fp.payload.resize(rest.size() / sizeof(float));
    std::memcpy(fp.payload.data(), rest.data(), rest.size());
    return fp;
}

}  // namespace cwru::container

#endif  // CWRU_CONTAINER_HPP

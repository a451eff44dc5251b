#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "hep2/nn/params.hpp"

namespace hep2::nn {

namespace {

constexpr char kMagic[4] = {'H', '2', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    put_u32(os, static_cast<std::uint32_t>(v));
    put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

void put_f32(std::ostream& os, float f) { put_u32(os, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& is) {
    const std::uint64_t lo = get_u32(is);
    const std::uint64_t hi = get_u32(is);
    return lo | (hi << 32);
}

float get_f32(std::istream& is) { return std::bit_cast<float>(get_u32(is)); }

}  // namespace

void save_checkpoint(const std::string& path, const NetworkConfig& cfg, const Parameters& p) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write checkpoint: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u64(os, cfg.hash());
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) put_f32(os, p.weights[l][i]);
        for (float b : p.biases[l]) put_f32(os, b);
    }
    if (!os) throw DataError("write failed: " + path);
}

Parameters load_checkpoint(const std::string& path, const NetworkConfig& cfg) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not a checkpoint file (bad magic): " + path);
    const std::uint32_t version = get_u32(is);
    if (version != kVersion)
        throw DataError("unsupported checkpoint version " + std::to_string(version) + ": " +
                        path);
    const std::uint64_t hash = get_u64(is);
    if (hash != cfg.hash())
        throw DataError("checkpoint " + path + " was written for a different network config");

    Parameters p = zero_params<float>(cfg);
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
        for (std::size_t i = 0; i < p.weights[l].size(); ++i) p.weights[l][i] = get_f32(is);
        for (float& b : p.biases[l]) b = get_f32(is);
    }
    if (!is) throw DataError("checkpoint truncated: " + path);
    is.peek();
    if (!is.eof()) throw DataError("checkpoint has trailing bytes: " + path);
    return p;
}

}  // namespace hep2::nn

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "bioadam/error.hpp"
#include "bioadam/net.hpp"

namespace bioadam::net {

namespace {

constexpr std::array<char, 4> kMagic{'B', 'A', 'D', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void read_exact(std::istream& is, unsigned char* dst, std::size_t n) {
    is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is.gcount()) != n) throw IoError("model snapshot is truncated");
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    read_exact(is, b, 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    read_exact(is, b, 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::uint32_t activation_code(Activation a) {
    switch (a) {
        case Activation::relu: return 0;
        case Activation::sigmoid: return 1;
        case Activation::tanh: return 2;
        case Activation::identity: return 3;
    }
    return 3;
}

Activation activation_from_code(std::uint32_t c) {
    switch (c) {
        case 0: return Activation::relu;
        case 1: return Activation::sigmoid;
        case 2: return Activation::tanh;
        case 3: return Activation::identity;
        default: throw FormatError("unknown activation code " + std::to_string(c));
    }
}

}  // namespace

void save_model(const Network& net, std::ostream& os) {
    net.validate();
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, kFormatVersion);
    put_u32(os, static_cast<std::uint32_t>(net.depth()));
    for (const auto& l : net.layers) {
        put_u32(os, static_cast<std::uint32_t>(l.in()));
        put_u32(os, static_cast<std::uint32_t>(l.out()));
        put_u32(os, activation_code(l.activation));
    }
    for (const auto& l : net.layers) {
        for (double v : l.W.data()) put_f64(os, v);
        for (double v : l.B.data()) put_f64(os, v);
        for (double v : l.bias) put_f64(os, v);
    }
    if (!os) throw IoError("failed writing model snapshot");
}

Network load_model(std::istream& is) {
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (is.gcount() != 4) throw IoError("model snapshot is truncated");
    if (magic != kMagic) throw FormatError("not a model snapshot (bad magic)");
    const auto version = get_u32(is);
    if (version != kFormatVersion) {
        throw FormatError("unsupported snapshot version " + std::to_string(version));
    }
    const auto depth = get_u32(is);
    Network net;
    net.layers.resize(depth);
    for (auto& l : net.layers) {
        const auto in = get_u32(is);
        const auto out = get_u32(is);
        l.activation = activation_from_code(get_u32(is));
        l.W = Matrix(out, in);
        l.B = Matrix(out, in);
        l.bias.assign(out, 0.0);
    }
    for (auto& l : net.layers) {
        for (auto& v : l.W.data()) v = get_f64(is);
        for (auto& v : l.B.data()) v = get_f64(is);
        for (auto& v : l.bias) v = get_f64(is);
    }
    net.validate();
    return net;
}

void save_model(const Network& net, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    save_model(net, os);
}

Network load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path + "'");
    return load_model(is);
}

}  // namespace bioadam::net

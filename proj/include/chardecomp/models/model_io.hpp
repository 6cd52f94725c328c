#pragma once

// Model container, all integers and doubles little-endian:
//
//   magic "CHDCMODL" | u32 version | u8 architecture | u32 d2
//   architecture config (CNN: u32 embed_dim, u32 banks, banks x (u32 width, u32 count);
//                        BiLSTM: u32 embed_dim, u32 hidden)
//   schema: str language, u32 classes, classes x (str name, u32 labels, labels x str)
//   vocab:  u32 chars, chars x u32 code point
//   tensors: u32 count, count x (str name, u32 rank, rank x u64 extent, extent product x f64)
//   u64 FNV-1a checksum of every preceding byte
//
// str = u32 byte length + UTF-8 bytes.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>
#include <vector>

#include "chardecomp/error.hpp"
#include "chardecomp/models/model.hpp"

namespace chardecomp {

inline constexpr std::array<char, 8> kModelMagic{'C', 'H', 'D', 'C', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t kModelFormatVersion = 1;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace detail {

class ByteWriter {
public:
    void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.append(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    std::string& bytes() { return out_; }

private:
    std::string out_;
};

class ByteReader {
public:
    explicit ByteReader(std::string_view in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint32_t n = u32();
        return std::string(take(n));
    }
    std::string_view take(std::size_t n) {
        if (n > in_.size() - pos_) throw FormatError("model file truncated");
        auto s = in_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_model(const Model& m) {
    detail::ByteWriter w;
    w.raw(std::string_view(kModelMagic.data(), kModelMagic.size()));
    w.u32(kModelFormatVersion);
    w.u8(m.architecture == Architecture::Cnn ? 0 : 1);
    w.u32(static_cast<std::uint32_t>(m.representation_dim()));
    if (m.architecture == Architecture::Cnn) {
        const auto& c = m.cnn();
        w.u32(static_cast<std::uint32_t>(c.embed_dim()));
        w.u32(static_cast<std::uint32_t>(c.banks.size()));
        for (const auto& b : c.banks) {
            w.u32(static_cast<std::uint32_t>(b.width));
            w.u32(static_cast<std::uint32_t>(b.count()));
        }
    } else {
        w.u32(static_cast<std::uint32_t>(m.bilstm().embed_dim()));
        w.u32(static_cast<std::uint32_t>(m.bilstm().hidden()));
    }
    w.str(m.schema.language);
    w.u32(static_cast<std::uint32_t>(m.schema.classes.size()));
    for (const auto& c : m.schema.classes) {
        w.str(c.name);
        w.u32(static_cast<std::uint32_t>(c.labels.size()));
        for (const auto& l : c.labels) w.str(l);
    }
    w.u32(static_cast<std::uint32_t>(m.vocab.chars().size()));
    for (char32_t c : m.vocab.chars()) w.u32(static_cast<std::uint32_t>(c));
    const auto params = m.parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const Parameter* p : params) {
        w.str(p->name);
        w.u32(static_cast<std::uint32_t>(p->value.rank()));
        for (std::size_t e : p->value.shape()) w.u64(e);
        for (double v : p->value.data()) w.f64(v);
    }
    const std::uint64_t sum = fnv1a64(w.bytes());
    w.u64(sum);
    return std::move(w.bytes());
}

inline Model deserialize_model(std::string_view bytes) {
    if (bytes.size() < kModelMagic.size() ||
        std::memcmp(bytes.data(), kModelMagic.data(), kModelMagic.size()) != 0) {
        throw FormatError("not a model file (bad magic); expected format version " + std::to_string(kModelFormatVersion));
    }
    detail::ByteReader r(bytes);
    r.take(kModelMagic.size());
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion) {
        throw FormatError("unsupported model format version " + std::to_string(version) + " (expected " +
                          std::to_string(kModelFormatVersion) + ")");
    }
    if (bytes.size() < kModelMagic.size() + 12) throw FormatError("model file truncated");
    const std::string_view body = bytes.substr(0, bytes.size() - 8);
    detail::ByteReader tail(bytes.substr(bytes.size() - 8));
    if (fnv1a64(body) != tail.u64()) throw FormatError("model file checksum mismatch");
    r = detail::ByteReader(body);
    r.take(kModelMagic.size() + 4);

    const std::uint8_t arch = r.u8();
    if (arch > 1) throw FormatError("unknown architecture tag " + std::to_string(arch));
    const std::uint32_t d2 = r.u32();
    ModelDims dims;
    if (arch == 0) {
        dims.cnn.embed_dim = r.u32();
        const std::uint32_t banks = r.u32();
        dims.cnn.widths.clear();
        dims.cnn.counts.clear();
        for (std::uint32_t i = 0; i < banks; ++i) {
            dims.cnn.widths.push_back(r.u32());
            dims.cnn.counts.push_back(r.u32());
        }
    } else {
        dims.lstm.embed_dim = r.u32();
        dims.lstm.hidden = r.u32();
    }
    FeatureSchema schema;
    schema.language = r.str();
    const std::uint32_t n_classes = r.u32();
    for (std::uint32_t i = 0; i < n_classes; ++i) {
        FeatureClass c;
        c.name = r.str();
        const std::uint32_t n_labels = r.u32();
        for (std::uint32_t j = 0; j < n_labels; ++j) c.labels.push_back(r.str());
        schema.classes.push_back(std::move(c));
    }
    std::vector<char32_t> chars;
    const std::uint32_t n_chars = r.u32();
    for (std::uint32_t i = 0; i < n_chars; ++i) chars.push_back(static_cast<char32_t>(r.u32()));

    // Build a skeleton with the right shapes, then overwrite every tensor.
    Rng dummy(0);
    Model m = init_model(arch == 0 ? Architecture::Cnn : Architecture::Bilstm, std::move(schema),
                         CharVocab(std::move(chars)), dims, dummy);
    if (m.representation_dim() != d2) throw FormatError("representation dimension does not match architecture");
    auto params = m.parameters();
    if (r.u32() != params.size()) throw FormatError("unexpected tensor count");
    for (Parameter* p : params) {
        const std::string name = r.str();
        if (name != p->name) throw FormatError("expected tensor '" + p->name + "', found '" + name + "'");
        const std::uint32_t rank = r.u32();
        Tensor::Shape shape;
        for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(r.u64());
        if (shape != p->value.shape()) throw FormatError("tensor '" + name + "' has unexpected shape");
        for (double& v : p->value.data()) v = r.f64();
        p->zero_grad();
    }
    if (r.remaining() != 0) throw FormatError("trailing bytes in model file");
    return m;
}

inline void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    const std::string bytes = serialize_model(m);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

inline Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path + "'");
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize_model(bytes);
}

}  // namespace chardecomp

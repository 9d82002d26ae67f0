#pragma once

// k-XORSAT instances and their two on-disk forms.
//
// Binary layout (all multi-byte integers little endian):
//   "KXOR"            4-byte magic
//   u8 version        currently 1
//   u8 model tag      0 unconstrained, 1 constrained, 2 relaxed_C
//   varint k, n, m
//   u64 seed.master, u64 seed.stream
//   rows              m * k varints; within a row the first index is stored
//                     as is and later ones as the gap to their predecessor
//   rhs               ceil(m / 8) bytes, bit i of byte j is rhs[8j + i]

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"
#include "xorlab/gf2.hpp"
#include "xorlab/rng.hpp"

namespace xorlab {

enum class ModelTag : std::uint8_t { unconstrained = 0, constrained = 1, relaxed_C = 2 };

inline std::string to_string(ModelTag t)
{
    switch (t) {
    case ModelTag::unconstrained: return "unconstrained";
    case ModelTag::constrained: return "constrained";
    case ModelTag::relaxed_C: return "relaxed_C";
    }
    throw std::invalid_argument("unknown model tag");
}

inline ModelTag model_tag_from_string(std::string_view s)
{
    if (s == "unconstrained") return ModelTag::unconstrained;
    if (s == "constrained") return ModelTag::constrained;
    if (s == "relaxed_C" || s == "relaxed") return ModelTag::relaxed_C;
    throw std::invalid_argument("unknown model '" + std::string(s) + "'");
}

using Row = std::vector<std::uint32_t>;

struct Instance {
    int k = 0;
    std::size_t n = 0;
    std::size_t m = 0;
    std::vector<Row> rows;
    Bits rhs;
    ModelTag model_tag = ModelTag::unconstrained;
    Seed seed;

    friend bool operator==(const Instance&, const Instance&) = default;
};

// Throws std::invalid_argument describing the first violated invariant.
inline void validate(const Instance& inst)
{
    if (inst.rows.size() != inst.m) throw std::invalid_argument("instance: row count != m");
    if (inst.rhs.size() != inst.m) throw std::invalid_argument("instance: rhs length != m");
    std::vector<std::size_t> degree(inst.n, 0);
    for (std::size_t r = 0; r < inst.m; ++r) {
        const auto& row = inst.rows[r];
        if (row.size() != static_cast<std::size_t>(inst.k)) throw std::invalid_argument("instance: row " + std::to_string(r) + " has wrong length");
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (row[j] >= inst.n) throw std::invalid_argument("instance: index out of range in row " + std::to_string(r));
            // Relaxed rows are multisets, kept sorted but possibly with repeats.
            if (j > 0 && (row[j] < row[j - 1] || (inst.model_tag != ModelTag::relaxed_C && row[j] == row[j - 1]))) {
                throw std::invalid_argument("instance: row " + std::to_string(r) + " is not sorted with distinct indices");
            }
            ++degree[row[j]];
        }
        if (inst.rhs[r] > 1) throw std::invalid_argument("instance: rhs entries must be 0 or 1");
    }
    if (inst.model_tag == ModelTag::constrained) {
        for (std::size_t v = 0; v < inst.n; ++v) {
            if (degree[v] < 2) throw std::invalid_argument("instance: variable " + std::to_string(v) + " has degree < 2");
        }
    }
}

inline std::vector<std::size_t> variable_degrees(const Instance& inst)
{
    std::vector<std::size_t> degree(inst.n, 0);
    for (const auto& row : inst.rows) {
        for (auto v : row) ++degree[v];
    }
    return degree;
}

// Coefficient matrix; repeated indices in relaxed rows cancel in pairs.
inline gf2::BitMatrix to_matrix(const Instance& inst) { return gf2::BitMatrix::from_sparse(inst.n, inst.rows); }

// ---- JSON ----

inline nlohmann::json to_json(const Instance& inst)
{
    return nlohmann::json{
        {"k", inst.k},
        {"n", inst.n},
        {"m", inst.m},
        {"rows", inst.rows},
        {"rhs", inst.rhs},
        {"model_tag", to_string(inst.model_tag)},
        {"seed", {{"master", inst.seed.master}, {"stream", inst.seed.stream}}},
    };
}

inline Instance instance_from_json(const nlohmann::json& j)
{
    Instance inst;
    inst.k = j.at("k").get<int>();
    inst.n = j.at("n").get<std::size_t>();
    inst.m = j.at("m").get<std::size_t>();
    inst.rows = j.at("rows").get<std::vector<Row>>();
    inst.rhs = j.at("rhs").get<Bits>();
    inst.model_tag = model_tag_from_string(j.at("model_tag").get<std::string>());
    if (j.contains("seed")) {
        inst.seed.master = j.at("seed").at("master").get<std::uint64_t>();
        inst.seed.stream = j.at("seed").at("stream").get<std::uint64_t>();
    }
    validate(inst);
    return inst;
}

// ---- binary ----

namespace detail {

inline void put_varint(std::string& out, std::uint64_t v)
{
    while (v >= 0x80) {
        out.push_back(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    out.push_back(static_cast<char>(v));
}

inline void put_u64(std::string& out, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
    explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

    std::uint8_t u8()
    {
        if (pos_ >= bytes_.size()) throw std::invalid_argument("binary instance: truncated input");
        return static_cast<std::uint8_t>(bytes_[pos_++]);
    }
    std::uint64_t u64()
    {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return v;
    }
    std::uint64_t varint()
    {
        std::uint64_t v = 0;
        for (int shift = 0; shift < 64; shift += 7) {
            const std::uint8_t b = u8();
            v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
            if ((b & 0x80) == 0) return v;
        }
        throw std::invalid_argument("binary instance: malformed varint");
    }
    bool at_end() const noexcept { return pos_ == bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline constexpr std::string_view binary_magic = "KXOR";
inline constexpr std::uint8_t binary_version = 1;

inline std::string to_binary(const Instance& inst)
{
    std::string out(binary_magic);
    out.push_back(static_cast<char>(binary_version));
    out.push_back(static_cast<char>(inst.model_tag));
    detail::put_varint(out, static_cast<std::uint64_t>(inst.k));
    detail::put_varint(out, inst.n);
    detail::put_varint(out, inst.m);
    detail::put_u64(out, inst.seed.master);
    detail::put_u64(out, inst.seed.stream);
    for (const auto& row : inst.rows) {
        std::uint32_t prev = 0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            // Relaxed rows may repeat an index, so gaps can be zero but never negative.
            detail::put_varint(out, j == 0 ? row[j] : row[j] - prev);
            prev = row[j];
        }
    }
    std::string packed((inst.m + 7) / 8, '\0');
    for (std::size_t r = 0; r < inst.m; ++r) {
        if (inst.rhs[r]) packed[r / 8] = static_cast<char>(packed[r / 8] | (1 << (r % 8)));
    }
    return out + packed;
}

inline Instance instance_from_binary(std::string_view bytes)
{
    if (bytes.substr(0, binary_magic.size()) != binary_magic) throw std::invalid_argument("binary instance: bad magic");
    detail::ByteReader rd(bytes.substr(binary_magic.size()));
    if (rd.u8() != binary_version) throw std::invalid_argument("binary instance: unsupported version");
    const auto tag = rd.u8();
    if (tag > 2) throw std::invalid_argument("binary instance: bad model tag");
    Instance inst;
    inst.model_tag = static_cast<ModelTag>(tag);
    inst.k = static_cast<int>(rd.varint());
    inst.n = rd.varint();
    inst.m = rd.varint();
    inst.seed.master = rd.u64();
    inst.seed.stream = rd.u64();
    inst.rows.resize(inst.m);
    for (auto& row : inst.rows) {
        row.resize(static_cast<std::size_t>(inst.k));
        std::uint64_t prev = 0;
        for (int j = 0; j < inst.k; ++j) {
            const std::uint64_t v = (j == 0 ? 0 : prev) + rd.varint();
            if (v > UINT32_MAX) throw std::invalid_argument("binary instance: index overflow");
            row[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(v);
            prev = v;
        }
    }
    inst.rhs.assign(inst.m, 0);
    std::uint8_t byte = 0;
    for (std::size_t r = 0; r < inst.m; ++r) {
        if (r % 8 == 0) byte = rd.u8();
        inst.rhs[r] = (byte >> (r % 8)) & 1u;
    }
    if (!rd.at_end()) throw std::invalid_argument("binary instance: trailing bytes");
    validate(inst);
    return inst;
}

// ---- content hash ----

// Hex SHA-1 of "blob <size>\0<bytes>", the object id git assigns to a file.
inline std::string git_blob_hash(std::string_view bytes)
{
    const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr) throw std::runtime_error("git_blob_hash: digest context allocation failed");
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                    EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                    EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                    EVP_DigestFinal_ex(ctx, digest, &len) == 1;
    EVP_MD_CTX_free(ctx);
    if (!ok) throw std::runtime_error("git_blob_hash: SHA-1 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        const unsigned char b = digest[i];
        out.push_back(hex[b >> 4]);
        out.push_back(hex[b & 0xF]);
    }
    return out;
}

// Hash of the canonical binary encoding; equal for equal instances regardless
// of which file format carried them.
inline std::string content_hash(const Instance& inst) { return git_blob_hash(to_binary(inst)); }

// ---- files ----

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path);
}

// Reads either format, detected by the binary magic.
inline Instance load_instance(const std::string& path)
{
    const std::string bytes = read_file(path);
    if (std::string_view(bytes).substr(0, binary_magic.size()) == binary_magic) return instance_from_binary(bytes);
    return instance_from_json(nlohmann::json::parse(bytes));
}

} // namespace xorlab

#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace metatrust {

// Seed used whenever neither --seed nor METATRUST_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 1729;

// ---------------------------------------------------------------------------
// Errors. One exception type per contract failure so callers (and the CLI
// exit-code mapping) can tell them apart without string matching.
// ---------------------------------------------------------------------------

struct MalformedInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchemaViolation : std::runtime_error {
    std::string tag;
    SchemaViolation(std::string tag_name, const std::string& what)
        : std::runtime_error("schema violation in tag '" + tag_name + "': " + what),
          tag(std::move(tag_name)) {}
};

struct DuplicateId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyCorpus : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyVocabulary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RankDeficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingChannel : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateLabels : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CollinearClass : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerticalPlane : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoPlanes : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyKeywordSet : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelVersionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG plumbing. SplitMix64 both as a small generator and as the
// splittable scheme for deriving independent per-record seeds from a master
// seed (mixing is bijective, so distinct streams never collide).
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    return splitmix64(s);
}

// ---------------------------------------------------------------------------
// Text helpers shared by the contextual metrics, the vectorizers and tf-idf.
// ---------------------------------------------------------------------------

// Canonical tokenizer: lowercase ASCII, split on anything that is neither an
// ASCII alphanumeric nor part of a multi-byte UTF-8 sequence, drop empties.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c >= 0x80;
        if (word) {
            cur.push_back(c >= 'A' && c <= 'Z' ? char(c - 'A' + 'a') : char(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline std::string trim(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Shortest round-trip decimal rendering. Every float that ends up in a file
// goes through here so reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace metatrust

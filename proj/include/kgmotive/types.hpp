#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kgmotive {

/// Codelengths are ideal (real-valued) bit counts, never actual bitstreams.
using Bits = double;

/// One directed labeled edge: subject --predicate--> object.
struct Triple {
    uint32_t subject{0};
    uint32_t predicate{0};
    uint32_t object{0};

    friend bool operator==(const Triple&, const Triple&) = default;
    friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Packs a triple into one 64-bit key (21 bits per component is plenty for
/// the graph sizes this tool handles; checked at load time).
constexpr uint64_t pack_triple(const Triple& t) {
    return (uint64_t(t.subject) << 42) | (uint64_t(t.predicate) << 21) | uint64_t(t.object);
}

constexpr uint32_t kMaxIndex = (1u << 21) - 1;

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unreadable or malformed input data (CLI exit code 2).
struct parse_error : error {
    using error::error;
};

/// A pattern that does not resolve or validate (CLI exit code 3).
struct pattern_error : error {
    using error::error;
};

/// A broken internal precondition; indicates a bug (CLI exit code 4).
struct contract_error : error {
    using error::error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw contract_error(what);
}

} // namespace kgmotive

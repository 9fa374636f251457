// Per-component masking of associative arrays. Row and column keys take
// comparable-text schemes (DET, OPE, or CLEAR); values take RND, HOM+, or
// CLEAR. Masking rebuilds the array, so entries land re-sorted in
// ciphertext order; unmasking with the same key set restores the
// original array exactly.
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>

#include "cmd/assoc_array.hpp"
#include "cmd/crypto/keys.hpp"

namespace cmd::crypto {

enum class Scheme { Clear, Det, Ope, Rnd, HomPlus };

std::string_view scheme_name(Scheme s);
Scheme parse_scheme(std::string_view name); // throws ParseError

struct MaskPolicy {
    Scheme rows = Scheme::Det;
    Scheme cols = Scheme::Det;
    Scheme values = Scheme::Clear;

    // Keys must stay comparable text; values must stay cell-shaped.
    void validate() const; // throws PolicyMismatch
    bool operator==(const MaskPolicy&) const = default;
};

struct MaskedArray {
    AssociativeArray payload;
    MaskPolicy policy;
    Salt128 salt{};
};

MaskedArray mask_array(const AssociativeArray& a, const MaskPolicy& policy,
                       const MaskKeySet& keys);
AssociativeArray unmask_array(const MaskedArray& m, const MaskKeySet& keys);

// The single-key transform used for masked queries; byte-identical to
// what mask_array does to each key under the same scheme.
std::string str_mask(std::string_view word, const MaskKeySet& keys, Scheme scheme);

// Policy file: three lines, rows=..., cols=..., values=...
MaskPolicy read_policy(std::istream& in);
void write_policy(std::ostream& out, const MaskPolicy& p);

// Masked-array file: header lines salt=<hex>, policy=<r>,<c>,<v>, then
// triple text.
void write_masked(std::ostream& out, const MaskedArray& m);
MaskedArray read_masked(std::istream& in);

// Just the two header lines; `in` is left at the payload.
std::pair<Salt128, MaskPolicy> read_masked_header(std::istream& in);

} // namespace cmd::crypto

#pragma once

#include <string>
#include <string_view>

namespace cmd::crypto {

// Standard Base64 with '=' padding.
std::string b64_encode(std::string_view bytes);
std::string b64_decode(std::string_view text); // throws ParseError

// Fixed-width encoding of raw bytes using the Base64 character set with
// digits assigned in ASCII order, so the text sorts exactly like the
// bytes. Input length must be a multiple of 3; no padding. Used for
// order-preserving ciphertexts, where sortability is the whole point.
std::string sortable_encode(std::string_view bytes);
std::string sortable_decode(std::string_view text); // throws ParseError

} // namespace cmd::crypto

#include "cmd/crypto/det.hpp"

#include <cstring>

#include "cmd/crypto/base64.hpp"
#include "cmd/error.hpp"

namespace cmd::crypto {

namespace {

std::string pkcs7_pad(std::string_view m) {
    const std::size_t pad = 16 - m.size() % 16;
    std::string out(m);
    out.append(pad, static_cast<char>(pad));
    return out;
}

std::string pkcs7_strip(std::string_view padded) {
    const auto pad = static_cast<std::uint8_t>(padded.back());
    if (pad < 1 || pad > 16 || pad > padded.size())
        throw DecryptFailure("bad padding");
    for (std::size_t i = padded.size() - pad; i < padded.size(); ++i)
        if (static_cast<std::uint8_t>(padded[i]) != pad)
            throw DecryptFailure("bad padding");
    if (padded.size() == pad)
        throw DecryptFailure("padding covers the whole block");
    return std::string(padded.substr(0, padded.size() - pad));
}

Key128 subkey(const Key128& key, std::uint8_t tag) {
    std::uint8_t block[16] = {tag};
    Key128 out;
    aes128_block(key, block, out.data(), true);
    return out;
}

void clamp_ctr(std::uint8_t iv[16]) {
    iv[8] &= 0x7f;
    iv[12] &= 0x7f;
}

std::string siv_tag(const Key128& mac_key, std::string_view padded) {
    const auto h =
        hmac_sha256(std::string_view(reinterpret_cast<const char*>(mac_key.data()), 16), padded);
    return std::string(reinterpret_cast<const char*>(h.data()), 16);
}

} // namespace

std::string det_encrypt(const Key128& key, std::string_view m) {
    if (m.empty())
        throw InvalidValue("deterministic encryption needs a non-empty input");
    std::string padded = pkcs7_pad(m);
    if (padded.size() == 16) {
        std::string ct(16, '\0');
        aes128_block(key, reinterpret_cast<const std::uint8_t*>(padded.data()),
                     reinterpret_cast<std::uint8_t*>(ct.data()), true);
        return ct;
    }
    const Key128 mac_key = subkey(key, 0x00), enc_key = subkey(key, 0x01);
    std::string iv = siv_tag(mac_key, padded);
    std::uint8_t ctr[16];
    std::memcpy(ctr, iv.data(), 16);
    clamp_ctr(ctr);
    aes128_ctr(enc_key, ctr, padded);
    return iv + padded;
}

std::string det_decrypt(const Key128& key, std::string_view ct) {
    if (ct.empty() || ct.size() % 16 != 0)
        throw DecryptFailure("ciphertext length not a multiple of 16");
    if (ct.size() == 16) {
        std::string padded(16, '\0');
        aes128_block(key, reinterpret_cast<const std::uint8_t*>(ct.data()),
                     reinterpret_cast<std::uint8_t*>(padded.data()), false);
        return pkcs7_strip(padded);
    }
    const Key128 mac_key = subkey(key, 0x00), enc_key = subkey(key, 0x01);
    std::uint8_t ctr[16];
    std::memcpy(ctr, ct.data(), 16);
    clamp_ctr(ctr);
    std::string padded(ct.substr(16));
    aes128_ctr(enc_key, ctr, padded);
    if (siv_tag(mac_key, padded) != ct.substr(0, 16))
        throw DecryptFailure("synthetic IV mismatch");
    return pkcs7_strip(padded);
}

std::string det_mask_text(const Key128& key, std::string_view m) {
    const std::string ct = det_encrypt(key, m);
    std::string out;
    out.reserve(ct.size() / 16 * 24);
    for (std::size_t i = 0; i < ct.size(); i += 16)
        out += b64_encode(std::string_view(ct).substr(i, 16));
    return out;
}

std::string det_unmask_text(const Key128& key, std::string_view text) {
    if (text.empty() || text.size() % 24 != 0)
        throw DecryptFailure("masked key has wrong length");
    std::string ct;
    ct.reserve(text.size() / 24 * 16);
    try {
        for (std::size_t i = 0; i < text.size(); i += 24)
            ct += b64_decode(text.substr(i, 24));
    } catch (const ParseError& e) {
        throw DecryptFailure(e.what());
    }
    return det_decrypt(key, ct);
}

} // namespace cmd::crypto

#include "cmd/crypto/primitives.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/kdf.h>
#include <openssl/rand.h>

#include <memory>

#include "cmd/error.hpp"

namespace cmd::crypto {

namespace {

[[noreturn]] void die(const char* what) {
    throw Error(std::string("crypto primitive failed: ") + what);
}

struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using Ctx = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

Ctx make_ctx() {
    Ctx ctx(EVP_CIPHER_CTX_new());
    if (!ctx)
        die("ctx alloc");
    return ctx;
}

} // namespace

std::string random_bytes(std::size_t n) {
    std::string out(n, '\0');
    if (n > 0 && RAND_bytes(reinterpret_cast<unsigned char*>(out.data()),
                            static_cast<int>(n)) != 1)
        die("RAND_bytes");
    return out;
}

Salt128 random_salt() {
    Salt128 s;
    if (RAND_bytes(s.data(), static_cast<int>(s.size())) != 1)
        die("RAND_bytes");
    return s;
}

std::array<std::uint8_t, 32> hmac_sha256(std::string_view key, std::string_view data) {
    std::array<std::uint8_t, 32> out;
    unsigned int len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()),
              reinterpret_cast<const unsigned char*>(data.data()), data.size(), out.data(),
              &len) ||
        len != out.size())
        die("HMAC");
    return out;
}

void aes128_block(const Key128& key, const std::uint8_t in[16], std::uint8_t out[16],
                  bool encrypt) {
    auto ctx = make_ctx();
    if (EVP_CipherInit_ex(ctx.get(), EVP_aes_128_ecb(), nullptr, key.data(), nullptr,
                          encrypt ? 1 : 0) != 1)
        die("ECB init");
    EVP_CIPHER_CTX_set_padding(ctx.get(), 0);
    int n = 0;
    if (EVP_CipherUpdate(ctx.get(), out, &n, in, 16) != 1 || n != 16)
        die("ECB update");
    int fin = 0;
    if (EVP_CipherFinal_ex(ctx.get(), out + n, &fin) != 1 || fin != 0)
        die("ECB final");
}

void aes128_ctr(const Key128& key, const std::uint8_t iv[16], std::string& data) {
    auto ctx = make_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, key.data(), iv) != 1)
        die("CTR init");
    int n = 0;
    auto* p = reinterpret_cast<unsigned char*>(data.data());
    if (EVP_EncryptUpdate(ctx.get(), p, &n, p, static_cast<int>(data.size())) != 1 ||
        static_cast<std::size_t>(n) != data.size())
        die("CTR update");
}

std::string gcm_seal(const Key128& key, std::string_view plaintext) {
    std::string blob = random_bytes(12);
    blob.resize(12 + plaintext.size() + 16);

    auto ctx = make_ctx();
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(),
                           reinterpret_cast<const unsigned char*>(blob.data())) != 1)
        die("GCM init");
    int n = 0;
    auto* ct = reinterpret_cast<unsigned char*>(blob.data() + 12);
    if (EVP_EncryptUpdate(ctx.get(), ct, &n,
                          reinterpret_cast<const unsigned char*>(plaintext.data()),
                          static_cast<int>(plaintext.size())) != 1 ||
        static_cast<std::size_t>(n) != plaintext.size())
        die("GCM update");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), ct + n, &fin) != 1 || fin != 0)
        die("GCM final");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, 16, blob.data() + 12 + n) != 1)
        die("GCM tag");
    return blob;
}

std::string gcm_open(const Key128& key, std::string_view blob) {
    if (blob.size() < 12 + 16)
        throw AuthFailure("ciphertext too short");
    const std::size_t ct_len = blob.size() - 12 - 16;
    std::string out(ct_len, '\0');

    auto ctx = make_ctx();
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(),
                           reinterpret_cast<const unsigned char*>(blob.data())) != 1)
        die("GCM init");
    int n = 0;
    if (EVP_DecryptUpdate(ctx.get(), reinterpret_cast<unsigned char*>(out.data()), &n,
                          reinterpret_cast<const unsigned char*>(blob.data() + 12),
                          static_cast<int>(ct_len)) != 1 ||
        static_cast<std::size_t>(n) != ct_len)
        die("GCM update");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, 16,
                            const_cast<char*>(blob.data()) + 12 + ct_len) != 1)
        die("GCM set tag");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), reinterpret_cast<unsigned char*>(out.data()) + n,
                            &fin) != 1)
        throw AuthFailure("ciphertext authentication failed");
    return out;
}

std::string scrypt_derive(std::string_view password, const Salt128& salt,
                          std::size_t out_len) {
    if (password.empty())
        throw EmptyPassword("password must be non-empty");
    std::string out(out_len, '\0');
    if (EVP_PBE_scrypt(password.data(), password.size(), salt.data(), salt.size(),
                       1 << 14, 8, 1, 0,
                       reinterpret_cast<unsigned char*>(out.data()), out_len) != 1)
        die("scrypt");
    return out;
}

} // namespace cmd::crypto

#include "aead.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace perimeter::aead {

namespace {
constexpr size_t kIvLen = 12;
constexpr size_t kTagLen = 16;
}  // namespace

Bytes seal(const Key& key, RngStream& rng, std::span<const uint8_t> plaintext) {
    Bytes iv = rng.bytes(kIvLen);
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    Bytes out(kIvLen + plaintext.size() + kTagLen);
    std::copy(iv.begin(), iv.end(), out.begin());
    int len = 0;
    bool ok = EVP_EncryptInit_ex(ctx, EVP_aes_128_gcm(), nullptr, key.data(), iv.data()) == 1 &&
              EVP_EncryptUpdate(ctx, out.data() + kIvLen, &len, plaintext.data(),
                                static_cast<int>(plaintext.size())) == 1;
    int fin = 0;
    ok = ok && EVP_EncryptFinal_ex(ctx, out.data() + kIvLen + len, &fin) == 1 &&
         EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_GET_TAG, kTagLen,
                             out.data() + kIvLen + plaintext.size()) == 1;
    EVP_CIPHER_CTX_free(ctx);
    if (!ok) throw std::runtime_error("AEAD seal failed");
    return out;
}

std::optional<Bytes> open(const Key& key, std::span<const uint8_t> sealed) {
    if (sealed.size() < kIvLen + kTagLen) return std::nullopt;
    const size_t ct_len = sealed.size() - kIvLen - kTagLen;
    EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    Bytes plain(ct_len);
    int len = 0;
    uint8_t tag[kTagLen];
    std::copy(sealed.end() - kTagLen, sealed.end(), tag);
    bool ok = EVP_DecryptInit_ex(ctx, EVP_aes_128_gcm(), nullptr, key.data(), sealed.data()) == 1 &&
              (ct_len == 0 ||
               EVP_DecryptUpdate(ctx, plain.data(), &len, sealed.data() + kIvLen,
                                 static_cast<int>(ct_len)) == 1) &&
              EVP_CIPHER_CTX_ctrl(ctx, EVP_CTRL_GCM_SET_TAG, kTagLen, tag) == 1;
    int fin = 0;
    ok = ok && EVP_DecryptFinal_ex(ctx, plain.data() + len, &fin) == 1;
    EVP_CIPHER_CTX_free(ctx);
    if (!ok) return std::nullopt;
    return plain;
}

}  // namespace perimeter::aead

#include "hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace perimeter::hash {

namespace {
thread_local uint64_t g_digest_count = 0;

Digest digest_parts(std::initializer_list<std::span<const uint8_t>> parts) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("DigestInit failed");
    for (auto part : parts)
        if (EVP_DigestUpdate(ctx, part.data(), part.size()) != 1)
            throw std::runtime_error("DigestUpdate failed");
    if (EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != out.size())
        throw std::runtime_error("DigestFinal failed");
    EVP_MD_CTX_free(ctx);
    ++g_digest_count;
    return out;
}
}  // namespace

Digest sha256(std::span<const uint8_t> data) { return digest_parts({data}); }

Digest sha256_cat(std::initializer_list<std::span<const uint8_t>> parts) {
    return digest_parts(parts);
}

Digest prf(std::span<const uint8_t> key, std::initializer_list<std::span<const uint8_t>> parts) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    Digest out{};
    unsigned int len = 0;
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("DigestInit failed");
    EVP_DigestUpdate(ctx, key.data(), key.size());
    for (auto part : parts) EVP_DigestUpdate(ctx, part.data(), part.size());
    if (EVP_DigestFinal_ex(ctx, out.data(), &len) != 1 || len != out.size())
        throw std::runtime_error("DigestFinal failed");
    EVP_MD_CTX_free(ctx);
    ++g_digest_count;
    return out;
}

uint64_t digest_count() { return g_digest_count; }

}  // namespace perimeter::hash

#include "sealmr/crypto.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/rand.h>

#include <cstring>
#include <memory>

namespace sealmr::crypto {

namespace {
struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX *c) const { EVP_CIPHER_CTX_free(c); }
};
}  // namespace

Key128 key_from_hex(const std::string &hex32) {
    Bytes raw = hex_decode(hex32);
    if (raw.size() != 16)
        throw ParseFailure("key must be 32 hex chars (128 bits)");
    Key128 k;
    std::memcpy(k.data(), raw.data(), 16);
    return k;
}

Bytes aes_ctr(const Key128 &key, const Block128 &counter, std::span<const uint8_t> data) {
    Bytes out(data.size());
    if (data.empty())
        return out;
    std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter> ctx(EVP_CIPHER_CTX_new());
    if (!ctx ||
        EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_ctr(), nullptr, key.data(), counter.data()) != 1)
        throw std::runtime_error("AES-CTR init failed");
    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, data.data(), static_cast<int>(data.size())) != 1)
        throw std::runtime_error("AES-CTR update failed");
    int fin = 0;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
        throw std::runtime_error("AES-CTR final failed");
    return out;
}

Block128 auth_tag(const Key128 &key, std::span<const uint8_t> data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int digest_len = 0;
    if (!HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
              digest, &digest_len) ||
        digest_len < 16)
        throw std::runtime_error("HMAC failed");
    Block128 tag;
    std::memcpy(tag.data(), digest, 16);
    return tag;
}

bool tag_equal(const Block128 &a, const Block128 &b) {
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

Bytes random_bytes(size_t n) {
    Bytes b(n);
    if (n > 0 && RAND_bytes(b.data(), static_cast<int>(n)) != 1)
        throw std::runtime_error("RAND_bytes failed");
    return b;
}

NonceSource::NonceSource() {
    Bytes p = random_bytes(prefix_.size());
    std::memcpy(prefix_.data(), p.data(), prefix_.size());
}

Block128 NonceSource::next() {
    Block128 n{};
    std::memcpy(n.data(), prefix_.data(), 8);
    uint32_t c = counter_++;
    n[8] = static_cast<uint8_t>(c >> 24);
    n[9] = static_cast<uint8_t>(c >> 16);
    n[10] = static_cast<uint8_t>(c >> 8);
    n[11] = static_cast<uint8_t>(c);
    // bytes 12..15 stay zero: CTR block counter space
    return n;
}

}  // namespace sealmr::crypto

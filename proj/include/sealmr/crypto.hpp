#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "sealmr/common.hpp"

namespace sealmr::crypto {

using Key128 = std::array<uint8_t, 16>;
using Block128 = std::array<uint8_t, 16>;

Key128 key_from_hex(const std::string &hex32);

/// AES-128 in CTR mode. `counter` is the full 128-bit initial counter block.
/// Encryption and decryption are the same operation.
Bytes aes_ctr(const Key128 &key, const Block128 &counter, std::span<const uint8_t> data);

/// 16-byte authentication tag: HMAC-SHA256 over `data`, truncated.
Block128 auth_tag(const Key128 &key, std::span<const uint8_t> data);

bool tag_equal(const Block128 &a, const Block128 &b);  // constant time

Bytes random_bytes(size_t n);

/// Fresh initial counter blocks for one sender: a random 8-byte prefix fixed
/// at construction, a 4-byte big-endian draw counter, and 4 zero bytes left
/// for the CTR block counter. Draws never repeat within a source.
class NonceSource {
  public:
    NonceSource();
    Block128 next();

  private:
    std::array<uint8_t, 8> prefix_;
    uint32_t counter_ = 0;
};

}  // namespace sealmr::crypto

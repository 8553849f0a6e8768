#pragma once

#include "sealmr/crypto.hpp"
#include "sealmr/message.hpp"

namespace sealmr {

/// The encrypted wire unit. Only the type tag is plaintext; header and payload
/// are AES-128-CTR ciphertexts under separate keys. The auth tag covers the
/// whole frame up to itself and is keyed with the header key, so the router
/// can verify integrity without ever holding the payload key.
struct Envelope {
    uint8_t tag = 0;  // MessageType code or control tag
    Bytes header_ct;
    Bytes payload_ct;
    crypto::Block128 nonce_header{};
    crypto::Block128 nonce_payload{};
    crypto::Block128 auth_tag{};
};

/// Wire frame:
/// [1B tag][4B BE header_ct len][header_ct][4B BE payload_ct len][payload_ct]
/// [16B nonce_header][16B nonce_payload][16B auth_tag]
Bytes encode_envelope(const Envelope &env);
Envelope decode_envelope(const Bytes &frame);  // throws ParseFailure

Envelope seal_envelope(uint8_t tag, const Header &header, const Bytes &payload,
                       const crypto::Key128 &header_key, const crypto::Key128 &payload_key,
                       crypto::NonceSource &nonces);

/// Plaintext framing for the no-crypto baseline: same layout, zero nonces/tag.
Envelope seal_plaintext(uint8_t tag, const Header &header, const Bytes &payload);

std::pair<Header, Bytes> open_envelope(const Envelope &env, const crypto::Key128 &header_key,
                                       const crypto::Key128 &payload_key);
std::pair<Header, Bytes> open_plaintext(const Envelope &env);

/// Verify the tag and decrypt the header only (router path: no payload key).
Header open_header(const Envelope &env, const crypto::Key128 &header_key);
Header open_header_plaintext(const Envelope &env);

}  // namespace sealmr

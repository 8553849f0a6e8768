#include "sealmr/envelope.hpp"

#include <cstring>

namespace sealmr {

namespace {

void put_u32(Bytes &b, uint32_t v) {
    b.push_back(static_cast<uint8_t>(v >> 24));
    b.push_back(static_cast<uint8_t>(v >> 16));
    b.push_back(static_cast<uint8_t>(v >> 8));
    b.push_back(static_cast<uint8_t>(v));
}

crypto::Block128 compute_tag(const Envelope &env, const crypto::Key128 &header_key) {
    Bytes covered;
    covered.reserve(1 + 8 + env.header_ct.size() + env.payload_ct.size() + 32);
    covered.push_back(env.tag);
    put_u32(covered, static_cast<uint32_t>(env.header_ct.size()));
    covered.insert(covered.end(), env.header_ct.begin(), env.header_ct.end());
    put_u32(covered, static_cast<uint32_t>(env.payload_ct.size()));
    covered.insert(covered.end(), env.payload_ct.begin(), env.payload_ct.end());
    covered.insert(covered.end(), env.nonce_header.begin(), env.nonce_header.end());
    covered.insert(covered.end(), env.nonce_payload.begin(), env.nonce_payload.end());
    return crypto::auth_tag(header_key, covered);
}

}  // namespace

Bytes encode_envelope(const Envelope &env) {
    Bytes out;
    out.reserve(1 + 8 + env.header_ct.size() + env.payload_ct.size() + 48);
    out.push_back(env.tag);
    put_u32(out, static_cast<uint32_t>(env.header_ct.size()));
    out.insert(out.end(), env.header_ct.begin(), env.header_ct.end());
    put_u32(out, static_cast<uint32_t>(env.payload_ct.size()));
    out.insert(out.end(), env.payload_ct.begin(), env.payload_ct.end());
    out.insert(out.end(), env.nonce_header.begin(), env.nonce_header.end());
    out.insert(out.end(), env.nonce_payload.begin(), env.nonce_payload.end());
    out.insert(out.end(), env.auth_tag.begin(), env.auth_tag.end());
    return out;
}

Envelope decode_envelope(const Bytes &frame) {
    size_t pos = 0;
    auto need = [&](size_t n) {
        if (pos + n > frame.size())
            throw ParseFailure("envelope truncated");
    };
    auto u32 = [&]() -> uint32_t {
        need(4);
        uint32_t v = static_cast<uint32_t>(frame[pos]) << 24 |
                     static_cast<uint32_t>(frame[pos + 1]) << 16 |
                     static_cast<uint32_t>(frame[pos + 2]) << 8 | frame[pos + 3];
        pos += 4;
        return v;
    };
    Envelope env;
    need(1);
    env.tag = frame[pos++];
    if (!is_message_type(env.tag) && !is_control_tag(env.tag))
        throw UnknownType("unknown envelope tag " + std::to_string(env.tag));
    uint32_t hlen = u32();
    need(hlen);
    env.header_ct.assign(frame.begin() + pos, frame.begin() + pos + hlen);
    pos += hlen;
    uint32_t plen = u32();
    need(plen);
    env.payload_ct.assign(frame.begin() + pos, frame.begin() + pos + plen);
    pos += plen;
    need(48);
    std::memcpy(env.nonce_header.data(), frame.data() + pos, 16);
    std::memcpy(env.nonce_payload.data(), frame.data() + pos + 16, 16);
    std::memcpy(env.auth_tag.data(), frame.data() + pos + 32, 16);
    pos += 48;
    if (pos != frame.size())
        throw ParseFailure("trailing bytes after envelope");
    return env;
}

Envelope seal_envelope(uint8_t tag, const Header &header, const Bytes &payload,
                       const crypto::Key128 &header_key, const crypto::Key128 &payload_key,
                       crypto::NonceSource &nonces) {
    Envelope env;
    env.tag = tag;
    env.nonce_header = nonces.next();
    env.nonce_payload = nonces.next();
    env.header_ct = crypto::aes_ctr(header_key, env.nonce_header, encode_header(header));
    env.payload_ct = crypto::aes_ctr(payload_key, env.nonce_payload, payload);
    env.auth_tag = compute_tag(env, header_key);
    return env;
}

Envelope seal_plaintext(uint8_t tag, const Header &header, const Bytes &payload) {
    Envelope env;
    env.tag = tag;
    env.header_ct = encode_header(header);
    env.payload_ct = payload;
    return env;
}

std::pair<Header, Bytes> open_envelope(const Envelope &env, const crypto::Key128 &header_key,
                                       const crypto::Key128 &payload_key) {
    if (!crypto::tag_equal(env.auth_tag, compute_tag(env, header_key)))
        throw AuthFailure("envelope authentication failed");
    Header h = decode_header(crypto::aes_ctr(header_key, env.nonce_header, env.header_ct));
    Bytes payload = crypto::aes_ctr(payload_key, env.nonce_payload, env.payload_ct);
    return {std::move(h), std::move(payload)};
}

std::pair<Header, Bytes> open_plaintext(const Envelope &env) {
    return {decode_header(env.header_ct), env.payload_ct};
}

Header open_header(const Envelope &env, const crypto::Key128 &header_key) {
    if (!crypto::tag_equal(env.auth_tag, compute_tag(env, header_key)))
        throw AuthFailure("envelope authentication failed");
    return decode_header(crypto::aes_ctr(header_key, env.nonce_header, env.header_ct));
}

Header open_header_plaintext(const Envelope &env) { return decode_header(env.header_ct); }

}  // namespace sealmr

#include <doctest.h>

#include <random>
#include <set>

#include "sealmr/envelope.hpp"

using namespace sealmr;

namespace {

crypto::Key128 test_key(uint8_t fill) {
    crypto::Key128 k;
    k.fill(fill);
    return k;
}

Header random_header(std::mt19937_64 &rng) {
    Header h(static_cast<MessageType>(1 + rng() % 8));
    std::uniform_int_distribution<int> n_attrs(0, 5);
    for (int i = 0, n = n_attrs(rng); i < n; ++i) {
        std::string name = "a" + std::to_string(rng() % 8);
        if (rng() % 2)
            h.set(name, static_cast<int64_t>(rng()) >> (rng() % 48));
        else
            h.set(name, "v" + std::to_string(rng() % 1000));
    }
    return h;
}

}  // namespace

TEST_CASE("header codec roundtrip property") {
    std::mt19937_64 rng(12345);
    for (int i = 0; i < 2000; ++i) {
        Header h = random_header(rng);
        Bytes enc = encode_header(h);
        Header back = decode_header(enc);
        CHECK(back == h);
        CHECK(encode_header(back) == enc);  // canonical: re-encode is identical
    }
}

TEST_CASE("header attributes stay sorted and unique") {
    Header h(MessageType::RESULT);
    h.set("zeta", int64_t{1});
    h.set("alpha", "x");
    h.set("zeta", int64_t{2});  // overwrite, not duplicate
    REQUIRE(h.attributes().size() == 3);  // msg_type + 2
    CHECK(h.attributes()[0].first == "alpha");
    CHECK(h.get_int("zeta") == 2);
    // equal content inserted in different order encodes identically
    Header h2(MessageType::RESULT);
    h2.set("alpha", "x");
    h2.set("zeta", int64_t{2});
    CHECK(encode_header(h) == encode_header(h2));
}

TEST_CASE("header decode rejects malformed input") {
    Header h(MessageType::EOS);
    h.set("k", int64_t{7});
    Bytes enc = encode_header(h);
    Bytes trailing = enc;
    trailing.push_back(0x00);
    CHECK_THROWS_AS(decode_header(trailing), ParseFailure);
    Bytes truncated(enc.begin(), enc.end() - 1);
    CHECK_THROWS_AS(decode_header(truncated), ParseFailure);
    CHECK_THROWS_AS(decode_header(Bytes{}), ParseFailure);
}

TEST_CASE("envelope frame roundtrip and malformed frames") {
    Envelope env;
    env.tag = static_cast<uint8_t>(MessageType::MAP_DATATYPE);
    env.header_ct = {1, 2, 3};
    env.payload_ct = {9, 8, 7, 6};
    env.nonce_header.fill(0xAA);
    env.nonce_payload.fill(0xBB);
    env.auth_tag.fill(0xCC);
    Bytes frame = encode_envelope(env);
    // layout: tag + 2 length prefixes + bodies + 3 x 16-byte blocks
    CHECK(frame.size() == 1 + 4 + 3 + 4 + 4 + 48);
    Envelope back = decode_envelope(frame);
    CHECK(back.tag == env.tag);
    CHECK(back.header_ct == env.header_ct);
    CHECK(back.payload_ct == env.payload_ct);
    CHECK(back.auth_tag == env.auth_tag);

    Bytes bad_tag = frame;
    bad_tag[0] = 0x55;  // neither MessageType nor control tag
    CHECK_THROWS_AS(decode_envelope(bad_tag), ParseFailure);
    Bytes truncated(frame.begin(), frame.end() - 1);
    CHECK_THROWS_AS(decode_envelope(truncated), ParseFailure);
    Bytes padded = frame;
    padded.push_back(0);
    CHECK_THROWS_AS(decode_envelope(padded), ParseFailure);
}

TEST_CASE("AES-CTR known-answer vectors") {
    // Frozen from an independent AES implementation (128-bit key CTR vectors).
    auto key = crypto::key_from_hex("2b7e151628aed2a6abf7158809cf4f3c");
    Bytes ctr_bytes = hex_decode("f0f1f2f3f4f5f6f7f8f9fafbfcfdfeff");
    crypto::Block128 ctr;
    std::copy(ctr_bytes.begin(), ctr_bytes.end(), ctr.begin());
    Bytes pt = hex_decode(
        "6bc1bee22e409f96e93d7e117393172a"
        "ae2d8a571e03ac9c9eb76fac45af8e51"
        "30c81c46a35ce411e5fbc1191a0a52ef"
        "f69f2445df4f9b17ad2b417be66c3710");
    Bytes expected_ct = hex_decode(
        "874d6191b620e3261bef6864990db6ce"
        "9806f66b7970fdff8617187bb9fffdff"
        "5ae4df3edbd5d35e5b4f09020db03eab"
        "1e031dda2fbe03d1792170a0f3009cee");
    Bytes ct = crypto::aes_ctr(key, ctr, pt);
    CHECK(hex_encode(ct) == hex_encode(expected_ct));
    CHECK(hex_encode(crypto::aes_ctr(key, ctr, ct)) == hex_encode(pt));  // involution
    // partial-block input
    Bytes pt7(pt.begin(), pt.begin() + 7);
    CHECK(hex_encode(crypto::aes_ctr(key, ctr, pt7)) ==
          hex_encode(Bytes(expected_ct.begin(), expected_ct.begin() + 7)));
}

TEST_CASE("sealed envelope roundtrip and tag keying") {
    auto hk = test_key(0x11), pk = test_key(0x22);
    crypto::NonceSource nonces;
    Header h(MessageType::RESULT);
    h.set("job_id", "j1");
    Bytes payload = to_bytes(R"({"key":"alpha","value":3})");

    Envelope env = seal_envelope(static_cast<uint8_t>(MessageType::RESULT), h, payload, hk, pk,
                                 nonces);
    auto [h2, p2] = open_envelope(env, hk, pk);
    CHECK(h2 == h);
    CHECK(p2 == payload);
    CHECK(open_header(env, hk) == h);
    // ciphertext actually differs from plaintext
    CHECK(env.payload_ct != payload);
    // wrong header key: authentication fails before any decryption
    CHECK_THROWS_AS(open_envelope(env, pk, pk), AuthFailure);
}

TEST_CASE("every single-byte corruption of a frame is rejected") {
    auto hk = test_key(0x31), pk = test_key(0x42);
    crypto::NonceSource nonces;
    Header h(MessageType::REDUCE_DATATYPE);
    h.set("job_id", "job-7");
    h.set("dest_id", int64_t{3});
    Bytes payload = to_bytes(R"({"key":"k","values":[1,2,3]})");
    Envelope env = seal_envelope(static_cast<uint8_t>(MessageType::REDUCE_DATATYPE), h, payload,
                                 hk, pk, nonces);
    Bytes frame = encode_envelope(env);

    int rejected = 0;
    for (size_t i = 0; i < frame.size(); ++i) {
        Bytes mutated = frame;
        mutated[i] ^= 0x01;
        try {
            Envelope e = decode_envelope(mutated);
            open_envelope(e, hk, pk);
        } catch (const ParseFailure &) {
            rejected++;
            continue;
        } catch (const AuthFailure &) {
            rejected++;
            continue;
        }
    }
    CHECK(rejected == static_cast<int>(frame.size()));
}

TEST_CASE("plaintext framing carries zero nonces and tag") {
    Header h(MessageType::EOS);
    h.set("stage", "map");
    Envelope env = seal_plaintext(static_cast<uint8_t>(MessageType::EOS), h, to_bytes("x"));
    CHECK(env.nonce_header == crypto::Block128{});
    CHECK(env.auth_tag == crypto::Block128{});
    auto [h2, p2] = open_plaintext(env);
    CHECK(h2 == h);
    CHECK(p2 == to_bytes("x"));
    CHECK(open_header_plaintext(env) == h);
}

TEST_CASE("nonce source never repeats and encrypts identical frames differently") {
    crypto::NonceSource ns;
    std::set<Bytes> seen;
    for (int i = 0; i < 1000; ++i) {
        auto b = ns.next();
        CHECK(seen.insert(Bytes(b.begin(), b.end())).second);
        // low 4 bytes reserved for the CTR block counter
        CHECK(b[12] == 0);
        CHECK(b[15] == 0);
    }

    auto hk = test_key(0x01), pk = test_key(0x02);
    crypto::NonceSource n2;
    Header h(MessageType::RESULT);
    Bytes payload = to_bytes("same plaintext");
    auto e1 = seal_envelope(8, h, payload, hk, pk, n2);
    auto e2 = seal_envelope(8, h, payload, hk, pk, n2);
    CHECK(e1.payload_ct != e2.payload_ct);
}

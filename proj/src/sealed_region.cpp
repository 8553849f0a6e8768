#include "sealmr/sealed_region.hpp"

#include <chrono>
#include <cstdlib>

namespace sealmr {

namespace {
// Deployment-static keys standing in for the out-of-scope provisioning
// protocol; override via SEALMR_HEADER_KEY / SEALMR_PAYLOAD_KEY.
constexpr const char *kDefaultHeaderKey = "8f3a1c5be90274d6110fedcba9876543";
constexpr const char *kDefaultPayloadKey = "02468ace13579bdffdb97531eca86420";

uint64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}
}  // namespace

SealMode seal_mode_from_string(const std::string &s) {
    if (s == "sealed") return SealMode::SEALED;
    if (s == "crypto-only") return SealMode::PASSTHROUGH_CRYPTO;
    if (s == "plain") return SealMode::PASSTHROUGH_NOCRYPTO;
    if (s == "sealed-plain") return SealMode::SEALED_NOCRYPTO;
    throw ParseFailure("unknown seal mode: " + s);
}

const std::string &seal_mode_name(SealMode m) {
    static const std::string names[] = {"sealed", "crypto-only", "plain", "sealed-plain"};
    switch (m) {
        case SealMode::SEALED: return names[0];
        case SealMode::PASSTHROUGH_CRYPTO: return names[1];
        case SealMode::PASSTHROUGH_NOCRYPTO: return names[2];
        case SealMode::SEALED_NOCRYPTO: return names[3];
    }
    throw std::logic_error("bad seal mode");
}

bool mode_uses_crypto(SealMode m) {
    return m == SealMode::SEALED || m == SealMode::PASSTHROUGH_CRYPTO;
}

bool mode_uses_region(SealMode m) {
    return m == SealMode::SEALED || m == SealMode::SEALED_NOCRYPTO;
}

SealedContext::SealedContext(SealMode mode, std::string region_id,
                             const std::string &header_key_hex,
                             std::optional<std::string> payload_key_hex)
    : mode_(mode), region_id_(std::move(region_id)),
      header_key_(crypto::key_from_hex(header_key_hex)) {
    if (payload_key_hex)
        payload_key_ = crypto::key_from_hex(*payload_key_hex);
}

SealedContext SealedContext::from_env(SealMode mode, std::string region_id, bool with_payload_key) {
    const char *hk = std::getenv("SEALMR_HEADER_KEY");
    const char *pk = std::getenv("SEALMR_PAYLOAD_KEY");
    std::optional<std::string> payload;
    if (with_payload_key)
        payload = pk ? pk : kDefaultPayloadKey;
    return SealedContext(mode, std::move(region_id), hk ? hk : kDefaultHeaderKey, payload);
}

Envelope SealedContext::seal(uint8_t tag, const Header &header, const Bytes &payload) {
    uint64_t t0 = now_ns();
    Envelope env;
    if (crypto_enabled()) {
        // Control frames carry their body under the header key so the router
        // can read them; data frames use the payload key.
        const crypto::Key128 &pk =
            is_control_tag(tag) ? header_key_ : payload_key_.value_or(header_key_);
        if (!is_control_tag(tag) && !payload_key_ && !payload.empty())
            throw std::logic_error("sealing a payload without a payload key");
        env = seal_envelope(tag, header, payload, header_key_, pk, nonces_);
    } else {
        env = seal_plaintext(tag, header, payload);
    }
    metrics_.bytes_sealed += payload.size();
    metrics_.ns_inside += now_ns() - t0;
    return env;
}

std::pair<Header, Bytes> SealedContext::unseal(const Envelope &env) {
    uint64_t t0 = now_ns();
    std::pair<Header, Bytes> result;
    if (crypto_enabled()) {
        const crypto::Key128 &pk =
            is_control_tag(env.tag) ? header_key_ : payload_key_.value_or(header_key_);
        if (!is_control_tag(env.tag) && !payload_key_)
            throw std::logic_error("unsealing a payload without a payload key");
        result = open_envelope(env, header_key_, pk);
    } else {
        result = open_plaintext(env);
    }
    metrics_.bytes_unsealed += result.second.size();
    metrics_.ns_inside += now_ns() - t0;
    return result;
}

Header SealedContext::unseal_header(const Envelope &env) {
    uint64_t t0 = now_ns();
    Header h = crypto_enabled() ? open_header(env, header_key_) : open_header_plaintext(env);
    metrics_.bytes_unsealed += env.header_ct.size();
    metrics_.ns_inside += now_ns() - t0;
    return h;
}

std::vector<Envelope> SealedContext::enter(const Envelope &env, const RegionFn &f) {
    metrics_.entries++;
    auto [header, payload] = unseal(env);  // AuthFailure/ParseFailure propagate
    Emit emit;
    uint64_t t0 = now_ns();
    try {
        f(header, payload, emit);
    } catch (const std::exception &e) {
        metrics_.ns_inside += now_ns() - t0;
        throw RegionFault(std::string("region function failed: ") + e.what());
    }
    metrics_.ns_inside += now_ns() - t0;
    std::vector<Envelope> sealed;
    sealed.reserve(emit.out.size());
    for (auto &[tag, h, p] : emit.out)
        sealed.push_back(seal(tag, h, p));
    return sealed;
}

}  // namespace sealmr

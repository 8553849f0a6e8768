#pragma once

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sealmr/envelope.hpp"

namespace sealmr {

/// SEALED             full behavior: guarded context + encrypted wire
/// PASSTHROUGH_CRYPTO encrypted wire without guarded-context bookkeeping
/// PASSTHROUGH_NOCRYPTO plaintext wire (native baseline)
/// SEALED_NOCRYPTO    guarded context over a plaintext wire; completes the
///                    on/off matrix the bench harness measures
enum class SealMode { SEALED, PASSTHROUGH_CRYPTO, PASSTHROUGH_NOCRYPTO, SEALED_NOCRYPTO };

SealMode seal_mode_from_string(const std::string &s);  // sealed|crypto-only|plain|sealed-plain
const std::string &seal_mode_name(SealMode m);
bool mode_uses_crypto(SealMode m);
bool mode_uses_region(SealMode m);

struct RegionMetrics {
    std::atomic<uint64_t> entries{0};
    std::atomic<uint64_t> bytes_sealed{0};
    std::atomic<uint64_t> bytes_unsealed{0};
    std::atomic<uint64_t> ns_inside{0};
    std::atomic<uint64_t> auth_failures{0};
};

/// Simulated enclave boundary. Key material lives only inside; nothing on the
/// public surface returns it. The router's context is constructed without a
/// payload key and can therefore only open headers.
class SealedContext {
  public:
    struct Emit {
        std::vector<std::tuple<uint8_t, Header, Bytes>> out;
        void envelope(uint8_t tag, Header h, Bytes payload) {
            out.emplace_back(tag, std::move(h), std::move(payload));
        }
    };
    using RegionFn = std::function<void(Header &, Bytes &, Emit &)>;

    SealedContext(SealMode mode, std::string region_id, const std::string &header_key_hex,
                  std::optional<std::string> payload_key_hex);

    /// Keys from SEALMR_HEADER_KEY / SEALMR_PAYLOAD_KEY, with deployment-static
    /// defaults when unset.
    static SealedContext from_env(SealMode mode, std::string region_id, bool with_payload_key);

    Envelope seal(uint8_t tag, const Header &header, const Bytes &payload);
    std::pair<Header, Bytes> unseal(const Envelope &env);
    Header unseal_header(const Envelope &env);

    /// Runs `f` with plaintext access; everything it emits comes back sealed.
    /// Internal errors in `f` surface as RegionFault with nothing emitted.
    std::vector<Envelope> enter(const Envelope &env, const RegionFn &f);

    SealMode mode() const { return mode_; }
    bool crypto_enabled() const { return mode_uses_crypto(mode_); }
    const std::string &region_id() const { return region_id_; }
    bool has_payload_key() const { return payload_key_.has_value(); }
    const RegionMetrics &metrics() const { return metrics_; }
    void count_auth_failure() { metrics_.auth_failures++; }

  private:
    SealMode mode_;
    std::string region_id_;
    crypto::Key128 header_key_;
    std::optional<crypto::Key128> payload_key_;
    crypto::NonceSource nonces_;
    RegionMetrics metrics_;
};

}  // namespace sealmr

#pragma once

#include <atomic>
#include <memory>
#include <unordered_map>

#include "sealmr/sealed_region.hpp"
#include "sealmr/subscription.hpp"
#include "sealmr/transport.hpp"

namespace sealmr {

struct RouterStats {
    std::atomic<uint64_t> registrations{0};
    std::atomic<uint64_t> unregistrations{0};
    std::atomic<uint64_t> matched{0};
    std::atomic<uint64_t> forwards{0};
    std::atomic<uint64_t> dropped_no_match{0};
    std::atomic<uint64_t> dead_connections{0};
    std::atomic<uint64_t> auth_failures{0};
    std::atomic<uint64_t> parse_failures{0};
};

/// Content-based routing engine: subscriptions live inside the sealed region, matching
/// runs over decrypted headers, payload ciphertext is forwarded untouched
/// (the router is constructed without the payload key).
class Router {
  public:
    explicit Router(SealMode mode);

    /// Single-threaded event loop; returns when `stop` becomes true.
    void run(transport::Listener &listener, std::atomic<bool> &stop);

    const RouterStats &stats() const { return stats_; }
    const RegionMetrics &region_metrics() const { return ctx_.metrics(); }
    std::string stats_json() const;

  private:
    struct Peer {
        transport::Conn conn;
        std::string node_id;
        bool dead = false;
        explicit Peer(transport::Conn c) : conn(std::move(c)) {}
    };

    void handle_frame(Peer &peer, const Bytes &frame);
    void handle_control(Peer &peer, const Envelope &env);
    void publish(const Envelope &env, const Bytes &frame);

    SealedContext ctx_;
    SubscriptionStore store_;
    RouterStats stats_;
    std::vector<std::unique_ptr<Peer>> peers_;
    std::unordered_map<std::string, Peer *> by_node_;
};

}  // namespace sealmr

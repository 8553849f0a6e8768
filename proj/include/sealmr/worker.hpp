#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <optional>

#include "sealmr/script_host.hpp"
#include "sealmr/sealed_region.hpp"
#include "sealmr/transport.hpp"

namespace sealmr {

struct WorkerConfig {
    std::string node_id;
    std::vector<Role> roles;
    SealMode mode = SealMode::SEALED;
    uint64_t script_budget = 50'000'000;
};

/// End-of-stream accounting: reducers wait for one EOS per mapper, mappers
/// for the single client data stream.
struct EosLedger {
    int64_t expected = 1;
    int64_t received = 0;
    bool complete() const { return received >= expected; }
};

/// Protocol logic of a worker, independent of sockets: feed it unsealed-able
/// envelopes, get back envelopes to publish. One job at a time; the first
/// code package binds the worker to its job until process exit.
class WorkerCore {
  public:
    explicit WorkerCore(const WorkerConfig &cfg);

    /// HELLO plus the JOB_OPENING subscription, sent once after connecting.
    std::vector<Envelope> hello_frames();

    std::vector<Envelope> handle(const Envelope &env, size_t frame_size);

    const std::string &node_id() const { return cfg_.node_id; }
    const std::optional<std::string> &bound_job() const { return bound_job_; }
    uint64_t faults() const { return faults_; }
    const RegionMetrics &region_metrics() const { return ctx_.metrics(); }

  private:
    std::vector<Envelope> on_job_opening(const Header &h);
    void on_code(Role role, const Header &h, const Bytes &payload);
    void on_map_data(const Bytes &payload);
    std::vector<Envelope> on_map_eos();
    void on_reduce_data(const Bytes &payload, size_t frame_size);
    std::vector<Envelope> on_reduce_eos();

    std::string details_payload(const std::string &job_id, Role role) const;

    WorkerConfig cfg_;
    SealedContext ctx_;
    std::optional<std::string> bound_job_;
    Role active_role_ = Role::MAPPER;
    std::unique_ptr<ScriptHost> host_;
    int64_t peer_count_ = 1;
    uint64_t faults_ = 0;

    // mapper: staged emissions grouped by key, key order = first emission
    std::vector<std::string> staged_order_;
    std::map<std::string, std::vector<nlohmann::json>> staged_;
    std::map<std::string, int64_t> dest_cache_;

    // reducer
    std::vector<std::string> group_order_;
    std::map<std::string, std::vector<nlohmann::json>> groups_;
    EosLedger ledger_;
    uint64_t rx_shuffle_bytes_ = 0;
};

/// Socket shell around WorkerCore.
class Worker {
  public:
    Worker(std::string router_host, uint16_t router_port, WorkerConfig cfg);
    void run(std::atomic<bool> &stop);
    WorkerCore &core() { return core_; }

  private:
    std::string host_;
    uint16_t port_;
    WorkerCore core_;
};

}  // namespace sealmr

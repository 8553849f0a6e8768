#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sealmr/kmeans.hpp"
#include "sealmr/metrics.hpp"
#include "sealmr/sealed_region.hpp"
#include "sealmr/transport.hpp"

namespace sealmr {

struct JobSpec {
    std::string job_id;
    std::string map_script;
    std::string reduce_script;
    int n_mappers = 1;
    int n_reducers = 1;
    std::vector<std::string> input_lines;
    bool iterative = false;
    std::string shared_state_json;  // present iff iterative
};

struct HiredWorker {
    std::string worker_id;
    std::vector<std::string> subscription_templates;  // JSON, dest placeholder unresolved
};

struct JobRun {
    std::vector<HiredWorker> hired_mappers;
    std::vector<HiredWorker> hired_reducers;
    std::map<std::string, nlohmann::json> results;
    int eos_from_reducers = 0;
    uint64_t split_bytes = 0;
    uint64_t shuffle_bytes = 0;
    uint64_t output_bytes = 0;
};

struct KmeansOutcome {
    std::vector<Point> centers;
    int iterations = 0;
    std::vector<std::vector<Point>> center_history;  // per-iteration new centers
    std::vector<MetricsRow> metrics;
};

/// The client process: opens jobs, hires workers, provisions code and data,
/// collects results, and drives iterative jobs.
class Client {
  public:
    Client(const std::string &router_host, uint16_t router_port, SealMode mode,
           std::string node_id = "client");

    /// Publishes JOB_OPENING (re-advertised until filled), hires volunteers
    /// first-come-first-served, and registers their subscriptions.
    JobRun open_job(const JobSpec &spec, int hiring_timeout_ms = 30000);

    /// Code to every hired worker, then input lines round-robin, then EOS.
    void provision(JobRun &run, const JobSpec &spec);

    /// Blocks until one EOS per reducer; returns the merged result map.
    std::map<std::string, nlohmann::json> collect(JobRun &run, const JobSpec &spec,
                                                  int result_timeout_ms = 120000);

    /// open + provision + collect.
    std::map<std::string, nlohmann::json> run_job(const JobSpec &spec, JobRun *run_out = nullptr);

    KmeansOutcome run_iterative_kmeans(const std::vector<Point> &points, int k,
                                       std::vector<Point> init_centers, double threshold_fraction,
                                       int n_mappers, int n_reducers,
                                       const std::string &map_script,
                                       const std::string &reduce_script, int max_iterations = 500);

    const RegionMetrics &region_metrics() const { return ctx_.metrics(); }
    SealMode mode() const { return ctx_.mode(); }

  private:
    void subscribe_own(const std::string &job_id);
    void publish(uint8_t tag, const Header &h, const Bytes &payload, uint64_t *bytes_out = nullptr);
    void register_subscription(const std::string &sub_template_json,
                               std::optional<int64_t> dest_id);

    transport::Conn conn_;
    SealedContext ctx_;
    std::string node_id_;
    std::string subscribed_job_;
};

}  // namespace sealmr

#include "sealmr/client.hpp"

#include <chrono>
#include <cmath>

#include "sealmr/script_host.hpp"
#include "sealmr/subscription.hpp"

namespace sealmr {

namespace {

using Clock = std::chrono::steady_clock;

int64_t random_id() {
    Bytes b = crypto::random_bytes(8);
    uint64_t v = 0;
    for (uint8_t c : b)
        v = v << 8 | c;
    return static_cast<int64_t>(v & 0x7fffffffffffffffull);
}

constexpr const char *kDestPlaceholder = "__DEST__";

nlohmann::json parse_json(const Bytes &payload) {
    nlohmann::json j = nlohmann::json::parse(payload.begin(), payload.end(), nullptr, false);
    if (j.is_discarded())
        throw ParseFailure("payload is not valid JSON");
    return j;
}

}  // namespace

Client::Client(const std::string &router_host, uint16_t router_port, SealMode mode,
               std::string node_id)
    : conn_(transport::Conn::connect(router_host, router_port)),
      ctx_(SealedContext::from_env(mode, node_id, /*with_payload_key=*/true)),
      node_id_(std::move(node_id)) {
    Header hello;
    hello.set("node_id", node_id_);
    conn_.write_frame(encode_envelope(ctx_.seal(kTagHello, hello, {})));
    conn_.flush();
}

void Client::publish(uint8_t tag, const Header &h, const Bytes &payload, uint64_t *bytes_out) {
    Bytes frame = encode_envelope(ctx_.seal(tag, h, payload));
    if (bytes_out)
        *bytes_out += frame.size() + 4;
    conn_.write_frame(frame);
}

void Client::register_subscription(const std::string &sub_template_json,
                                   std::optional<int64_t> dest_id) {
    Subscription sub = subscription_from_json(sub_template_json);
    for (auto &c : sub.constraints) {
        if (std::holds_alternative<std::string>(c.value) &&
            std::get<std::string>(c.value) == kDestPlaceholder) {
            if (!dest_id)
                throw ParseFailure("subscription template needs a dest_id");
            c.value = *dest_id;
        }
    }
    Header h;
    h.set("node_id", node_id_);
    publish(kTagSubscribe, h, to_bytes(subscription_to_json(sub)));
}

void Client::subscribe_own(const std::string &job_id) {
    if (subscribed_job_ == job_id)
        return;
    auto sub = [&](std::vector<Constraint> cs) {
        Subscription s;
        s.sub_id = random_id();
        s.owner = node_id_;
        s.constraints = std::move(cs);
        Header h;
        h.set("node_id", node_id_);
        publish(kTagSubscribe, h, to_bytes(subscription_to_json(s)));
    };
    sub({{"msg_type", ConstraintOp::EQ, message_type_name(MessageType::JOB_DETAILS)},
         {"job_id", ConstraintOp::EQ, job_id}});
    sub({{"msg_type", ConstraintOp::EQ, message_type_name(MessageType::RESULT)},
         {"job_id", ConstraintOp::EQ, job_id}});
    sub({{"msg_type", ConstraintOp::EQ, message_type_name(MessageType::EOS)},
         {"job_id", ConstraintOp::EQ, job_id},
         {"stage", ConstraintOp::EQ, std::string("result")}});
    conn_.flush();
    subscribed_job_ = job_id;
}

JobRun Client::open_job(const JobSpec &spec, int hiring_timeout_ms) {
    if (spec.n_mappers < 1 || spec.n_reducers < 1)
        throw ParseFailure("job needs at least one mapper and one reducer");
    if (spec.map_script.empty() || spec.reduce_script.empty())
        throw ParseFailure("job scripts must be non-empty");
    subscribe_own(spec.job_id);

    JobRun run;
    std::set<std::string> seen;
    auto deadline = Clock::now() + std::chrono::milliseconds(hiring_timeout_ms);
    auto next_advert = Clock::now();

    while (static_cast<int>(run.hired_mappers.size()) < spec.n_mappers ||
           static_cast<int>(run.hired_reducers.size()) < spec.n_reducers) {
        if (Clock::now() >= deadline)
            throw HiringTimeout("not enough volunteers for job " + spec.job_id);
        if (Clock::now() >= next_advert) {
            // re-advertised until filled; workers that join late would
            // otherwise never see the opening (pure pub/sub, no replay)
            Header h(MessageType::JOB_OPENING);
            h.set("job_id", spec.job_id);
            h.set("n_mappers", static_cast<int64_t>(spec.n_mappers));
            h.set("n_reducers", static_cast<int64_t>(spec.n_reducers));
            publish(static_cast<uint8_t>(MessageType::JOB_OPENING), h, {});
            conn_.flush();
            next_advert = Clock::now() + std::chrono::milliseconds(300);
        }
        auto frame = conn_.read_frame_timeout(50);
        if (!frame)
            continue;
        try {
            Envelope env = decode_envelope(*frame);
            auto [h, payload] = ctx_.unseal(env);
            if (h.msg_type() != MessageType::JOB_DETAILS || h.get_str("job_id") != spec.job_id)
                continue;
            nlohmann::json j = parse_json(payload);
            std::string worker_id = j.at("worker_id").get<std::string>();
            if (!seen.insert(worker_id).second)
                continue;
            HiredWorker w;
            w.worker_id = worker_id;
            for (const auto &s : j.at("subscriptions"))
                w.subscription_templates.push_back(s.dump());
            Role role = role_from_string(j.at("role").get<std::string>());
            if (role == Role::MAPPER &&
                static_cast<int>(run.hired_mappers.size()) < spec.n_mappers)
                run.hired_mappers.push_back(std::move(w));
            else if (role == Role::REDUCER &&
                     static_cast<int>(run.hired_reducers.size()) < spec.n_reducers)
                run.hired_reducers.push_back(std::move(w));
            // surplus volunteers are never contacted
        } catch (const std::exception &) {
            continue;
        }
    }

    // register code/data subscriptions on each hired worker's behalf
    for (size_t i = 0; i < run.hired_mappers.size(); ++i)
        for (const auto &t : run.hired_mappers[i].subscription_templates)
            register_subscription(t, static_cast<int64_t>(i));
    for (size_t i = 0; i < run.hired_reducers.size(); ++i)
        for (const auto &t : run.hired_reducers[i].subscription_templates)
            register_subscription(t, static_cast<int64_t>(i));
    conn_.flush();
    return run;
}

void Client::provision(JobRun &run, const JobSpec &spec) {
    auto code_payload = [&](const std::string &script, int64_t peer_count) {
        nlohmann::json j;
        j["script"] = script;
        j["peer_count"] = peer_count;
        if (!spec.shared_state_json.empty())
            j["shared_state"] = nlohmann::json::parse(spec.shared_state_json);
        return to_bytes(j.dump());
    };

    for (const auto &w : run.hired_mappers) {
        Header h(MessageType::MAP_CODETYPE);
        h.set("job_id", spec.job_id);
        h.set("worker_id", w.worker_id);
        publish(static_cast<uint8_t>(MessageType::MAP_CODETYPE), h,
                code_payload(spec.map_script, spec.n_reducers));
    }
    for (const auto &w : run.hired_reducers) {
        Header h(MessageType::REDUCE_CODETYPE);
        h.set("job_id", spec.job_id);
        h.set("worker_id", w.worker_id);
        publish(static_cast<uint8_t>(MessageType::REDUCE_CODETYPE), h,
                code_payload(spec.reduce_script, spec.n_mappers));
    }

    // line-by-line round-robin split
    for (size_t i = 0; i < spec.input_lines.size(); ++i) {
        Header h(MessageType::MAP_DATATYPE);
        h.set("job_id", spec.job_id);
        h.set("dest_id", static_cast<int64_t>(i % run.hired_mappers.size()));
        nlohmann::json body;
        body["key"] = std::to_string(i);
        body["value"] = spec.input_lines[i];
        publish(static_cast<uint8_t>(MessageType::MAP_DATATYPE), h, to_bytes(body.dump()),
                &run.split_bytes);
    }
    for (size_t i = 0; i < run.hired_mappers.size(); ++i) {
        Header h(MessageType::EOS);
        h.set("job_id", spec.job_id);
        h.set("stage", std::string("map"));
        h.set("dest_id", static_cast<int64_t>(i));
        publish(static_cast<uint8_t>(MessageType::EOS), h, {});
    }
    conn_.flush();
}

std::map<std::string, nlohmann::json> Client::collect(JobRun &run, const JobSpec &spec,
                                                      int result_timeout_ms) {
    run.results.clear();
    run.eos_from_reducers = 0;
    auto deadline = Clock::now() + std::chrono::milliseconds(result_timeout_ms);
    while (run.eos_from_reducers < spec.n_reducers) {
        if (Clock::now() >= deadline)
            throw ResultTimeout("reducers silent past deadline for job " + spec.job_id);
        auto frame = conn_.read_frame_timeout(100);
        if (!frame)
            continue;
        try {
            Envelope env = decode_envelope(*frame);
            auto [h, payload] = ctx_.unseal(env);
            if (h.get_str("job_id") != spec.job_id)
                continue;
            if (h.msg_type() == MessageType::RESULT) {
                nlohmann::json j = parse_json(payload);
                std::string key = j.at("key").get<std::string>();
                if (!run.results.emplace(key, j.at("value")).second)
                    throw DuplicateKeyAcrossReducers("duplicate result key: " + key);
                run.output_bytes += frame->size() + 4;
            } else if (h.msg_type() == MessageType::EOS && h.get_str("stage") == "result") {
                run.eos_from_reducers++;
                if (auto rx = h.get_int("rx_bytes"))
                    run.shuffle_bytes += static_cast<uint64_t>(*rx);
            }
        } catch (const DuplicateKeyAcrossReducers &) {
            throw;
        } catch (const std::exception &) {
            continue;
        }
    }
    return run.results;
}

std::map<std::string, nlohmann::json> Client::run_job(const JobSpec &spec, JobRun *run_out) {
    JobRun run = open_job(spec);
    provision(run, spec);
    auto results = collect(run, spec);
    if (run_out)
        *run_out = std::move(run);
    return results;
}

KmeansOutcome Client::run_iterative_kmeans(const std::vector<Point> &points, int k,
                                           std::vector<Point> init_centers,
                                           double threshold_fraction, int n_mappers,
                                           int n_reducers, const std::string &map_script,
                                           const std::string &reduce_script, int max_iterations) {
    if (k < 1 || points.empty() || static_cast<int>(init_centers.size()) != k)
        throw ParseFailure("bad k-means parameters");
    double threshold = threshold_fraction * bounding_box(points).diagonal();

    JobSpec spec;
    spec.job_id = "kmeans-" + std::to_string(random_id() & 0xffffff);
    spec.map_script = map_script;
    spec.reduce_script = reduce_script;
    spec.n_mappers = n_mappers;
    spec.n_reducers = n_reducers;
    spec.input_lines = points_to_lines(points);
    spec.iterative = true;

    JobRun run = open_job(spec);
    KmeansOutcome outcome;
    outcome.centers = std::move(init_centers);

    for (int iter = 1; iter <= max_iterations; ++iter) {
        nlohmann::json st;
        auto &centers = st["centers"] = nlohmann::json::array();
        for (const auto &c : outcome.centers)
            centers.push_back({c.x, c.y});
        spec.shared_state_json = st.dump();

        run.split_bytes = run.shuffle_bytes = run.output_bytes = 0;
        uint64_t unsealed0 = ctx_.metrics().bytes_unsealed.load();
        auto t0 = Clock::now();
        provision(run, spec);
        auto results = collect(run, spec);
        double wall_ms =
            std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

        std::vector<Point> next = outcome.centers;  // empty clusters carry over
        for (int j = 0; j < k; ++j) {
            auto it = results.find(std::to_string(j));
            if (it != results.end())
                next[static_cast<size_t>(j)] = {it->second.at(0).get<double>(),
                                                it->second.at(1).get<double>()};
        }
        double movement = 0;
        for (int j = 0; j < k; ++j)
            movement += std::hypot(next[static_cast<size_t>(j)].x - outcome.centers[static_cast<size_t>(j)].x,
                                   next[static_cast<size_t>(j)].y - outcome.centers[static_cast<size_t>(j)].y);
        movement /= k;

        uint64_t unsealed1 = ctx_.metrics().bytes_unsealed.load();
        MetricsRow row;
        row.iteration = iter;
        row.wall_ms = wall_ms;
        row.split_bytes = run.split_bytes;
        row.shuffle_bytes = run.shuffle_bytes;
        row.output_bytes = run.output_bytes;
        row.mode = seal_mode_name(ctx_.mode());
        row.cache_proxy = wall_ms > 0 ? static_cast<double>(unsealed1 - unsealed0) / (wall_ms / 1000.0) : 0;
        outcome.metrics.push_back(row);

        outcome.centers = next;
        outcome.center_history.push_back(next);
        outcome.iterations = iter;
        if (movement <= threshold)
            break;
    }
    return outcome;
}

}  // namespace sealmr

#include "sealmr/worker.hpp"

#include "sealmr/subscription.hpp"

namespace sealmr {

namespace {

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

WorkerCore::WorkerCore(const WorkerConfig &cfg)
    : cfg_(cfg), ctx_(SealedContext::from_env(cfg.mode, cfg.node_id, /*with_payload_key=*/true)) {
    if (cfg_.roles.empty())
        throw ParseFailure("worker needs at least one role");
    if (cfg_.node_id.empty())
        cfg_.node_id = "w-" + std::to_string(random_id());
}

std::vector<Envelope> WorkerCore::hello_frames() {
    std::vector<Envelope> out;
    Header hello;
    hello.set("node_id", cfg_.node_id);
    out.push_back(ctx_.seal(kTagHello, hello, {}));

    Subscription sub;
    sub.sub_id = random_id();
    sub.owner = cfg_.node_id;
    sub.constraints.push_back({"msg_type", ConstraintOp::EQ,
                               message_type_name(MessageType::JOB_OPENING)});
    Header sh;
    sh.set("node_id", cfg_.node_id);
    out.push_back(ctx_.seal(kTagSubscribe, sh, to_bytes(subscription_to_json(sub))));
    return out;
}

std::string WorkerCore::details_payload(const std::string &job_id, Role role) const {
    const std::string &type_code = message_type_name(
        role == Role::MAPPER ? MessageType::MAP_CODETYPE : MessageType::REDUCE_CODETYPE);
    const std::string &type_data = message_type_name(
        role == Role::MAPPER ? MessageType::MAP_DATATYPE : MessageType::REDUCE_DATATYPE);
    const std::string stage = role == Role::MAPPER ? "map" : "reduce";

    auto make_sub = [&](std::vector<Constraint> cs) {
        Subscription s;
        s.sub_id = random_id();
        s.owner = cfg_.node_id;
        s.constraints = std::move(cs);
        return nlohmann::json::parse(subscription_to_json(s));
    };

    nlohmann::json subs = nlohmann::json::array();
    subs.push_back(make_sub({{"msg_type", ConstraintOp::EQ, type_code},
                             {"job_id", ConstraintOp::EQ, job_id},
                             {"worker_id", ConstraintOp::EQ, cfg_.node_id}}));
    // dest_id is assigned by the client at hire time
    subs.push_back(make_sub({{"msg_type", ConstraintOp::EQ, type_data},
                             {"job_id", ConstraintOp::EQ, job_id},
                             {"dest_id", ConstraintOp::EQ, std::string(kDestPlaceholder)}}));
    subs.push_back(make_sub({{"msg_type", ConstraintOp::EQ, message_type_name(MessageType::EOS)},
                             {"job_id", ConstraintOp::EQ, job_id},
                             {"stage", ConstraintOp::EQ, stage},
                             {"dest_id", ConstraintOp::EQ, std::string(kDestPlaceholder)}}));

    nlohmann::json j;
    j["worker_id"] = cfg_.node_id;
    j["role"] = role_name(role);
    j["job_id"] = job_id;
    j["subscriptions"] = std::move(subs);
    return j.dump();
}

std::vector<Envelope> WorkerCore::on_job_opening(const Header &h) {
    if (bound_job_)
        return {};  // no free capacity
    auto job_id = h.get_str("job_id");
    if (!job_id)
        return {};
    Role role = cfg_.roles.front();
    Header reply(MessageType::JOB_DETAILS);
    reply.set("job_id", *job_id);
    reply.set("worker_id", cfg_.node_id);
    Envelope env = ctx_.seal(static_cast<uint8_t>(MessageType::JOB_DETAILS), reply,
                             to_bytes(details_payload(*job_id, role)));
    return {env};
}

void WorkerCore::on_code(Role role, const Header &h, const Bytes &payload) {
    auto job_id = h.get_str("job_id");
    if (!job_id)
        throw ParseFailure("code message without job_id");
    if (bound_job_ && *bound_job_ != *job_id)
        return;  // hired elsewhere
    nlohmann::json j = parse_json(payload);
    CodePackage pkg;
    pkg.role = role;
    pkg.job_id = *job_id;
    pkg.script_source = j.at("script").get<std::string>();
    pkg.peer_count = j.at("peer_count").get<int64_t>();
    if (j.contains("shared_state") && !j["shared_state"].is_null())
        pkg.shared_state_json = j["shared_state"].dump();
    if (pkg.peer_count < 1)
        throw ParseFailure("peer_count must be >= 1");

    host_ = std::make_unique<ScriptHost>(pkg, cfg_.script_budget);
    bound_job_ = *job_id;
    active_role_ = role;
    peer_count_ = pkg.peer_count;

    staged_order_.clear();
    staged_.clear();
    dest_cache_.clear();
    group_order_.clear();
    groups_.clear();
    ledger_ = EosLedger{role == Role::REDUCER ? pkg.peer_count : 1, 0};
    rx_shuffle_bytes_ = 0;
}

void WorkerCore::on_map_data(const Bytes &payload) {
    if (!host_ || active_role_ != Role::MAPPER)
        throw RoleMismatch("map data without a loaded mapper");
    nlohmann::json j = parse_json(payload);
    std::string key = j.at("key").get<std::string>();
    for (auto &kv : host_->run_map(key, j.at("value"))) {
        if (!dest_cache_.count(kv.key))
            dest_cache_[kv.key] = host_->run_hash(kv.key, peer_count_);
        auto [it, fresh] = staged_.try_emplace(kv.key);
        if (fresh)
            staged_order_.push_back(kv.key);
        it->second.push_back(nlohmann::json::parse(kv.value));
    }
}

std::vector<Envelope> WorkerCore::on_map_eos() {
    if (!host_ || active_role_ != Role::MAPPER)
        throw RoleMismatch("map EOS without a loaded mapper");

    // combine (when defined) replaces each key's staged values with its pushes
    std::vector<std::string> out_order;
    std::map<std::string, std::vector<nlohmann::json>> out_values;
    auto stage_out = [&](const std::string &key, nlohmann::json v) {
        auto [it, fresh] = out_values.try_emplace(key);
        if (fresh)
            out_order.push_back(key);
        it->second.push_back(std::move(v));
    };
    for (const auto &key : staged_order_) {
        nlohmann::json grouped(staged_[key]);
        if (host_->has_combine()) {
            for (auto &kv : host_->run_combine(key, grouped))
                stage_out(kv.key, nlohmann::json::parse(kv.value));
        } else {
            stage_out(key, std::move(grouped));  // grouped list as one value
        }
    }

    std::vector<Envelope> out;
    for (const auto &key : out_order) {
        int64_t dest = dest_cache_.count(key) ? dest_cache_[key] : host_->run_hash(key, peer_count_);
        Header h(MessageType::REDUCE_DATATYPE);
        h.set("job_id", *bound_job_);
        h.set("dest_id", dest);
        nlohmann::json body;
        body["key"] = key;
        body["values"] = nlohmann::json(out_values[key]);
        out.push_back(ctx_.seal(static_cast<uint8_t>(MessageType::REDUCE_DATATYPE), h,
                                to_bytes(body.dump())));
    }
    // a mapper that emitted nothing still closes every reducer's stream
    for (int64_t d = 0; d < peer_count_; ++d) {
        Header h(MessageType::EOS);
        h.set("job_id", *bound_job_);
        h.set("stage", std::string("reduce"));
        h.set("dest_id", d);
        out.push_back(ctx_.seal(static_cast<uint8_t>(MessageType::EOS), h, {}));
    }
    staged_order_.clear();
    staged_.clear();
    return out;
}

void WorkerCore::on_reduce_data(const Bytes &payload, size_t frame_size) {
    if (!host_ || active_role_ != Role::REDUCER)
        throw RoleMismatch("reduce data without a loaded reducer");
    if (ledger_.complete())
        throw ParseFailure("reduce data after stream end");
    nlohmann::json j = parse_json(payload);
    std::string key = j.at("key").get<std::string>();
    auto [it, fresh] = groups_.try_emplace(key);
    if (fresh)
        group_order_.push_back(key);
    for (auto &v : j.at("values"))
        it->second.push_back(std::move(v));
    rx_shuffle_bytes_ += frame_size;
}

std::vector<Envelope> WorkerCore::on_reduce_eos() {
    if (!host_ || active_role_ != Role::REDUCER)
        throw RoleMismatch("reduce EOS without a loaded reducer");
    ledger_.received++;
    if (ledger_.received > ledger_.expected)
        throw ParseFailure("more EOS than expected");
    if (!ledger_.complete())
        return {};

    std::vector<Envelope> out;
    for (const auto &key : group_order_) {
        for (auto &kv : host_->run_reduce(key, nlohmann::json(groups_[key]))) {
            Header h(MessageType::RESULT);
            h.set("job_id", *bound_job_);
            nlohmann::json body;
            body["key"] = kv.key;
            body["value"] = nlohmann::json::parse(kv.value);
            out.push_back(
                ctx_.seal(static_cast<uint8_t>(MessageType::RESULT), h, to_bytes(body.dump())));
        }
    }
    Header h(MessageType::EOS);
    h.set("job_id", *bound_job_);
    h.set("stage", std::string("result"));
    h.set("rx_bytes", static_cast<int64_t>(rx_shuffle_bytes_));
    out.push_back(ctx_.seal(static_cast<uint8_t>(MessageType::EOS), h, {}));

    group_order_.clear();
    groups_.clear();
    ledger_.received = 0;
    rx_shuffle_bytes_ = 0;
    return out;
}

std::vector<Envelope> WorkerCore::handle(const Envelope &env, size_t frame_size) {
    if (is_control_tag(env.tag))
        return {};
    try {
        auto [header, payload] = ctx_.unseal(env);
        switch (header.msg_type()) {
            case MessageType::JOB_OPENING: return on_job_opening(header);
            case MessageType::MAP_CODETYPE:
                on_code(Role::MAPPER, header, payload);
                return {};
            case MessageType::REDUCE_CODETYPE:
                on_code(Role::REDUCER, header, payload);
                return {};
            case MessageType::MAP_DATATYPE:
                on_map_data(payload);
                return {};
            case MessageType::REDUCE_DATATYPE:
                on_reduce_data(payload, frame_size);
                return {};
            case MessageType::EOS: {
                auto stage = header.get_str("stage");
                if (stage == "map")
                    return on_map_eos();
                if (stage == "reduce")
                    return on_reduce_eos();
                return {};
            }
            default: return {};
        }
    } catch (const AuthFailure &) {
        // dropped and counted, per the sealed-region failure policy
        ctx_.count_auth_failure();
        faults_++;
        return {};
    } catch (const std::exception &) {
        faults_++;
        return {};
    }
}

Worker::Worker(std::string router_host, uint16_t router_port, WorkerConfig cfg)
    : host_(std::move(router_host)), port_(router_port), core_(cfg) {}

void Worker::run(std::atomic<bool> &stop) {
    transport::Conn conn = transport::Conn::connect(host_, port_);
    for (const auto &env : core_.hello_frames())
        conn.write_frame(encode_envelope(env));
    conn.flush();
    while (!stop.load(std::memory_order_relaxed)) {
        std::optional<Bytes> frame;
        try {
            frame = conn.read_frame_timeout(100);
        } catch (const transport::ConnClosed &) {
            return;
        }
        if (!frame)
            continue;
        try {
            Envelope env = decode_envelope(*frame);
            auto replies = core_.handle(env, frame->size() + 4);
            for (const auto &r : replies)
                conn.write_frame(encode_envelope(r));
            if (!replies.empty())
                conn.flush();
        } catch (const ParseFailure &) {
            continue;
        } catch (const transport::ConnClosed &) {
            return;
        }
    }
}

}  // namespace sealmr

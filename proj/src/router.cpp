#include "sealmr/router.hpp"

#include <poll.h>

#include <algorithm>

#include <json.hpp>

namespace sealmr {

Router::Router(SealMode mode)
    : ctx_(SealedContext::from_env(mode, "router", /*with_payload_key=*/false)) {}

std::string Router::stats_json() const {
    nlohmann::json j;
    j["registrations"] = stats_.registrations.load();
    j["unregistrations"] = stats_.unregistrations.load();
    j["matched"] = stats_.matched.load();
    j["forwards"] = stats_.forwards.load();
    j["dropped_no_match"] = stats_.dropped_no_match.load();
    j["dead_connections"] = stats_.dead_connections.load();
    j["auth_failures"] = stats_.auth_failures.load();
    j["parse_failures"] = stats_.parse_failures.load();
    j["subscriptions"] = store_.size();
    return j.dump();
}

void Router::handle_control(Peer &peer, const Envelope &env) {
    if (env.tag == kTagHello) {
        Header h = ctx_.unseal_header(env);
        auto node = h.get_str("node_id");
        if (!node)
            throw ParseFailure("HELLO without node_id");
        peer.node_id = *node;
        by_node_[*node] = &peer;
        return;
    }
    if (env.tag == kTagStats) {
        // local plaintext diagnostics; replied on the asking connection only
        Envelope reply = seal_plaintext(kTagStats, Header{}, to_bytes(stats_json()));
        peer.conn.write_frame(encode_envelope(reply));
        return;
    }
    auto [h, body] = ctx_.unseal(env);  // control bodies travel under the header key
    if (env.tag == kTagSubscribe) {
        Subscription sub = subscription_from_json(to_string(body));
        store_.add(std::move(sub));
        stats_.registrations++;
    } else if (env.tag == kTagUnsubscribe) {
        nlohmann::json j = nlohmann::json::parse(to_string(body), nullptr, false);
        if (j.is_discarded() || !j.contains("sub_id"))
            throw ParseFailure("bad unsubscribe body");
        if (store_.remove(j["sub_id"].get<int64_t>()))
            stats_.unregistrations++;
    }
}

void Router::publish(const Envelope &env, const Bytes &frame) {
    Header header = ctx_.unseal_header(env);
    std::set<std::string> owners = store_.match(header);
    stats_.matched += owners.size();
    if (owners.empty()) {
        stats_.dropped_no_match++;
        return;
    }
    for (const auto &owner : owners) {
        auto it = by_node_.find(owner);
        if (it == by_node_.end() || it->second->dead) {
            stats_.dead_connections++;
            continue;
        }
        // payload ciphertext passes through byte-identical
        it->second->conn.write_frame(frame);
        stats_.forwards++;
    }
}

void Router::handle_frame(Peer &peer, const Bytes &frame) {
    try {
        Envelope env = decode_envelope(frame);
        if (is_control_tag(env.tag))
            handle_control(peer, env);
        else
            publish(env, frame);
    } catch (const AuthFailure &) {
        stats_.auth_failures++;
        ctx_.count_auth_failure();
    } catch (const DuplicateId &) {
        stats_.parse_failures++;
    } catch (const ParseFailure &) {
        stats_.parse_failures++;
    }
}

void Router::run(transport::Listener &listener, std::atomic<bool> &stop) {
    while (!stop.load(std::memory_order_relaxed)) {
        std::vector<pollfd> fds;
        fds.push_back({listener.fd(), POLLIN, 0});
        for (auto &p : peers_)
            fds.push_back({p->conn.fd(), POLLIN, 0});
        int rc = ::poll(fds.data(), fds.size(), 100);
        if (rc <= 0)
            continue;

        if (fds[0].revents & POLLIN) {
            auto conn = listener.accept();
            conn.set_nonblocking();
            peers_.push_back(std::make_unique<Peer>(std::move(conn)));
        }

        for (size_t i = 1; i < fds.size(); ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            Peer &peer = *peers_[i - 1];
            if (!peer.conn.fill())
                peer.dead = true;
            try {
                while (auto frame = peer.conn.try_pop_frame())
                    handle_frame(peer, *frame);
            } catch (const ParseFailure &) {
                // framing is unrecoverable on this connection
                peer.dead = true;
                stats_.parse_failures++;
            }
        }

        for (auto &p : peers_) {
            if (p->dead || !p->conn.has_buffered_output())
                continue;
            try {
                p->conn.flush();
            } catch (const transport::ConnClosed &) {
                p->dead = true;
                stats_.dead_connections++;
            }
        }

        // reap dead peers and their subscriptions
        for (auto &p : peers_) {
            if (!p->dead)
                continue;
            if (!p->node_id.empty()) {
                by_node_.erase(p->node_id);
                store_.remove_owner(p->node_id);
            }
        }
        std::erase_if(peers_, [](const auto &p) { return p->dead; });
    }
}

}  // namespace sealmr

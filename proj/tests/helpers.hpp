#pragma once

// Shared test scaffolding: an in-process cluster (router + workers on
// threads) and independent oracle implementations the suites compare the
// framework against. The oracles deliberately avoid the library's own
// matching / scripting / distribution code paths.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sealmr/client.hpp"
#include "sealmr/kmeans.hpp"
#include "sealmr/router.hpp"
#include "sealmr/subscription.hpp"
#include "sealmr/worker.hpp"

namespace testutil {

inline std::string scripts_dir() { return SEALMR_SCRIPTS_DIR; }
inline std::string data_dir() { return SEALMR_DATA_DIR; }

inline std::string load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string script(const std::string &name) { return load_file(scripts_dir() + "/" + name); }

/// Router and workers on background threads, all in one process.
class InprocCluster {
  public:
    InprocCluster(int n_mappers, int n_reducers, sealmr::SealMode mode,
                  uint64_t script_budget = 50'000'000)
        : listener_("127.0.0.1", 0), router_(mode) {
        router_thread_ = std::thread([this] { router_.run(listener_, stop_); });
        for (int i = 0; i < n_mappers; ++i)
            add_worker("m" + std::to_string(i), sealmr::Role::MAPPER, mode, script_budget);
        for (int i = 0; i < n_reducers; ++i)
            add_worker("r" + std::to_string(i), sealmr::Role::REDUCER, mode, script_budget);
    }

    ~InprocCluster() { stop(); }

    uint16_t port() const { return listener_.port(); }
    sealmr::Router &router() { return router_; }

    void stop() {
        if (stop_.exchange(true))
            return;
        for (auto &w : workers_)
            w->thread.join();
        router_thread_.join();
        listener_.close();
    }

  private:
    struct Node {
        std::unique_ptr<sealmr::Worker> worker;
        std::thread thread;
    };

    void add_worker(const std::string &id, sealmr::Role role, sealmr::SealMode mode,
                    uint64_t budget) {
        sealmr::WorkerConfig cfg;
        cfg.node_id = id;
        cfg.roles = {role};
        cfg.mode = mode;
        cfg.script_budget = budget;
        auto node = std::make_unique<Node>();
        node->worker = std::make_unique<sealmr::Worker>("127.0.0.1", listener_.port(), cfg);
        node->thread = std::thread([w = node->worker.get(), this] { w->run(stop_); });
        workers_.push_back(std::move(node));
    }

    sealmr::transport::Listener listener_;
    sealmr::Router router_;
    std::atomic<bool> stop_{false};
    std::thread router_thread_;
    std::vector<std::unique_ptr<Node>> workers_;
};

// ---- word-count oracle: ASCII alphabetic runs, lowercased ----

inline std::map<std::string, int64_t> count_words(const std::vector<std::string> &lines) {
    std::map<std::string, int64_t> counts;
    for (const auto &line : lines) {
        std::string tok;
        for (char c : line) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
                tok += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            } else if (!tok.empty()) {
                counts[tok]++;
                tok.clear();
            }
        }
        if (!tok.empty())
            counts[tok]++;
    }
    return counts;
}

// ---- sequential k-means reference ----

struct KmeansRef {
    std::vector<sealmr::Point> centers;
    int iterations = 0;
    std::vector<std::vector<sealmr::Point>> history;  // centers after each iteration
};

/// Lloyd's algorithm, sequential: nearest center by squared distance with the
/// lowest index winning ties, empty clusters keep their center, stop when the
/// mean center movement is <= threshold_fraction * bbox diagonal.
inline KmeansRef reference_kmeans(const std::vector<sealmr::Point> &points,
                                  std::vector<sealmr::Point> centers, double threshold_fraction,
                                  int max_iterations = 500) {
    const double threshold = threshold_fraction * sealmr::bounding_box(points).diagonal();
    KmeansRef out;
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::vector<double> sx(centers.size(), 0), sy(centers.size(), 0);
        std::vector<int64_t> cnt(centers.size(), 0);
        for (const auto &p : points) {
            size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t c = 0; c < centers.size(); ++c) {
                double dx = p.x - centers[c].x, dy = p.y - centers[c].y;
                double d = dx * dx + dy * dy;
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            sx[best] += p.x;
            sy[best] += p.y;
            cnt[best]++;
        }
        std::vector<sealmr::Point> next = centers;
        for (size_t c = 0; c < centers.size(); ++c)
            if (cnt[c] > 0)
                next[c] = {sx[c] / cnt[c], sy[c] / cnt[c]};
        double movement = 0;
        for (size_t c = 0; c < centers.size(); ++c)
            movement += std::hypot(next[c].x - centers[c].x, next[c].y - centers[c].y);
        movement /= static_cast<double>(centers.size());
        centers = next;
        out.history.push_back(centers);
        out.iterations = iter + 1;
        if (movement <= threshold)
            break;
    }
    out.centers = centers;
    return out;
}

// ---- brute-force subscription matcher ----

inline bool brute_satisfied(const sealmr::Constraint &c, const sealmr::Header &h) {
    const sealmr::AttrValue *v = h.find(c.attribute);
    if (!v || v->index() != c.value.index())
        return false;
    auto cmp = [&](auto actual, auto wanted) {
        switch (c.op) {
            case sealmr::ConstraintOp::EQ: return actual == wanted;
            case sealmr::ConstraintOp::LT: return actual < wanted;
            case sealmr::ConstraintOp::LE: return actual <= wanted;
            case sealmr::ConstraintOp::GT: return actual > wanted;
            case sealmr::ConstraintOp::GE: return actual >= wanted;
        }
        return false;
    };
    if (std::holds_alternative<int64_t>(*v))
        return cmp(std::get<int64_t>(*v), std::get<int64_t>(c.value));
    return cmp(std::get<std::string>(*v), std::get<std::string>(c.value));
}

inline std::set<std::string> brute_match(const std::vector<sealmr::Subscription> &subs,
                                         const sealmr::Header &h) {
    std::set<std::string> owners;
    for (const auto &s : subs) {
        bool all = !s.constraints.empty();
        for (const auto &c : s.constraints)
            if (!brute_satisfied(c, h)) {
                all = false;
                break;
            }
        if (all)
            owners.insert(s.owner);
    }
    return owners;
}

}  // namespace testutil

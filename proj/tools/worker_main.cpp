#include <atomic>
#include <csignal>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sealmr/worker.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"sealmr-worker: volunteers for jobs and runs map/reduce scripts"};
    std::string router = "127.0.0.1:5550";
    std::string roles_str = "mapper,reducer";
    std::string mode_str = "sealed";
    std::string node_id;
    uint64_t budget = 50'000'000;
    app.add_option("--router", router, "router addr:port");
    app.add_option("--roles", roles_str, "comma-separated: mapper,reducer (first is preferred)");
    app.add_option("--seal-mode", mode_str, "sealed|crypto-only|plain|sealed-plain");
    app.add_option("--node-id", node_id, "worker id (default: random)");
    app.add_option("--script-budget", budget, "instruction budget per script invocation");
    CLI11_PARSE(app, argc, argv);

    try {
        auto colon = router.rfind(':');
        if (colon == std::string::npos)
            throw std::runtime_error("--router must be addr:port");
        std::string host = router.substr(0, colon);
        uint16_t port = static_cast<uint16_t>(std::stoi(router.substr(colon + 1)));

        sealmr::WorkerConfig cfg;
        cfg.node_id = node_id;
        cfg.mode = sealmr::seal_mode_from_string(mode_str);
        cfg.script_budget = budget;
        std::stringstream ss(roles_str);
        std::string role;
        while (std::getline(ss, role, ','))
            cfg.roles.push_back(sealmr::role_from_string(role));

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);

        sealmr::Worker worker(host, port, cfg);
        worker.run(g_stop);
    } catch (const std::exception &e) {
        std::cerr << "sealmr-worker: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

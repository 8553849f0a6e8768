#include <atomic>
#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "sealmr/router.hpp"

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"sealmr-router: content-based pub/sub router with a sealed matching region"};
    std::string listen = "127.0.0.1:5550";
    std::string mode_str = "sealed";
    app.add_option("--listen", listen, "addr:port to listen on (port 0 picks a free one)");
    app.add_option("--seal-mode", mode_str, "sealed|crypto-only|plain|sealed-plain");
    CLI11_PARSE(app, argc, argv);

    try {
        auto colon = listen.rfind(':');
        if (colon == std::string::npos)
            throw std::runtime_error("--listen must be addr:port");
        std::string host = listen.substr(0, colon);
        uint16_t port = static_cast<uint16_t>(std::stoi(listen.substr(colon + 1)));

        sealmr::transport::Listener listener(host, port);
        std::cout << "listening on " << host << ":" << listener.port() << std::endl;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);

        sealmr::Router router(sealmr::seal_mode_from_string(mode_str));
        router.run(listener, g_stop);
        std::cerr << router.stats_json() << std::endl;
    } catch (const std::exception &e) {
        std::cerr << "sealmr-router: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

#include "sealmr/bench.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sealmr/client.hpp"

namespace sealmr::bench {

namespace {

/// Child process with captured stdout; terminated on destruction.
class ChildProc {
  public:
    ChildProc(const std::vector<std::string> &argv) {
        int fds[2];
        if (pipe(fds) != 0)
            throw std::runtime_error("pipe failed");
        pid_ = fork();
        if (pid_ < 0)
            throw std::runtime_error("fork failed");
        if (pid_ == 0) {
            dup2(fds[1], STDOUT_FILENO);
            close(fds[0]);
            close(fds[1]);
            int devnull = open("/dev/null", O_WRONLY);
            if (devnull >= 0) {
                dup2(devnull, STDERR_FILENO);
                close(devnull);
            }
            std::vector<char *> args;
            for (const auto &a : argv)
                args.push_back(const_cast<char *>(a.c_str()));
            args.push_back(nullptr);
            execv(args[0], args.data());
            _exit(127);
        }
        close(fds[1]);
        out_fd_ = fds[0];
        fcntl(out_fd_, F_SETFL, O_NONBLOCK);
    }

    ~ChildProc() { terminate(); }

    std::string read_line(int timeout_ms = 10000) {
        std::string line;
        auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
        char c;
        while (std::chrono::steady_clock::now() < deadline) {
            ssize_t r = ::read(out_fd_, &c, 1);
            if (r == 1) {
                if (c == '\n')
                    return line;
                line.push_back(c);
            } else if (r == 0) {
                break;
            } else {
                usleep(10000);
            }
        }
        throw std::runtime_error("child produced no output line");
    }

    void terminate() {
        if (pid_ > 0) {
            kill(pid_, SIGTERM);
            int status = 0;
            waitpid(pid_, &status, 0);
            pid_ = -1;
        }
        if (out_fd_ >= 0) {
            close(out_fd_);
            out_fd_ = -1;
        }
    }

  private:
    pid_t pid_ = -1;
    int out_fd_ = -1;
};

std::string load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ParseFailure("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string self_bin_dir() {
    char buf[4096];
    ssize_t n = readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n <= 0)
        return ".";
    buf[n] = '\0';
    return std::filesystem::path(buf).parent_path().string();
}

const Cell *Summary::find(int k, int64_t n, SealMode mode) const {
    for (const auto &c : cells)
        if (c.k == k && c.n == n && c.mode == mode)
            return &c;
    return nullptr;
}

Summary run_matrix(const BenchConfig &cfg, std::ostream &csv) {
    std::string bin_dir = cfg.bin_dir.empty() ? self_bin_dir() : cfg.bin_dir;
    std::string scripts_dir = cfg.scripts_dir.empty() ? SEALMR_SCRIPTS_DIR : cfg.scripts_dir;
    std::string map_script = load_file(scripts_dir + "/kmeans_map.lua");
    std::string reduce_script = load_file(scripts_dir + "/kmeans_reduce.lua");

    Summary summary;
    write_metrics_header(csv);

    for (int k : cfg.k_centers) {
        for (int64_t n : cfg.n_points) {
            Dataset ds = gen_points(n, k, cfg.seed);
            std::vector<Point> plain_centers;
            bool have_reference = false;

            for (SealMode mode : cfg.seal_modes) {
                Cell cell;
                cell.k = k;
                cell.n = n;
                cell.mode = mode;
                std::vector<double> rep_means;

                for (int rep = 0; rep < cfg.repetitions; ++rep) {
                    ChildProc router({bin_dir + "/sealmr-router", "--listen", "127.0.0.1:0",
                                      "--seal-mode", seal_mode_name(mode)});
                    std::string line = router.read_line();
                    auto colon = line.rfind(':');
                    if (line.find("listening on") == std::string::npos ||
                        colon == std::string::npos)
                        throw std::runtime_error("router did not report its port: " + line);
                    uint16_t port = static_cast<uint16_t>(std::stoi(line.substr(colon + 1)));

                    std::vector<std::unique_ptr<ChildProc>> workers;
                    for (int i = 0; i < cfg.n_mappers; ++i)
                        workers.push_back(std::make_unique<ChildProc>(std::vector<std::string>{
                            bin_dir + "/sealmr-worker", "--router", "127.0.0.1:" + std::to_string(port),
                            "--roles", "mapper", "--seal-mode", seal_mode_name(mode)}));
                    for (int i = 0; i < cfg.n_reducers; ++i)
                        workers.push_back(std::make_unique<ChildProc>(std::vector<std::string>{
                            bin_dir + "/sealmr-worker", "--router", "127.0.0.1:" + std::to_string(port),
                            "--roles", "reducer", "--seal-mode", seal_mode_name(mode)}));

                    Client client("127.0.0.1", port, mode);
                    KmeansOutcome out = client.run_iterative_kmeans(
                        ds.points, k, ds.init_centers, cfg.threshold_fraction, cfg.n_mappers,
                        cfg.n_reducers, map_script, reduce_script);

                    csv << "# k=" << k << " n=" << n << " mode=" << seal_mode_name(mode)
                        << " rep=" << rep << "\n";
                    std::vector<double> iter_ms;
                    for (const auto &row : out.metrics) {
                        write_metrics_row(csv, row);
                        iter_ms.push_back(row.wall_ms);
                    }
                    rep_means.push_back(mean(iter_ms));
                    cell.iterations = out.iterations;
                    cell.final_centers = out.centers;
                    if (!out.metrics.empty()) {
                        const auto &last = out.metrics.back();
                        cell.split_bytes = last.split_bytes;
                        cell.shuffle_bytes = last.shuffle_bytes;
                        cell.output_bytes = last.output_bytes;
                    }
                }

                cell.mean_iter_ms = mean(rep_means);
                cell.cov = coefficient_of_variation(rep_means);

                if (!have_reference) {
                    plain_centers = cell.final_centers;
                    have_reference = true;
                } else if (cell.final_centers != plain_centers) {
                    throw std::runtime_error("mode " + seal_mode_name(mode) +
                                             " produced a different result (k=" +
                                             std::to_string(k) + ", n=" + std::to_string(n) + ")");
                }
                summary.cells.push_back(std::move(cell));
            }

            // two-way averaged overheads, when the full on/off matrix ran
            auto t = [&](SealMode m) -> const Cell * { return summary.find(k, n, m); };
            const Cell *plain = t(SealMode::PASSTHROUGH_NOCRYPTO);
            const Cell *crypto = t(SealMode::PASSTHROUGH_CRYPTO);
            const Cell *sealed = t(SealMode::SEALED);
            const Cell *sealed_plain = t(SealMode::SEALED_NOCRYPTO);
            if (plain && crypto && sealed && sealed_plain && plain->mean_iter_ms > 0 &&
                sealed_plain->mean_iter_ms > 0) {
                double enc = ((crypto->mean_iter_ms / plain->mean_iter_ms - 1.0) +
                              (sealed->mean_iter_ms / sealed_plain->mean_iter_ms - 1.0)) /
                             2.0 * 100.0;
                double seal = ((sealed_plain->mean_iter_ms / plain->mean_iter_ms - 1.0) +
                               (sealed->mean_iter_ms / crypto->mean_iter_ms - 1.0)) /
                              2.0 * 100.0;
                summary.encryption_overhead_pct[{k, n}] = enc;
                summary.seal_overhead_pct[{k, n}] = seal;
            }
        }
    }
    return summary;
}

}  // namespace sealmr::bench

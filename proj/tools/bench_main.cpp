#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sealmr/bench.hpp"

namespace {

template <typename T, typename Parse>
std::vector<T> split_list(const std::string &csv, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse(item));
    return out;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"sealmr-bench: k-means benchmark over the seal-mode matrix"};
    std::string n_csv = "1000", k_csv = "10";
    std::string modes_csv = "plain,crypto-only,sealed-plain,sealed";
    std::string out_path = "metrics.csv";
    sealmr::bench::BenchConfig cfg;
    app.add_option("--n", n_csv, "comma list of point counts");
    app.add_option("--k", k_csv, "comma list of cluster counts");
    app.add_option("--modes", modes_csv, "comma list of seal modes");
    app.add_option("--mappers", cfg.n_mappers, "mappers per cell");
    app.add_option("--reducers", cfg.n_reducers, "reducers per cell");
    app.add_option("--seed", cfg.seed, "dataset seed");
    app.add_option("--reps", cfg.repetitions, "repetitions per cell");
    app.add_option("--threshold-frac", cfg.threshold_fraction, "k-means stop threshold fraction");
    app.add_option("--out", out_path, "metrics CSV output path");
    CLI11_PARSE(app, argc, argv);

    try {
        cfg.n_points = split_list<int64_t>(n_csv, [](const std::string &s) { return std::stoll(s); });
        cfg.k_centers = split_list<int>(k_csv, [](const std::string &s) { return std::stoi(s); });
        cfg.seal_modes = split_list<sealmr::SealMode>(
            modes_csv, [](const std::string &s) { return sealmr::seal_mode_from_string(s); });

        std::ofstream csv(out_path);
        if (!csv)
            throw std::runtime_error("cannot open " + out_path);
        auto summary = sealmr::bench::run_matrix(cfg, csv);

        for (const auto &cell : summary.cells)
            std::cout << "k=" << cell.k << " n=" << cell.n << " mode="
                      << sealmr::seal_mode_name(cell.mode) << " iters=" << cell.iterations
                      << " mean_iter_ms=" << cell.mean_iter_ms << " cov=" << cell.cov
                      << " shuffle_bytes=" << cell.shuffle_bytes << "\n";
        for (const auto &[kn, pct] : summary.encryption_overhead_pct)
            std::cout << "encryption overhead k=" << kn.first << " n=" << kn.second << ": " << pct
                      << "%\n";
        for (const auto &[kn, pct] : summary.seal_overhead_pct)
            std::cout << "seal overhead k=" << kn.first << " n=" << kn.second << ": " << pct
                      << "%\n";
    } catch (const std::exception &e) {
        std::cerr << "sealmr-bench: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

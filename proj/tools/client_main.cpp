#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sealmr/client.hpp"

namespace {

std::string load_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// seeded initial centers in the bottom-left corner of the input bounding box
std::vector<sealmr::Point> corner_centers(const std::vector<sealmr::Point> &points, int k,
                                          uint64_t seed) {
    sealmr::BBox b = sealmr::bounding_box(points);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(b.min_x, b.min_x + 0.1 * (b.max_x - b.min_x));
    std::uniform_real_distribution<double> uy(b.min_y, b.min_y + 0.1 * (b.max_y - b.min_y));
    std::vector<sealmr::Point> centers;
    for (int i = 0; i < k; ++i)
        centers.push_back({std::round(ux(rng) * 1024.0) / 1024.0,
                           std::round(uy(rng) * 1024.0) / 1024.0});
    return centers;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"sealmr-client: submits MapReduce jobs and gathers results"};
    auto *run = app.add_subcommand("run", "run a job");
    std::string router = "127.0.0.1:5550";
    std::string map_path, reduce_path, input_path, metrics_path, mode_str = "sealed";
    std::string iterative, init_centers_path;
    int mappers = 1, reducers = 1, k = 10;
    double threshold_frac = 1e-3;
    uint64_t seed = 1;
    run->add_option("--router", router, "router addr:port");
    run->add_option("--map", map_path, "mapper script path")->required();
    run->add_option("--reduce", reduce_path, "reducer script path")->required();
    run->add_option("--mappers", mappers, "number of mappers to hire");
    run->add_option("--reducers", reducers, "number of reducers to hire");
    run->add_option("--input", input_path, "line-oriented input file")->required();
    run->add_option("--seal-mode", mode_str, "sealed|crypto-only|plain|sealed-plain");
    run->add_option("--iterative", iterative, "iterative job kind (kmeans)");
    run->add_option("--k", k, "k-means: number of clusters");
    run->add_option("--threshold-frac", threshold_frac,
                    "k-means: stop when mean center movement <= frac * bbox diagonal");
    run->add_option("--seed", seed, "k-means: seed for initial corner centers");
    run->add_option("--init-centers", init_centers_path, "k-means: x,y file of initial centers");
    run->add_option("--metrics", metrics_path, "per-iteration metrics CSV output");
    app.require_subcommand(1);
    CLI11_PARSE(app, argc, argv);

    try {
        auto colon = router.rfind(':');
        if (colon == std::string::npos)
            throw std::runtime_error("--router must be addr:port");
        std::string host = router.substr(0, colon);
        uint16_t port = static_cast<uint16_t>(std::stoi(router.substr(colon + 1)));

        sealmr::Client client(host, port, sealmr::seal_mode_from_string(mode_str));
        auto lines = sealmr::read_lines(input_path);

        nlohmann::json out = nlohmann::json::object();
        std::vector<sealmr::MetricsRow> metrics;

        if (iterative == "kmeans") {
            auto points = sealmr::parse_points(lines);
            auto init = init_centers_path.empty()
                            ? corner_centers(points, k, seed)
                            : sealmr::parse_points(sealmr::read_lines(init_centers_path));
            auto result = client.run_iterative_kmeans(points, k, init, threshold_frac, mappers,
                                                      reducers, load_file(map_path),
                                                      load_file(reduce_path));
            for (size_t i = 0; i < result.centers.size(); ++i)
                out[std::to_string(i)] = {result.centers[i].x, result.centers[i].y};
            out["_iterations"] = result.iterations;
            metrics = result.metrics;
        } else if (iterative.empty()) {
            sealmr::JobSpec spec;
            spec.job_id = "job";
            spec.map_script = load_file(map_path);
            spec.reduce_script = load_file(reduce_path);
            spec.n_mappers = mappers;
            spec.n_reducers = reducers;
            spec.input_lines = lines;
            sealmr::JobRun jr;
            auto results = client.run_job(spec, &jr);
            for (const auto &[key, value] : results)
                out[key] = value;
            sealmr::MetricsRow row;
            row.iteration = 1;
            row.split_bytes = jr.split_bytes;
            row.shuffle_bytes = jr.shuffle_bytes;
            row.output_bytes = jr.output_bytes;
            row.mode = sealmr::seal_mode_name(client.mode());
            metrics.push_back(row);
        } else {
            throw std::runtime_error("unknown --iterative kind: " + iterative);
        }

        std::cout << out.dump(2) << std::endl;
        if (!metrics_path.empty()) {
            std::ofstream mf(metrics_path);
            sealmr::write_metrics_header(mf);
            for (const auto &row : metrics)
                sealmr::write_metrics_row(mf, row);
        }
    } catch (const std::exception &e) {
        std::cerr << "sealmr-client: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

#include <iostream>

#include <CLI11.hpp>

#include "sealmr/kmeans.hpp"

int main(int argc, char **argv) {
    CLI::App app{"sealmr-gen: seeded synthetic k-means input generator"};
    int64_t n = 1000;
    int k = 10;
    uint64_t seed = 1;
    double width = 1000.0, height = 1000.0;
    std::string out_path = "points.txt", centers_path;
    app.add_option("--n", n, "number of points");
    app.add_option("--k", k, "number of true clusters");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--domain-width", width, "domain rectangle width");
    app.add_option("--domain-height", height, "domain rectangle height");
    app.add_option("--out", out_path, "points output file (x,y per line)");
    app.add_option("--centers-out", centers_path, "initial corner centers output file");
    CLI11_PARSE(app, argc, argv);

    try {
        auto ds = sealmr::gen_points(n, k, seed, width, height);
        sealmr::write_lines(out_path, sealmr::points_to_lines(ds.points));
        if (!centers_path.empty())
            sealmr::write_lines(centers_path, sealmr::points_to_lines(ds.init_centers));
        auto bbox = sealmr::bounding_box(ds.points);
        std::cout << "wrote " << ds.points.size() << " points to " << out_path
                  << "; bbox diagonal " << bbox.diagonal() << std::endl;
    } catch (const std::exception &e) {
        std::cerr << "sealmr-gen: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}

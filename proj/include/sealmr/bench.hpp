#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "sealmr/kmeans.hpp"
#include "sealmr/metrics.hpp"
#include "sealmr/sealed_region.hpp"

namespace sealmr::bench {

struct BenchConfig {
    std::vector<int64_t> n_points = {1000};
    std::vector<int> k_centers = {10};
    int n_mappers = 4;
    int n_reducers = 2;
    std::vector<SealMode> seal_modes = {SealMode::PASSTHROUGH_NOCRYPTO, SealMode::SEALED};
    uint64_t seed = 1;
    int repetitions = 1;
    double threshold_fraction = 1e-3;
    std::string bin_dir;      // directory holding sealmr-router / sealmr-worker
    std::string scripts_dir;  // defaults to the shipped reference scripts
};

struct Cell {
    int k = 0;
    int64_t n = 0;
    SealMode mode = SealMode::SEALED;
    double mean_iter_ms = 0;
    double cov = 0;  // across repetitions
    uint64_t split_bytes = 0;   // per iteration, last repetition
    uint64_t shuffle_bytes = 0;
    uint64_t output_bytes = 0;
    int iterations = 0;
    std::vector<Point> final_centers;
};

struct Summary {
    std::vector<Cell> cells;
    // per (k, n): percentages computed with the two-way averaging method
    std::map<std::pair<int, int64_t>, double> encryption_overhead_pct;
    std::map<std::pair<int, int64_t>, double> seal_overhead_pct;

    const Cell *find(int k, int64_t n, SealMode mode) const;
};

/// Runs the (mode x n x k) matrix: spawns a router and worker processes per
/// cell, drives the k-means job in-process, writes MetricsRow CSV, and
/// aborts if any mode's final centers differ from the plain-mode result.
Summary run_matrix(const BenchConfig &cfg, std::ostream &csv);

/// Directory of the currently running executable (for locating sibling tools).
std::string self_bin_dir();

}  // namespace sealmr::bench

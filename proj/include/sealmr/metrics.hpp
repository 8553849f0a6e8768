#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sealmr {

/// One measured iteration. cache_proxy is unsealed bytes per second, a
/// portable stand-in for hardware cache-miss rates.
struct MetricsRow {
    int iteration = 0;
    double wall_ms = 0;
    uint64_t split_bytes = 0;
    uint64_t shuffle_bytes = 0;
    uint64_t output_bytes = 0;
    std::string mode;
    double cache_proxy = 0;
};

void write_metrics_header(std::ostream &out);
void write_metrics_row(std::ostream &out, const MetricsRow &row);

double mean(const std::vector<double> &xs);
double coefficient_of_variation(const std::vector<double> &xs);

}  // namespace sealmr

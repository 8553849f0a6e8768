#include "sealmr/metrics.hpp"

#include <cmath>
#include <numeric>

namespace sealmr {

void write_metrics_header(std::ostream &out) {
    out << "iteration,wall_ms,split_bytes,shuffle_bytes,output_bytes,mode,cache_proxy\n";
}

void write_metrics_row(std::ostream &out, const MetricsRow &row) {
    out << row.iteration << ',' << row.wall_ms << ',' << row.split_bytes << ','
        << row.shuffle_bytes << ',' << row.output_bytes << ',' << row.mode << ','
        << row.cache_proxy << '\n';
}

double mean(const std::vector<double> &xs) {
    if (xs.empty())
        return 0;
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double coefficient_of_variation(const std::vector<double> &xs) {
    if (xs.size() < 2)
        return 0;
    double m = mean(xs);
    if (m == 0)
        return 0;
    double var = 0;
    for (double x : xs)
        var += (x - m) * (x - m);
    var /= static_cast<double>(xs.size() - 1);
    return std::sqrt(var) / m;
}

}  // namespace sealmr

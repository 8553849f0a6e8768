#pragma once

#include <string>
#include <vector>

#include "sealmr/common.hpp"

namespace sealmr {

struct Point {
    double x = 0;
    double y = 0;
    bool operator==(const Point &) const = default;
};

struct BBox {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    double diagonal() const;
};

BBox bounding_box(const std::vector<Point> &points);

/// "x,y" decimal text, one point per line. Coordinates are snapped to a
/// 1/1024 grid by the generator, so sums of up to a few million points stay
/// exact in double precision and results are reproducible regardless of
/// summation order.
std::string format_point(const Point &p);
Point parse_point(const std::string &line);  // throws ParseFailure
std::vector<std::string> points_to_lines(const std::vector<Point> &points);
std::vector<Point> parse_points(const std::vector<std::string> &lines);

struct Dataset {
    std::vector<Point> points;
    std::vector<Point> true_centers;
    std::vector<Point> init_centers;  // confined to the bottom-left corner
    BBox domain;
};

/// Seeded synthetic clusters: k true centers in `domain`, n points scattered
/// around them, initial centroids in the bottom-left corner sub-area.
Dataset gen_points(int64_t n, int k, uint64_t seed, double domain_w = 1000.0,
                   double domain_h = 1000.0, double cluster_radius_frac = 0.08,
                   double corner_frac = 0.1);

std::vector<std::string> read_lines(const std::string &path);
void write_lines(const std::string &path, const std::vector<std::string> &lines);

}  // namespace sealmr

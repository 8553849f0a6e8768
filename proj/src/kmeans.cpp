#include "sealmr/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace sealmr {

double BBox::diagonal() const { return std::hypot(max_x - min_x, max_y - min_y); }

BBox bounding_box(const std::vector<Point> &points) {
    if (points.empty())
        throw ParseFailure("bounding box of empty point set");
    BBox b{points[0].x, points[0].y, points[0].x, points[0].y};
    for (const auto &p : points) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

std::string format_point(const Point &p) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10f,%.10f", p.x, p.y);
    return buf;
}

Point parse_point(const std::string &line) {
    size_t comma = line.find(',');
    if (comma == std::string::npos)
        throw ParseFailure("point line without comma: " + line);
    try {
        size_t used = 0;
        double x = std::stod(line.substr(0, comma), &used);
        double y = std::stod(line.substr(comma + 1), &used);
        return {x, y};
    } catch (const std::exception &) {
        throw ParseFailure("bad point line: " + line);
    }
}

std::vector<std::string> points_to_lines(const std::vector<Point> &points) {
    std::vector<std::string> lines;
    lines.reserve(points.size());
    for (const auto &p : points)
        lines.push_back(format_point(p));
    return lines;
}

std::vector<Point> parse_points(const std::vector<std::string> &lines) {
    std::vector<Point> points;
    points.reserve(lines.size());
    for (const auto &l : lines)
        if (!l.empty())
            points.push_back(parse_point(l));
    return points;
}

namespace {
double snap(double v) { return std::round(v * 1024.0) / 1024.0; }
}  // namespace

Dataset gen_points(int64_t n, int k, uint64_t seed, double domain_w, double domain_h,
                   double cluster_radius_frac, double corner_frac) {
    if (n < 1 || k < 1)
        throw ParseFailure("gen_points needs n >= 1 and k >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, domain_w);
    std::uniform_real_distribution<double> uy(0.0, domain_h);

    Dataset ds;
    ds.domain = BBox{0, 0, domain_w, domain_h};
    double rx = domain_w * cluster_radius_frac;
    double ry = domain_h * cluster_radius_frac;
    std::uniform_real_distribution<double> ox(-rx, rx);
    std::uniform_real_distribution<double> oy(-ry, ry);

    for (int i = 0; i < k; ++i)
        ds.true_centers.push_back({snap(ux(rng)), snap(uy(rng))});

    std::uniform_int_distribution<int> pick(0, k - 1);
    for (int64_t i = 0; i < n; ++i) {
        const Point &c = ds.true_centers[static_cast<size_t>(pick(rng))];
        double x = std::clamp(c.x + ox(rng), 0.0, domain_w);
        double y = std::clamp(c.y + oy(rng), 0.0, domain_h);
        ds.points.push_back({snap(x), snap(y)});
    }

    std::uniform_real_distribution<double> cx(0.0, domain_w * corner_frac);
    std::uniform_real_distribution<double> cy(0.0, domain_h * corner_frac);
    for (int i = 0; i < k; ++i)
        ds.init_centers.push_back({snap(cx(rng)), snap(cy(rng))});
    return ds;
}

std::vector<std::string> read_lines(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ParseFailure("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

void write_lines(const std::string &path, const std::vector<std::string> &lines) {
    std::ofstream out(path);
    if (!out)
        throw ParseFailure("cannot write " + path);
    for (const auto &l : lines)
        out << l << '\n';
}

}  // namespace sealmr

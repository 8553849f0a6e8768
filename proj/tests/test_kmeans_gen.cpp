#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "sealmr/kmeans.hpp"
#include "sealmr/metrics.hpp"

using namespace sealmr;

TEST_CASE("generator is deterministic for a seed") {
    auto a = gen_points(500, 5, 99);
    auto b = gen_points(500, 5, 99);
    CHECK(a.points == b.points);
    CHECK(a.init_centers == b.init_centers);
    auto c = gen_points(500, 5, 100);
    CHECK(a.points != c.points);
}

TEST_CASE("generator respects counts and the domain rectangle") {
    auto ds = gen_points(100000, 10, 1);
    CHECK(ds.points.size() == 100000);
    CHECK(ds.true_centers.size() == 10);
    CHECK(ds.init_centers.size() == 10);
    for (const auto &p : ds.points) {
        CHECK(p.x >= ds.domain.min_x);
        CHECK(p.x <= ds.domain.max_x);
        CHECK(p.y >= ds.domain.min_y);
        CHECK(p.y <= ds.domain.max_y);
    }
    // initial centroids sit in the bottom-left corner sub-area
    for (const auto &c : ds.init_centers) {
        CHECK(c.x <= ds.domain.min_x + 0.1 * (ds.domain.max_x - ds.domain.min_x));
        CHECK(c.y <= ds.domain.min_y + 0.1 * (ds.domain.max_y - ds.domain.min_y));
    }
}

TEST_CASE("coordinates sit on the 1/1024 grid so sums are exact") {
    auto ds = gen_points(2000, 4, 7);
    for (const auto &p : ds.points) {
        CHECK(p.x * 1024.0 == std::round(p.x * 1024.0));
        CHECK(p.y * 1024.0 == std::round(p.y * 1024.0));
    }
}

TEST_CASE("point text format round-trips exactly") {
    auto ds = gen_points(1000, 3, 3);
    auto lines = points_to_lines(ds.points);
    auto back = parse_points(lines);
    CHECK(back == ds.points);  // bit-exact through the decimal format
    CHECK_THROWS_AS(parse_point("not-a-point"), ParseFailure);
    CHECK_THROWS_AS(parse_point("1.0"), ParseFailure);
}

TEST_CASE("bounding box and diagonal") {
    std::vector<Point> pts = {{0, 0}, {3, 4}, {1, 1}};
    auto b = bounding_box(pts);
    CHECK(b.min_x == 0);
    CHECK(b.max_x == 3);
    CHECK(b.diagonal() == doctest::Approx(5.0));
}

TEST_CASE("sequential reference converges on well-separated clusters") {
    auto ds = gen_points(3000, 4, 11);
    auto ref = testutil::reference_kmeans(ds.points, ds.init_centers, 1e-3);
    CHECK(ref.iterations > 1);
    CHECK(ref.iterations < 500);
    // threshold 0 runs at least as many iterations and lands nearby
    auto exact = testutil::reference_kmeans(ds.points, ds.init_centers, 0.0);
    CHECK(exact.iterations >= ref.iterations);
}

TEST_CASE("metrics helpers") {
    CHECK(mean({2, 4, 6}) == doctest::Approx(4.0));
    CHECK(coefficient_of_variation({5, 5, 5}) == doctest::Approx(0.0));
    CHECK(coefficient_of_variation({1, 3}) > 0.0);

    std::ostringstream out;
    write_metrics_header(out);
    MetricsRow row{1, 2.5, 10, 20, 30, "sealed", 0.0};
    write_metrics_row(out, row);
    auto text = out.str();
    CHECK(text.find("iteration") != std::string::npos);
    CHECK(text.find("sealed") != std::string::npos);
}

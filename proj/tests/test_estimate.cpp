#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "anisok/error.hpp"
#include "anisok/estimate.hpp"
#include "anisok/simulate.hpp"
#include "oracles.hpp"

using namespace anisok;

namespace {

PointPattern two_points() {
    return PointPattern({{0.25, 0.25, 0.25}, {0.25, 0.25, 0.75}}, BoxWindow());
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

TEST_CASE("translation weight") {
    const BoxWindow w;
    CHECK(translation_weight(w, {0, 0, 0}) == 1.0);
    CHECK(translation_weight(w, {0.5, 0, 0}) == 2.0);
    CHECK(translation_weight(w, {0.5, 0.5, 0.5}) == 8.0);
    CHECK(translation_weight(w, {-0.5, 0, 0}) == 2.0);
    CHECK_THROWS_AS(translation_weight(w, {1.0, 0, 0}), Error);
    const BoxWindow big({0, 0, 0}, {2, 3, 4});
    CHECK(translation_weight(big, {0, 0, 0}) == doctest::Approx(1.0 / 24.0));
    CHECK(translation_weight(big, {1, 0, 0}) >= 1.0 / big.volume());
}

TEST_CASE("squared intensity estimate") {
    CHECK(intensity_sq_hat(two_points()) == 2.0);
    CHECK(intensity_sq_hat(oracle::random_pattern(500, BoxWindow(), 1)) == 249500.0);
    const BoxWindow w2({0, 0, 0}, {2, 1, 1});
    CHECK(intensity_sq_hat(oracle::random_pattern(10, w2, 2)) == doctest::Approx(22.5));
    CHECK_THROWS_AS(intensity_sq_hat(PointPattern({{0.5, 0.5, 0.5}}, BoxWindow())), Error);
}

TEST_CASE("two-point hand computation") {
    const auto p = two_points();
    const ConeParams c{0.6, 0.4636476};
    CHECK(conical_k(p, Direction::z_axis(), c) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(conical_k(p, Direction::x_axis(), c) == 0.0);
    CHECK(cylindrical_k(p, Direction::z_axis(), {0.1, 0.6}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(cylindrical_k(p, Direction::x_axis(), {0.1, 0.4}) == 0.0);
    CHECK(cylindrical_k(p, Direction::z_axis(), {0.1, 0.4}) == 0.0);
}

TEST_CASE("range errors") {
    const auto p = oracle::random_pattern(20, BoxWindow(), 3);
    CHECK_THROWS_AS(conical_k(p, Direction::z_axis(), {1.0, 0.4}), Error);
    CHECK_THROWS_AS(cylindrical_k(p, Direction::z_axis(), {0.6, 0.8}), Error);
    try {
        conical_k(p, Direction::z_axis(), {1.2, 0.4});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_range);
    }
}

TEST_CASE("grid-accelerated profiles match the brute-force oracle") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> un(2, 50);
    std::uniform_real_distribution<double> us(0.5, 3.0), ua(1.2, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const BoxWindow w({-0.3, 0.1, 2.0}, {-0.3 + us(gen), 0.1 + us(gen), 2.0 + us(gen)});
        const auto p = oracle::random_pattern(static_cast<std::size_t>(un(gen)), w, 1000 + trial);
        const AspectRatio a(ua(gen));
        const auto grid = make_r_grid(default_r_max(w, a), 40);
        ProfileRequest req{direction_set(3), {KKind::conical, KKind::cylindrical}, grid, a};
        const auto profiles = k_profiles(p, req);
        REQUIRE(profiles.size() == 6);
        for (const auto& prof : profiles) {
            const auto ref = oracle::brute_force_profile(p, prof.direction, prof.kind, grid, a);
            for (std::size_t k = 0; k < grid.size(); ++k) CHECK(close_rel(prof.values[k], ref[k], 1e-12));
        }
    }
}

TEST_CASE("profile at a grid point equals the single-radius estimator") {
    const auto p = oracle::random_pattern(300, BoxWindow(), 8);
    const AspectRatio a(2.0);
    const auto grid = make_r_grid(default_r_max(p.window(), a), 64);
    for (const auto& u : direction_set(3)) {
        const auto cn = k_profile(p, u, KKind::conical, grid, a);
        const auto cl = k_profile(p, u, KKind::cylindrical, grid, a);
        for (std::size_t k = 1; k < grid.size(); k += 7) {
            const auto s = equal_shape_link(grid[k], a);
            CHECK(close_rel(cn.values[k], conical_k(p, u, s.cone), 1e-12));
            CHECK(close_rel(cl.values[k], cylindrical_k(p, u, s.cylinder), 1e-12));
        }
    }
}

TEST_CASE("profiles: empty grid, monotone, nonnegative") {
    const auto p = oracle::random_pattern(200, BoxWindow(), 4);
    const AspectRatio a(2.5);
    CHECK(k_profile(p, Direction::z_axis(), KKind::conical, {}, a).values.empty());
    const auto grid = make_r_grid(default_r_max(p.window(), a), 128);
    for (auto kind : {KKind::conical, KKind::cylindrical}) {
        const auto prof = k_profile(p, Direction(1, 2, 3), kind, grid, a);
        CHECK(prof.values.front() == 0.0);
        CHECK(std::is_sorted(prof.values.begin(), prof.values.end()));
    }
}

TEST_CASE("default grid") {
    const BoxWindow w({0, 0, 0}, {2, 1, 3});
    const AspectRatio a(2.0);
    CHECK(default_r_max(w, a) == doctest::Approx(0.45 / std::sqrt(5.0)));
    const auto g = make_r_grid(0.2, 512);
    REQUIRE(g.size() == 512);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 0.2);
}

TEST_CASE("relabeling points leaves estimates bitwise unchanged") {
    auto p = oracle::random_pattern(400, BoxWindow(), 12);
    std::vector<Vec3> shuffled(p.points().begin(), p.points().end());
    std::mt19937_64 gen(3);
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    const PointPattern q(std::move(shuffled), p.window());
    const AspectRatio a(2.0);
    const ProfileRequest req{direction_set(3), {KKind::conical, KKind::cylindrical},
                             make_r_grid(default_r_max(p.window(), a), 100), a};
    const auto pa = k_profiles(p, req);
    const auto qa = k_profiles(q, req);
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i].values == qa[i].values);
}

TEST_CASE("pooling") {
    const AspectRatio a(2.0);
    const auto grid = make_r_grid(0.15, 50);
    std::vector<PointPattern> ps{oracle::random_pattern(100, BoxWindow(), 1)};
    const auto single = k_profile(ps[0], Direction::z_axis(), KKind::cylindrical, grid, a);
    CHECK(pooled_profile(ps, Direction::z_axis(), KKind::cylindrical, grid, a).values == single.values);
    ps.push_back(ps[0]);
    const auto twice = pooled_profile(ps, Direction::z_axis(), KKind::cylindrical, grid, a);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(close_rel(twice.values[k], single.values[k], 1e-14));

    SUBCASE("ratio of sums differs from mean of ratios for unequal counts") {
        std::vector<PointPattern> qs{oracle::random_pattern(30, BoxWindow(), 5),
                                     oracle::random_pattern(300, BoxWindow(), 6)};
        const auto num = [&](const PointPattern& p) {
            const auto pr = k_profile(p, Direction::z_axis(), KKind::conical, grid, a);
            return pr.values.back() * intensity_sq_hat(p);
        };
        const double expected = (num(qs[0]) + num(qs[1])) / (intensity_sq_hat(qs[0]) + intensity_sq_hat(qs[1]));
        const auto ros = pooled_profile(qs, Direction::z_axis(), KKind::conical, grid, a);
        CHECK(close_rel(ros.values.back(), expected, 1e-12));
        const auto mor = pooled_profile(qs, Direction::z_axis(), KKind::conical, grid, a, Pooling::mean_of_ratios);
        const double mean = 0.5 * (k_profile(qs[0], Direction::z_axis(), KKind::conical, grid, a).values.back() +
                                   k_profile(qs[1], Direction::z_axis(), KKind::conical, grid, a).values.back());
        CHECK(close_rel(mor.values.back(), mean, 1e-12));
    }

    CHECK_THROWS_AS(pooled_profile({}, Direction::z_axis(), KKind::conical, grid, a), Error);
    std::vector<PointPattern> mixed{oracle::random_pattern(10, BoxWindow(), 1),
                                    oracle::random_pattern(10, BoxWindow({0, 0, 0}, {2, 1, 1}), 2)};
    try {
        pooled_profile(mixed, Direction::z_axis(), KKind::conical, grid, a);
        FAIL("expected a window mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::window_mismatch);
    }
}

TEST_CASE("pooled results do not depend on the thread count") {
    std::vector<PointPattern> ps;
    for (int i = 0; i < 12; ++i) ps.push_back(oracle::random_pattern(150, BoxWindow(), 40 + i));
    const AspectRatio a(2.0);
    const ProfileRequest req{direction_set(3), {KKind::conical, KKind::cylindrical},
                             make_r_grid(default_r_max(BoxWindow(), a), 80), a};
    const auto one = pooled_profiles(ps, req, Pooling::ratio_of_sums, 1);
    const auto four = pooled_profiles(ps, req, Pooling::ratio_of_sums, 4);
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].values == four[i].values);
}

TEST_CASE("Poisson: directions agree and match element volumes") {
    std::vector<PointPattern> ps;
    for (std::uint64_t i = 0; i < 100; ++i) ps.push_back(simulate_poisson(500.0, BoxWindow(), 500 + i));
    const AspectRatio a(2.0);
    const std::vector<double> grid{0.0, 0.02, 0.04, 0.06, 0.08, 0.1};
    const ProfileRequest req{direction_set(3), {KKind::conical, KKind::cylindrical}, grid, a};
    const auto pooled = pooled_profiles(ps, req);
    for (const auto& prof : pooled) {
        for (std::size_t k = 1; k < grid.size(); ++k) {
            const auto s = equal_shape_link(grid[k], a);
            const double truth = prof.kind == KKind::conical ? cone_volume(s.cone) : cylinder_volume(s.cylinder);
            // the 0.02 point sees only a handful of pairs per replicate
            const double tol = grid[k] < 0.03 ? 0.15 : 0.05;
            CHECK(std::abs(prof.values[k] / truth - 1.0) < tol);
        }
    }
}

// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--known-red 5,7] [--only 3,4]
//
// The exit status is nonzero when a criterion fails that is not listed in
// --known-red. Listed criteria still print FAIL; the list only records which
// failures have been analysed as unattainable.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "anisok/cli.hpp"
#include "anisok/estimate.hpp"
#include "anisok/geometry.hpp"
#include "anisok/isotest.hpp"
#include "anisok/model.hpp"
#include "anisok/rng.hpp"
#include "anisok/simulate.hpp"
#include "oracles.hpp"

using namespace anisok;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 1;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ModelSpec model_of(BaseModel base, std::optional<double> c = std::nullopt) {
    ModelSpec m;
    m.base = base;
    if (c) m.compression = CompressionFactor(*c);
    return m;
}

// First r2 at which a power curve attains its maximum.
struct Peak {
    double r2;
    double power;
};
Peak first_peak(const std::vector<PowerPoint>& curve, bool cylindrical) {
    Peak best{0.0, -1.0};
    for (const auto& p : curve) {
        const double v = cylindrical ? p.power_cylindrical : p.power_conical;
        if (v > best.power) best = {p.r2, v};
    }
    return best;
}

const PowerPoint& nearest(const std::vector<PowerPoint>& curve, double r2) {
    return *std::min_element(curve.begin(), curve.end(), [&](const PowerPoint& a, const PowerPoint& b) {
        return std::abs(a.r2 - r2) < std::abs(b.r2 - r2);
    });
}

Outcome poisson_calibration() {
    const auto ps = simulate_campaign(model_of(PoissonSpec{500.0}), 100, kSeed);
    const AspectRatio a(2.0);
    const ProfileRequest req{direction_set(3), {KKind::conical, KKind::cylindrical}, {0.0, 0.03, 0.06, 0.09}, a};
    double worst = 0.0;
    for (const auto& prof : pooled_profiles(ps, req)) {
        for (std::size_t k = 1; k < req.r_grid.size(); ++k) {
            const auto s = equal_shape_link(req.r_grid[k], a);
            const double truth = prof.kind == KKind::conical ? cone_volume(s.cone)
                                                             : 2.0 * std::numbers::pi * s.cylinder.r_cl *
                                                                   s.cylinder.r_cl * s.cylinder.h;
            worst = std::max(worst, std::abs(prof.values[k] / truth - 1.0));
        }
    }
    return {worst < 0.05, fmt("max relative deviation %.4f over 3 axes x 2 kinds x 3 radii (tol 0.05)", worst)};
}

Outcome oracle_equivalence() {
    std::mt19937_64 gen(kSeed);
    std::uniform_int_distribution<int> un(2, 50);
    std::uniform_real_distribution<double> us(0.5, 2.0), ua(1.1, 4.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const BoxWindow w({0, 0, 0}, {us(gen), us(gen), us(gen)});
        const auto p = oracle::random_pattern(static_cast<std::size_t>(un(gen)), w, gen());
        const AspectRatio a(ua(gen));
        const auto grid = make_r_grid(default_r_max(w, a), 64);
        const ProfileRequest req{direction_set(3), {KKind::conical, KKind::cylindrical}, grid, a};
        for (const auto& prof : k_profiles(p, req)) {
            const auto ref = oracle::brute_force_profile(p, prof.direction, prof.kind, grid, a);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const double scale = std::max(std::abs(ref[k]), 1e-300);
                worst = std::max(worst, ref[k] == prof.values[k] ? 0.0 : std::abs(prof.values[k] - ref[k]) / scale);
            }
        }
    }
    return {worst <= 1e-12, fmt("max relative difference %.3g over 20 patterns (tol 1e-12)", worst)};
}

Outcome volume_oracles() {
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> ur(0.1, 2.0), ut(0.05, std::numbers::pi / 2);
    const Direction z = Direction::z_axis();
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const ConeParams c{ur(gen), ut(gen)};
        const auto mc = oracle::monte_carlo_volume([&](const Vec3& v) { return cone_contains(c, z, v); },
                                                   {c.r_cn, c.r_cn, c.r_cn}, 1000000, gen());
        worst = std::max(worst, std::abs(mc.volume - cone_volume(c)) / mc.std_error);
        const CylinderParams cl{ur(gen), ur(gen)};
        const auto mz = oracle::monte_carlo_volume([&](const Vec3& v) { return cylinder_contains(cl, z, v); },
                                                   {cl.r_cl, cl.r_cl, cl.h}, 1000000, gen());
        worst = std::max(worst, std::abs(mz.volume - cylinder_volume(cl)) / mz.std_error);
    }
    bool ball = true;
    for (double r : {0.05, 0.5, 1.0, 3.7}) {
        ball = ball && cone_volume({r, std::numbers::pi / 2}) == 4.0 / 3.0 * std::numbers::pi * r * r * r;
    }
    return {worst < 3.0 && ball, fmt("max |analytic - MC| = %.2f standard errors (tol 3); ball limit exact: %s", worst,
                                     ball ? "yes" : "no")};
}

Outcome parametrization() {
    std::mt19937_64 gen(kSeed);
    std::uniform_real_distribution<double> ur(1e-3, 5.0), ua(1.01, 10.0);
    double shape = 0.0, volume = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const auto e = equal_shape_link(ur(gen), AspectRatio(ua(gen)));
        const double rhs = e.cylinder.h * e.cylinder.h + e.cylinder.r_cl * e.cylinder.r_cl;
        shape = std::max(shape, std::abs(e.cone.r_cn * e.cone.r_cn - rhs) / rhs);
        const CylinderParams z{ur(gen), ur(gen)};
        const ConeParams c = equal_volume_link(z, ur(gen));
        volume = std::max(volume, std::abs(cone_volume(c) - cylinder_volume(z)) / cylinder_volume(z));
    }
    const double theta = equal_shape_link(1.0, AspectRatio(2.0)).cone.theta;
    const bool ok = shape <= 1e-12 && volume < 1e-10 && std::abs(theta - 0.4636476) <= 1e-7;
    return {ok, fmt("shape residual %.2g (tol 1e-12), volume residual %.2g (tol 1e-10), theta(a=2) = %.9f", shape,
                    volume, theta)};
}

Outcome nominal_level() {
    const auto ps = simulate_campaign(model_of(PoissonSpec{500.0}), 500, kSeed);
    TestConfig cfg;
    const auto curve = power_curve(ps, cfg, std::vector<double>{0.06});
    const double cn = curve[0].power_conical, cl = curve[0].power_cylindrical;
    const auto in = [](double p) { return p >= 0.02 && p <= 0.09; };
    return {in(cn) && in(cl), fmt("power at r2 = 0.06: conical %.3f, cylindrical %.3f (band [0.02, 0.09])", cn, cl)};
}

Outcome columnar_power() {
    const auto ps = simulate_campaign(model_of(PlcppSpec{}), 500, kSeed);
    const auto curve = power_curve(ps, TestConfig{}, {});
    const Peak cl = first_peak(curve, true);
    const Peak cn = first_peak(curve, false);
    const double cn_at = nearest(curve, cl.r2).power_conical;
    const bool ok = std::max(cl.power, cn.power) > 0.95 && cl.r2 < 0.02 && cl.power >= cn_at;
    return {ok, fmt("cylindrical peak %.3f at r2 = %.4f (need > 0.95, r2 < 0.02); conical there %.3f; conical peak "
                    "%.3f at r2 = %.4f",
                    cl.power, cl.r2, cn_at, cn.power, cn.r2)};
}

Outcome compression_ordering(const std::vector<PointPattern>& ps) {
    const auto curve = power_curve(ps, TestConfig{}, {});
    const PowerPoint& near_r = nearest(curve, 0.05);
    const PowerPoint& last = curve.back();
    const Peak cn = first_peak(curve, false);
    double plateau_hi = cn.r2;
    for (const auto& p : curve) if (p.power_conical == cn.power) plateau_hi = p.r2;
    const bool a = near_r.power_conical > near_r.power_cylindrical;
    const bool b = last.power_cylindrical > last.power_conical;
    const bool c = cn.r2 >= 0.035 && cn.r2 <= 0.065;
    return {a && b && c,
            fmt("r2 = %.4f: conical %.3f vs cylindrical %.3f [%s]; r2 = %.4f: cylindrical %.3f vs conical %.3f [%s]; "
                "conical argmax %.4f [%s] (maximum %.3f held on [%.4f, %.4f])",
                near_r.r2, near_r.power_conical, near_r.power_cylindrical, a ? "ok" : "no", last.r2,
                last.power_cylindrical, last.power_conical, b ? "ok" : "no", cn.r2, c ? "ok" : "no", cn.power, cn.r2,
                plateau_hi)};
}

Outcome aspect_monotonicity() {
    PlcppSpec spec;
    spec.sigma = 0.01;
    const auto ps = simulate_campaign(model_of(spec), 500, kSeed);
    std::vector<double> peaks;
    std::string detail;
    for (double a : {1.5, 2.0, 2.5, 3.0}) {
        TestConfig cfg;
        cfg.aspect = AspectRatio(a);
        const Peak p = first_peak(power_curve(ps, cfg, {}), true);
        peaks.push_back(p.power);
        detail += fmt("%sa=%.1f: %.3f", detail.empty() ? "" : ", ", a, p.power);
    }
    bool ok = true;
    for (std::size_t i = 1; i < peaks.size(); ++i) ok = ok && peaks[i] >= peaks[i - 1] - 0.03;
    return {ok, "peak cylindrical power " + detail + " (nondecreasing within 0.03)"};
}

Outcome simulator_contracts() {
    const auto count_check = [](const std::vector<PointPattern>& ps, double& mean, double& se) {
        double s = 0.0, s2 = 0.0;
        for (const auto& p : ps) {
            const double n = static_cast<double>(p.size());
            s += n;
            s2 += n * n;
        }
        const double m = static_cast<double>(ps.size());
        mean = s / m;
        se = std::sqrt((s2 / m - mean * mean) / (m - 1.0));
        return std::abs(mean - 500.0) <= 3.0 * se;
    };
    double pm, pse, lm, lse;
    const bool poisson = count_check(simulate_campaign(model_of(PoissonSpec{500.0}), 500, kSeed), pm, pse);
    const bool plcpp = count_check(simulate_campaign(model_of(PlcppSpec{}), 500, kSeed), lm, lse);

    double matern_min = 1e300, packing_min = 1e300;
    for (const auto& p : simulate_campaign(model_of(HardCoreSpec{500.0, 0.05, HardCoreKind::matern}), 500, kSeed)) {
        matern_min = std::min(matern_min, min_pair_distance(p.points()));
    }
    const HardCoreSpec pk{500.0, 0.05, HardCoreKind::packing};
    const auto packings = simulate_campaign(model_of(pk), 500, kSeed);
    bool counts_kept = true, volume_kept = true;
    for (const auto& p : packings) {
        packing_min = std::min(packing_min, min_periodic_distance(p.points(), p.window()));
        for (double c : {0.7, 0.8, 0.9}) {
            const auto q = compress(p, CompressionFactor(c));
            counts_kept = counts_kept && q.size() == p.size();
            volume_kept = volume_kept && std::abs(q.window().volume() - p.window().volume()) <= 1e-12;
        }
    }
    const bool ok = poisson && plcpp && matern_min >= 0.05 && packing_min >= 0.1 && counts_kept && volume_kept;
    return {ok, fmt("Poisson mean %.2f (se %.2f), PLCPP mean %.2f (se %.2f); min distance Matern %.4f (>= R), "
                    "packing %.4f (>= 2R); compress keeps count: %s, volume: %s",
                    pm, pse, lm, lse, matern_min, packing_min, counts_kept ? "yes" : "no",
                    volume_kept ? "yes" : "no")};
}

std::string run_capture(std::vector<std::string> args, int& code) {
    args.insert(args.begin(), "anisok");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "anisok_acceptance_determinism";
    fs::remove_all(root);
    bool ok = true;
    std::size_t compared = 0;
    int code = 0;
    const std::vector<std::vector<std::string>> campaigns{
        {"--model", "plcpp", "--m", "24", "--seed", "1"},
        {"--model", "packing", "--compress-c", "0.7", "--m", "24", "--seed", "1"},
        {"--model", "matern", "--m", "24", "--seed", "1"}};
    for (std::size_t c = 0; c < campaigns.size(); ++c) {
        const fs::path first = root / ("c" + std::to_string(c) + "_t1");
        const fs::path second = root / ("c" + std::to_string(c) + "_t4");
        auto args = campaigns[c];
        args.insert(args.begin(), "simulate");
        auto a1 = args, a4 = args;
        a1.insert(a1.end(), {"--threads", "1", "--out", first.string()});
        run_capture(a1, code);
        ok = ok && code == 0;
        // rerun from the manifest alone, with a different worker count
        a4 = {"simulate", "--config", (first / "manifest.txt").string(), "--threads", "4", "--out", second.string()};
        run_capture(a4, code);
        ok = ok && code == 0;
        for (const auto& entry : fs::directory_iterator(first)) {
            ok = ok && slurp(entry.path()) == slurp(second / entry.path().filename());
            ++compared;
        }
        for (const char* cmd : {"estimate", "test", "power"}) {
            std::vector<std::string> base{cmd, "--input", first.string(), "--grid", "128"};
            auto t1 = base, t4 = base;
            t1.insert(t1.end(), {"--threads", "1"});
            t4.insert(t4.end(), {"--threads", "4"});
            const std::string o1 = run_capture(t1, code);
            ok = ok && code == 0;
            const std::string o4 = run_capture(t4, code);
            ok = ok && code == 0 && o1 == o4 && !o1.empty();
            ++compared;
        }
    }
    fs::remove_all(root);
    return {ok, fmt("%zu outputs compared byte for byte across manifest reruns and 1 vs 4 threads", compared)};
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> known_red, only;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--known-red") known_red = parse_list(argv[i + 1]);
        else if (flag == "--only") only = parse_list(argv[i + 1]);
    }

    std::vector<PointPattern> packings;
    const auto compressed_packings = [&]() -> const std::vector<PointPattern>& {
        if (packings.empty()) {
            packings = simulate_campaign(model_of(HardCoreSpec{500.0, 0.05, HardCoreKind::packing}, 0.7), 500, kSeed);
        }
        return packings;
    };

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"Poisson calibration", poisson_calibration},
        {"brute-force oracle equivalence", oracle_equivalence},
        {"volume oracles", volume_oracles},
        {"parametrization consistency", parametrization},
        {"nominal test level", nominal_level},
        {"columnar power", columnar_power},
        {"compression power ordering", [&] { return compression_ordering(compressed_packings()); }},
        {"aspect-ratio monotonicity", aspect_monotonicity},
        {"simulator contracts", simulator_contracts},
        {"determinism", determinism},
    };

    int unexpected = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string tag;
        if (!o.pass) {
            if (known_red.count(id)) {
                tag = " [known red]";
            } else {
                ++unexpected;
            }
        }
        std::cout << "AC" << id << " " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": " << o.detail
                  << fmt(" (%.1fs)", secs) << tag << std::endl;
    }
    return unexpected == 0 ? 0 : 1;
}

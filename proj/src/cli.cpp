#include "anisok/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "anisok/error.hpp"
#include "anisok/estimate.hpp"
#include "anisok/isotest.hpp"
#include "anisok/pattern_io.hpp"
#include "anisok/rng.hpp"

namespace fs = std::filesystem;

namespace anisok::cli {

namespace {

[[noreturn]] void bad_flag(const std::string& flag, const std::string& what) {
    throw Error(ErrorCode::invalid_argument, "invalid " + flag + ": " + what);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        std::string tok(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        const auto b = tok.find_first_not_of(" \t");
        const auto e = tok.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string() : tok.substr(b, e - b + 1));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double to_double(const std::string& tok, const std::string& flag) {
    try {
        std::size_t used = 0;
        const double x = std::stod(tok, &used);
        if (used != tok.size()) bad_flag(flag, "'" + tok + "' is not a number");
        return x;
    } catch (const std::logic_error&) {
        bad_flag(flag, "'" + tok + "' is not a number");
    }
}

BoxWindow parse_window(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 6) bad_flag("--window", "expected x_lo,x_hi,y_lo,y_hi,z_lo,z_hi");
    Vec3 lo, hi;
    for (int i = 0; i < 3; ++i) {
        lo[i] = to_double(parts[2 * i], "--window");
        hi[i] = to_double(parts[2 * i + 1], "--window");
    }
    try {
        return {lo, hi};
    } catch (const Error& e) {
        bad_flag("--window", e.what());
    }
}

std::vector<KKind> parse_kinds(const std::string& kind) {
    if (kind == "both") return {KKind::cylindrical, KKind::conical};
    if (kind == "conical") return {KKind::conical};
    if (kind == "cylindrical") return {KKind::cylindrical};
    bad_flag("--kind", "expected conical, cylindrical or both");
}

AspectRatio aspect_of(double a) {
    try {
        return AspectRatio(a);
    } catch (const Error& e) {
        bad_flag("--aspect", e.what());
    }
}

// Writes to --out, or to `fallback` when --out is empty or "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), os_(&fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
            os_ = &file_;
        }
    }
    std::ostream& stream() { return *os_; }
    void close() {
        os_->flush();
        if (!*os_) throw Error(ErrorCode::io, "write to '" + (path_.empty() ? "stdout" : path_) + "' failed");
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* os_;
};

void echo_model(std::ostream& os, const ModelSpec& model) {
    os << "# model = " << model_name(model) << "\n";
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            os << "# rho = " << format_double(spec.rho) << "\n";
            if constexpr (std::is_same_v<T, PlcppSpec>) {
                os << "# rho-l = " << format_double(spec.rho_l) << "\n";
                os << "# alpha = " << format_double(spec.alpha) << "\n";
                os << "# sigma = " << format_double(spec.sigma) << "\n";
            } else if constexpr (std::is_same_v<T, HardCoreSpec>) {
                os << "# hardcore-r = " << format_double(spec.radius) << "\n";
            }
        },
        model.base);
    if (model.compression) os << "# compress-c = " << format_double(model.compression->value()) << "\n";
    const BoxWindow& w = model.window;
    os << "# window = ";
    for (int i = 0; i < 3; ++i) {
        os << (i ? "," : "") << format_double(w.lo()[i]) << "," << format_double(w.hi()[i]);
    }
    os << "\n";
}

struct Source {
    std::vector<PointPattern> patterns;
    std::vector<std::string> files;
    std::string units;
    std::optional<ModelSpec> model;
    std::string seed = "NA";
};

std::optional<std::string> manifest_seed(const std::vector<std::string>& inputs) {
    for (const auto& in : inputs) {
        const fs::path manifest = fs::path(in) / "manifest.txt";
        if (!fs::is_directory(in) || !fs::exists(manifest)) continue;
        std::ifstream is(manifest);
        std::string line;
        while (std::getline(is, line)) {
            const auto eq = line.find('=');
            if (eq == std::string::npos || line.starts_with("#")) continue;
            if (split(line.substr(0, eq), '\t').front() != "seed" && split(line.substr(0, eq), ' ').front() != "seed")
                continue;
            std::string value = split(line.substr(eq + 1), ',').front();
            std::erase(value, '"');
            if (!value.empty()) return value;
        }
    }
    return std::nullopt;
}

Source load_inputs(const Options& opts) {
    Source src;
    std::vector<fs::path> paths;
    for (const auto& in : opts.input) paths.emplace_back(in);
    for (const auto& path : expand_pattern_paths(paths)) {
        PatternFile file = read_pattern_file(path);
        if (!src.files.empty() && file.units != src.units) {
            throw Error(ErrorCode::format, "'" + path.string() + "' declares units '" + file.units +
                                               "' but earlier inputs use '" + src.units + "'");
        }
        src.units = file.units;
        src.files.push_back(path.string());
        src.patterns.push_back(std::move(file.pattern));
    }
    if (auto seed = manifest_seed(opts.input)) src.seed = *seed;
    return src;
}

Source obtain_patterns(const Options& opts) {
    if (!opts.input.empty()) return load_inputs(opts);
    Source src;
    src.model = build_model(opts);
    src.patterns = simulate_campaign(*src.model, opts.m, opts.seed, opts.threads);
    src.seed = std::to_string(opts.seed);
    return src;
}

void echo_source(std::ostream& os, const Source& src) {
    if (src.model) {
        echo_model(os, *src.model);
    } else {
        os << "# inputs = " << src.files.size() << " pattern files\n";
        for (const auto& f : src.files) os << "# input: " << f << "\n";
    }
    if (!src.units.empty()) os << "# units = " << src.units << "\n";
    os << "# m = " << src.patterns.size() << "\n";
    os << "# seed = " << src.seed << "\n";
}

TestConfig base_config(const Options& opts, double a) {
    TestConfig cfg;
    cfg.aspect = aspect_of(a);
    cfg.alpha_level = opts.level;
    cfg.grid_points = opts.grid;
    cfg.r_max = opts.r_max.value_or(0.0);
    cfg.exclude_self = opts.exclude_self;
    if (!(opts.level > 0.0 && opts.level < 1.0)) bad_flag("--level", "must lie in (0, 1)");
    if (opts.grid < 2) bad_flag("--grid", "must be >= 2");
    return cfg;
}

void write_power_header(std::ostream& os) {
    os << "a,r2,power_conical,power_cylindrical,m,seed\n";
}

void write_power_row(std::ostream& os, const PowerPoint& p, std::size_t m, const std::string& seed) {
    os << format_double(p.aspect) << "," << format_double(p.r2) << "," << format_double(p.power_conical) << ","
       << format_double(p.power_cylindrical) << "," << m << "," << seed << "\n";
}

}  // namespace

ModelSpec build_model(const Options& opts) {
    ModelSpec model;
    model.window = parse_window(opts.window);
    const double rho = opts.rho.value_or(500.0);
    if (opts.model == "poisson") {
        model.base = PoissonSpec{rho};
    } else if (opts.model == "plcpp") {
        PlcppSpec s;
        s.rho_l = opts.rho_l;
        s.alpha = opts.alpha;
        s.rho = opts.rho.value_or(opts.rho_l * opts.alpha);
        s.sigma = opts.sigma;
        model.base = s;
    } else if (opts.model == "matern" || opts.model == "packing") {
        model.base = HardCoreSpec{rho, opts.hardcore_r,
                                  opts.model == "matern" ? HardCoreKind::matern : HardCoreKind::packing};
    } else {
        bad_flag("--model", "'" + opts.model + "' is not one of poisson, plcpp, matern, packing");
    }
    if (opts.compress_c) {
        try {
            model.compression = CompressionFactor(*opts.compress_c);
        } catch (const Error& e) {
            bad_flag("--compress-c", e.what());
        }
    }
    try {
        validate(model);
    } catch (const Error& e) {
        throw Error(e.code(), std::string("invalid model specification (--model ") + opts.model + "): " + e.what());
    }
    return model;
}

std::vector<double> parse_r2_grid(std::string_view text) {
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) bad_flag("--r2-grid", "range form is lo:hi:n");
        const double lo = to_double(parts[0], "--r2-grid");
        const double hi = to_double(parts[1], "--r2-grid");
        const double nd = to_double(parts[2], "--r2-grid");
        if (!(nd >= 1.0) || nd != std::floor(nd)) bad_flag("--r2-grid", "n must be a positive integer");
        const auto n = static_cast<std::size_t>(nd);
        if (n == 1) return {hi};
        for (std::size_t i = 0; i < n; ++i) {
            out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
        out.back() = hi;
        return out;
    }
    for (const auto& tok : split(text, ',')) {
        if (tok.empty()) continue;
        out.push_back(to_double(tok, "--r2-grid"));
    }
    if (out.empty()) bad_flag("--r2-grid", "no values given");
    return out;
}

std::string manifest_text(const Options& opts) {
    const ModelSpec model = build_model(opts);
    std::ostringstream os;
    os << "# anisok campaign manifest\n";
    os << "model = \"" << opts.model << "\"\n";
    std::visit(
        [&](const auto& spec) {
            using T = std::decay_t<decltype(spec)>;
            os << "rho = " << format_double(spec.rho) << "\n";
            if constexpr (std::is_same_v<T, PlcppSpec>) {
                os << "rho-l = " << format_double(spec.rho_l) << "\n";
                os << "alpha = " << format_double(spec.alpha) << "\n";
                os << "sigma = " << format_double(spec.sigma) << "\n";
            } else if constexpr (std::is_same_v<T, HardCoreSpec>) {
                os << "hardcore-r = " << format_double(spec.radius) << "\n";
            }
        },
        model.base);
    if (model.compression) os << "compress-c = " << format_double(model.compression->value()) << "\n";
    os << "window = \"" << opts.window << "\"\n";
    os << "m = " << opts.m << "\n";
    os << "seed = " << opts.seed << "\n";
    return os.str();
}

void cmd_simulate(const Options& opts, std::ostream& log) {
    if (opts.out.empty()) bad_flag("--out", "simulate needs an output directory");
    if (opts.m == 0) bad_flag("--m", "must be >= 1");
    const ModelSpec model = build_model(opts);
    const std::string manifest = manifest_text(opts);

    const fs::path out_dir(opts.out);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw Error(ErrorCode::io, "cannot create output directory '" + opts.out + "'");
    }
    // write into a staging directory first so a failure leaves no partial output
    const fs::path staging = out_dir / ".anisok-staging";
    fs::remove_all(staging, ec);
    if (!fs::create_directory(staging, ec) || ec) {
        throw Error(ErrorCode::io, "output directory '" + opts.out + "' is not writable");
    }
    const auto patterns = simulate_campaign(model, opts.m, opts.seed, opts.threads);
    std::vector<std::string> names;
    try {
        const int width = std::max<int>(5, static_cast<int>(std::to_string(opts.m - 1).size()));
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            std::string idx = std::to_string(i);
            std::string name = "pattern_" + std::string(width - idx.size(), '0') + idx + ".txt";
            PatternFile file;
            file.pattern = patterns[i];
            file.comments = {" anisok simulated pattern", " model = " + model_name(model),
                             " seed = " + std::to_string(opts.seed), " replicate = " + idx,
                             " replicate-seed = " + std::to_string(replicate_seed(opts.seed, i))};
            write_pattern_file(staging / name, file);
            names.push_back(std::move(name));
        }
        std::ofstream mf(staging / "manifest.txt", std::ios::binary | std::ios::trunc);
        mf << manifest;
        mf.flush();
        if (!mf) throw Error(ErrorCode::io, "cannot write manifest");
        mf.close();
        names.emplace_back("manifest.txt");
        for (const auto& name : names) fs::rename(staging / name, out_dir / name);
    } catch (...) {
        fs::remove_all(staging, ec);
        throw;
    }
    fs::remove_all(staging, ec);
    log << "wrote " << patterns.size() << " patterns and manifest.txt to " << opts.out << "\n";
}

void cmd_estimate(const Options& opts, std::ostream& out) {
    if (opts.input.empty()) bad_flag("--input", "estimate needs at least one pattern file or directory");
    if (opts.aspect.size() != 1) bad_flag("--aspect", "estimate takes a single aspect ratio");
    if (opts.grid < 2) bad_flag("--grid", "must be >= 2");
    const AspectRatio a = aspect_of(opts.aspect.front());
    const Source src = load_inputs(opts);
    const BoxWindow& w = src.patterns.front().window();
    const double bound = default_r_max(w, a);
    const double r_max = opts.r_max.value_or(bound);
    if (!(r_max > 0.0) || r_max > bound * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "r_max " << r_max << " outside the valid range (0, " << format_double(bound)
           << "] for this window and aspect ratio";
        throw Error(ErrorCode::out_of_range, os.str());
    }
    Pooling pooling = Pooling::ratio_of_sums;
    if (opts.pooling == "mean") {
        pooling = Pooling::mean_of_ratios;
    } else if (opts.pooling != "ratio") {
        bad_flag("--pooling", "expected ratio or mean");
    }

    const ProfileRequest req{direction_set(3), parse_kinds(opts.kind), make_r_grid(r_max, opts.grid), a};
    const auto profiles = pooled_profiles(src.patterns, req, pooling, opts.threads);

    Sink sink(opts.out, out);
    auto& os = sink.stream();
    os << "# anisok directional K-function estimates\n";
    echo_source(os, src);
    os << "# kind = " << opts.kind << "\n";
    os << "# aspect = " << format_double(a.value()) << "\n";
    os << "# r-max = " << format_double(r_max) << " (validity bound " << format_double(bound) << ")\n";
    os << "# grid = " << opts.grid << "\n";
    os << "# pooling = " << opts.pooling << "\n";
    os << "# cone: r_cn = r_cl * sqrt(a^2 + 1), theta = atan(1 / a); cylinder: h = a * r_cl\n";

    const std::size_t nk = req.kinds.size();
    os << "r_cl";
    for (std::size_t ki = 0; ki < nk; ++ki) {
        const std::string prefix = nk == 1 ? "" : std::string(to_string(req.kinds[ki])) + "_";
        for (const char* axis : {"x", "y", "z"}) os << "," << prefix << "K_" << axis;
    }
    os << "\n";
    for (std::size_t k = 0; k < req.r_grid.size(); ++k) {
        os << format_double(req.r_grid[k]);
        for (std::size_t ki = 0; ki < nk; ++ki) {
            for (std::size_t d = 0; d < 3; ++d) os << "," << format_double(profiles[d * nk + ki].values[k]);
        }
        os << "\n";
    }
    sink.close();
}

void cmd_test(const Options& opts, std::ostream& out) {
    if (opts.aspect.size() != 1) bad_flag("--aspect", "test takes a single aspect ratio; use power for sweeps");
    const auto r2s = parse_r2_grid(opts.r2_grid.empty() ? "0.06" : opts.r2_grid);
    if (r2s.size() != 1) bad_flag("--r2-grid", "test takes a single r2 value; use power for sweeps");
    TestConfig cfg = base_config(opts, opts.aspect.front());
    cfg.r2 = r2s.front();
    const Source src = obtain_patterns(opts);

    cfg.kind = KKind::conical;
    const IsotropyTestResult cn = run_test(src.patterns, cfg, opts.threads);
    cfg.kind = KKind::cylindrical;
    const IsotropyTestResult cl = run_test(src.patterns, cfg, opts.threads);

    Sink sink(opts.out, out);
    auto& os = sink.stream();
    os << "# anisok isotropy test\n";
    echo_source(os, src);
    os << "# level = " << format_double(opts.level) << "\n";
    os << "# grid = " << opts.grid << "\n";
    os << "# threshold-conical = " << format_double(cn.threshold) << "\n";
    os << "# threshold-cylindrical = " << format_double(cl.threshold) << "\n";
    os << "# exclude-self = " << (opts.exclude_self ? "true" : "false") << "\n";
    write_power_header(os);
    write_power_row(os, {cfg.aspect.value(), cfg.r2, cn.power, cl.power}, src.patterns.size(), src.seed);
    sink.close();

    if (!opts.details.empty()) {
        std::ostringstream dummy;
        Sink det(opts.details, dummy);
        auto& ds = det.stream();
        ds << "# per-replicate statistics, a = " << format_double(cfg.aspect.value())
           << ", r2 = " << format_double(cfg.r2) << "\n";
        ds << "replicate,t_xy_conical,t_z_conical,reject_conical,t_xy_cylindrical,t_z_cylindrical,"
              "reject_cylindrical\n";
        for (std::size_t i = 0; i < cn.t_xy.size(); ++i) {
            ds << i << "," << format_double(cn.t_xy[i]) << "," << format_double(cn.t_z[i]) << ","
               << (cn.rejections[i] ? 1 : 0) << "," << format_double(cl.t_xy[i]) << ","
               << format_double(cl.t_z[i]) << "," << (cl.rejections[i] ? 1 : 0) << "\n";
        }
        det.close();
    }
}

void cmd_power(const Options& opts, std::ostream& out) {
    if (opts.aspect.empty()) bad_flag("--aspect", "no aspect ratios given");
    const std::vector<double> r2s = opts.r2_grid.empty() ? std::vector<double>{} : parse_r2_grid(opts.r2_grid);
    std::vector<TestConfig> cfgs;
    for (double a : opts.aspect) cfgs.push_back(base_config(opts, a));
    const Source src = obtain_patterns(opts);

    std::vector<std::vector<PowerPoint>> curves;
    for (const auto& cfg : cfgs) curves.push_back(power_curve(src.patterns, cfg, r2s, opts.threads));

    Sink sink(opts.out, out);
    auto& os = sink.stream();
    os << "# anisok power curves\n";
    echo_source(os, src);
    os << "# level = " << format_double(opts.level) << "\n";
    os << "# grid = " << opts.grid << "\n";
    os << "# r2-grid = " << (opts.r2_grid.empty() ? "profile grid" : opts.r2_grid) << "\n";
    os << "# exclude-self = " << (opts.exclude_self ? "true" : "false") << "\n";
    os << "# conical r2 is in r_cl units; its integral runs to r2 * sqrt(a^2 + 1)\n";
    write_power_header(os);
    for (const auto& curve : curves)
        for (const auto& p : curve) write_power_row(os, p, src.patterns.size(), src.seed);
    sink.close();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options opts;
    CLI::App app{"anisok: directional K-functions and isotropy tests for 3D point patterns", "anisok"};
    app.set_config("--config", "", "flat key = value file mirroring the long flags; flags win on conflict");
    app.require_subcommand(1);

    app.add_option("--model", opts.model, "poisson | plcpp | matern | packing")->capture_default_str();
    app.add_option("--rho", opts.rho, "intensity (plcpp default: rho-l * alpha)");
    app.add_option("--rho-l", opts.rho_l, "PLCPP line intensity")->capture_default_str();
    app.add_option("--alpha", opts.alpha, "PLCPP on-line point intensity")->capture_default_str();
    app.add_option("--sigma", opts.sigma, "PLCPP displacement standard deviation")->capture_default_str();
    app.add_option("--hardcore-r", opts.hardcore_r, "hard-core radius R")->capture_default_str();
    app.add_option("--compress-c", opts.compress_c, "compress by T_c = diag(1/sqrt(c), 1/sqrt(c), c)");
    app.add_option("--window", opts.window, "simulation window x_lo,x_hi,y_lo,y_hi,z_lo,z_hi")
        ->capture_default_str();
    app.add_option("--m", opts.m, "number of replicates")->capture_default_str();
    app.add_option("--seed", opts.seed, "campaign seed")->capture_default_str();
    app.add_option("--kind", opts.kind, "conical | cylindrical | both")->capture_default_str();
    app.add_option("--aspect", opts.aspect, "cylinder aspect ratio(s) a = h / r_cl")
        ->delimiter(',')
        ->capture_default_str();
    app.add_option("--r-max", opts.r_max, "upper end of the r_cl grid (default: validity bound)");
    app.add_option("--grid", opts.grid, "number of r_cl grid points")->capture_default_str();
    app.add_option("--r2-grid", opts.r2_grid, "r2 values: a,b,c or lo:hi:n");
    app.add_option("--level", opts.level, "significance level")->capture_default_str();
    app.add_option("--pooling", opts.pooling, "replicate pooling: ratio | mean")->capture_default_str();
    app.add_flag("--exclude-self", opts.exclude_self, "leave replicate i out of its own T_xy reference sample");
    app.add_option("--input", opts.input, "pattern files or directories")->delimiter(',');
    app.add_option("--out", opts.out, "output directory (simulate) or CSV file (default stdout)");
    app.add_option("--details", opts.details, "test: per-replicate statistics CSV");
    app.add_option("--threads", opts.threads, "worker threads (0 = all cores)")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "simulate a replicate campaign into --out")->fallthrough();
    auto* est = app.add_subcommand("estimate", "pooled directional K-function profiles as CSV")->fallthrough();
    auto* tst = app.add_subcommand("test", "isotropy test at a single r2")->fallthrough();
    auto* pow = app.add_subcommand("power", "power curves over r2 and aspect ratios")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*sim) cmd_simulate(opts, err);
        if (*est) cmd_estimate(opts, out);
        if (*tst) cmd_test(opts, out);
        if (*pow) cmd_power(opts, out);
    } catch (const Error& e) {
        err << "anisok: error (" << to_string(e.code()) << "): " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "anisok: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace anisok::cli

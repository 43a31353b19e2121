#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "anisok/error.hpp"
#include "anisok/estimate.hpp"
#include "anisok/geometry.hpp"
#include "anisok/isotest.hpp"
#include "anisok/model.hpp"
#include "anisok/pattern_io.hpp"
#include "anisok/simulate.hpp"

namespace py = pybind11;
using namespace anisok;

namespace {

Vec3 to_vec(const std::array<double, 3>& a) { return {a[0], a[1], a[2]}; }
std::array<double, 3> from_vec(const Vec3& v) { return {v.x, v.y, v.z}; }

PointPattern pattern_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> pts,
                                const BoxWindow& w) {
    if (pts.ndim() != 2 || pts.shape(1) != 3) throw py::value_error("points must have shape (n, 3)");
    const auto r = pts.unchecked<2>();
    std::vector<Vec3> v;
    v.reserve(static_cast<std::size_t>(r.shape(0)));
    for (py::ssize_t i = 0; i < r.shape(0); ++i) v.push_back({r(i, 0), r(i, 1), r(i, 2)});
    return {std::move(v), w};
}

py::array_t<double> pattern_to_array(const PointPattern& p) {
    py::array_t<double> out({static_cast<py::ssize_t>(p.size()), py::ssize_t{3}});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Vec3& x = p.points()[i];
        w(static_cast<py::ssize_t>(i), 0) = x.x;
        w(static_cast<py::ssize_t>(i), 1) = x.y;
        w(static_cast<py::ssize_t>(i), 2) = x.z;
    }
    return out;
}

Direction axis_of(const py::object& u) {
    if (py::isinstance<py::str>(u)) {
        const auto s = u.cast<std::string>();
        if (s == "x") return Direction::x_axis();
        if (s == "y") return Direction::y_axis();
        if (s == "z") return Direction::z_axis();
        throw py::value_error("axis must be 'x', 'y', 'z' or a 3-vector");
    }
    return Direction(to_vec(u.cast<std::array<double, 3>>()));
}

ModelSpec make_model(const std::string& name, double rho, double rho_l, double alpha, double sigma, double radius,
                     std::optional<double> compress_c, const BoxWindow& window) {
    ModelSpec m;
    m.window = window;
    if (name == "poisson") m.base = PoissonSpec{rho};
    else if (name == "plcpp") m.base = PlcppSpec{rho_l * alpha, rho_l, alpha, sigma, Direction::z_axis()};
    else if (name == "matern") m.base = HardCoreSpec{rho, radius, HardCoreKind::matern};
    else if (name == "packing") m.base = HardCoreSpec{rho, radius, HardCoreKind::packing};
    else throw py::value_error("model must be poisson, plcpp, matern or packing");
    if (compress_c) m.compression = CompressionFactor(*compress_c);
    validate(m);
    return m;
}

}  // namespace

PYBIND11_MODULE(_anisok, m) {
    m.doc() = "Directional K-functions and isotropy tests for 3D point patterns";

    static py::exception<Error> error(m, "AnisokError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::enum_<KKind>(m, "KKind").value("conical", KKind::conical).value("cylindrical", KKind::cylindrical);

    py::class_<BoxWindow>(m, "BoxWindow")
        .def(py::init<>())
        .def(py::init([](std::array<double, 3> lo, std::array<double, 3> hi) { return BoxWindow(to_vec(lo), to_vec(hi)); }),
             py::arg("lo"), py::arg("hi"))
        .def_property_readonly("lo", [](const BoxWindow& w) { return from_vec(w.lo()); })
        .def_property_readonly("hi", [](const BoxWindow& w) { return from_vec(w.hi()); })
        .def_property_readonly("volume", &BoxWindow::volume)
        .def_property_readonly("min_side", &BoxWindow::min_side)
        .def("__eq__", [](const BoxWindow& a, const BoxWindow& b) { return a == b; })
        .def("__repr__", [](const BoxWindow& w) {
            return "BoxWindow(" + format_double(w.lo().x) + ".." + format_double(w.hi().x) + ", " +
                   format_double(w.lo().y) + ".." + format_double(w.hi().y) + ", " + format_double(w.lo().z) +
                   ".." + format_double(w.hi().z) + ")";
        });

    py::class_<PointPattern>(m, "PointPattern")
        .def(py::init(&pattern_from_array), py::arg("points"), py::arg("window") = BoxWindow())
        .def_property_readonly("points", &pattern_to_array)
        .def_property_readonly("window", &PointPattern::window)
        .def("__len__", &PointPattern::size)
        .def("__eq__", [](const PointPattern& a, const PointPattern& b) { return a == b; });

    // geometry
    m.def("cone_volume", [](double r_cn, double theta) { return cone_volume({r_cn, theta}); }, py::arg("r_cn"),
          py::arg("theta"));
    m.def("cylinder_volume", [](double r_cl, double h) { return cylinder_volume({r_cl, h}); }, py::arg("r_cl"),
          py::arg("h"));
    m.def("cone_contains",
          [](double r_cn, double theta, const py::object& u, std::array<double, 3> v) {
              return cone_contains({r_cn, theta}, axis_of(u), to_vec(v));
          },
          py::arg("r_cn"), py::arg("theta"), py::arg("axis"), py::arg("v"));
    m.def("cylinder_contains",
          [](double r_cl, double h, const py::object& u, std::array<double, 3> v) {
              return cylinder_contains({r_cl, h}, axis_of(u), to_vec(v));
          },
          py::arg("r_cl"), py::arg("h"), py::arg("axis"), py::arg("v"));
    m.def("equal_shape_link",
          [](double r_cl, double a) {
              const auto e = equal_shape_link(r_cl, AspectRatio(a));
              return py::dict(py::arg("r_cl") = e.cylinder.r_cl, py::arg("h") = e.cylinder.h,
                              py::arg("r_cn") = e.cone.r_cn, py::arg("theta") = e.cone.theta);
          },
          py::arg("r_cl"), py::arg("a") = 2.0);
    m.def("equal_volume_link",
          [](double r_cl, double h, double h_cn) {
              const auto c = equal_volume_link({r_cl, h}, h_cn);
              return py::make_tuple(c.r_cn, c.theta);
          },
          py::arg("r_cl"), py::arg("h"), py::arg("h_cn"), "Returns (r_cn, theta).");

    // simulation
    m.def("simulate",
          [](const std::string& model, std::size_t m_rep, std::uint64_t seed, double rho, double rho_l, double alpha,
             double sigma, double radius, std::optional<double> compress_c, const BoxWindow& window,
             unsigned threads) {
              const ModelSpec spec = make_model(model, rho, rho_l, alpha, sigma, radius, compress_c, window);
              py::gil_scoped_release release;
              return simulate_campaign(spec, m_rep, seed, threads);
          },
          py::arg("model") = "poisson", py::arg("m") = 1, py::arg("seed") = 1, py::arg("rho") = 500.0,
          py::arg("rho_l") = 200.0, py::arg("alpha") = 2.5, py::arg("sigma") = 0.001, py::arg("radius") = 0.05,
          py::arg("compress_c") = py::none(), py::arg("window") = BoxWindow(), py::arg("threads") = 0,
          "Simulate m replicates of a model campaign.");
    m.def("compress", [](const PointPattern& p, double c) { return compress(p, CompressionFactor(c)); },
          py::arg("pattern"), py::arg("c"));

    // estimation
    m.def("default_r_max", [](const BoxWindow& w, double a) { return default_r_max(w, AspectRatio(a)); },
          py::arg("window"), py::arg("a") = 2.0);
    m.def("k_profile",
          [](const py::object& patterns, const py::object& axis, KKind kind, std::vector<double> r_grid, double a) {
              std::vector<PointPattern> ps;
              if (py::isinstance<PointPattern>(patterns)) ps.push_back(patterns.cast<PointPattern>());
              else ps = patterns.cast<std::vector<PointPattern>>();
              const Direction u = axis_of(axis);
              py::gil_scoped_release release;
              return pooled_profile(ps, u, kind, r_grid, AspectRatio(a)).values;
          },
          py::arg("patterns"), py::arg("axis"), py::arg("kind"), py::arg("r_grid"), py::arg("a") = 2.0,
          "Directional K estimate on r_grid (r_cl values); a list of patterns is pooled by ratio of sums.");

    // isotropy test
    m.def("isotropy_test",
          [](const std::vector<PointPattern>& ps, KKind kind, double r2, double a, double level,
             std::size_t grid_points, bool exclude_self, unsigned threads) {
              TestConfig cfg;
              cfg.kind = kind;
              cfg.r2 = r2;
              cfg.aspect = AspectRatio(a);
              cfg.alpha_level = level;
              cfg.grid_points = grid_points;
              cfg.exclude_self = exclude_self;
              IsotropyTestResult r;
              {
                  py::gil_scoped_release release;
                  r = run_test(ps, cfg, threads);
              }
              return py::dict(py::arg("t_xy") = r.t_xy, py::arg("t_z") = r.t_z, py::arg("threshold") = r.threshold,
                              py::arg("rejections") = r.rejections, py::arg("power") = r.power);
          },
          py::arg("patterns"), py::arg("kind") = KKind::cylindrical, py::arg("r2") = 0.06, py::arg("a") = 2.0,
          py::arg("level") = 0.05, py::arg("grid_points") = 512, py::arg("exclude_self") = false,
          py::arg("threads") = 0);
    m.def("power_curve",
          [](const std::vector<PointPattern>& ps, std::vector<double> r2_grid, double a, double level,
             std::size_t grid_points, unsigned threads) {
              TestConfig cfg;
              cfg.aspect = AspectRatio(a);
              cfg.alpha_level = level;
              cfg.grid_points = grid_points;
              std::vector<PowerPoint> curve;
              {
                  py::gil_scoped_release release;
                  curve = power_curve(ps, cfg, r2_grid, threads);
              }
              py::list out;
              for (const auto& p : curve) out.append(py::make_tuple(p.r2, p.power_conical, p.power_cylindrical));
              return out;
          },
          py::arg("patterns"), py::arg("r2_grid") = std::vector<double>{}, py::arg("a") = 2.0,
          py::arg("level") = 0.05, py::arg("grid_points") = 512, py::arg("threads") = 0,
          "List of (r2, power_conical, power_cylindrical).");

    // files
    m.def("read_pattern", [](const std::filesystem::path& path) { return read_pattern_file(path).pattern; },
          py::arg("path"));
    m.def("write_pattern",
          [](const std::filesystem::path& path, const PointPattern& p, const std::string& units) {
              write_pattern_file(path, {p, units, {}});
          },
          py::arg("path"), py::arg("pattern"), py::arg("units") = "");
}

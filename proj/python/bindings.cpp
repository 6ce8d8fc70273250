#include "vwak/cantor.hpp"
#include "vwak/cli.hpp"
#include "vwak/config.hpp"
#include "vwak/covers.hpp"
#include "vwak/estimators.hpp"
#include "vwak/mass.hpp"
#include "vwak/measure.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace vwak;

namespace {

using MapList = std::vector<std::pair<std::string, std::string>>;

Ifs1D make_ifs(const MapList& maps)
{
    std::vector<Affine1D> out;
    for (const auto& [c, b] : maps) {
        out.push_back({parse_rational(c), parse_rational(b)});
    }
    return Ifs1D(std::move(out));
}

SchemeParams make_params(const std::string& v, int u, int m0, int depth, unsigned workers)
{
    SchemeParams p;
    p.v = parse_rational(v);
    p.u = u;
    p.m0 = m0;
    p.depth = depth;
    p.workers = workers;
    return p;
}

py::dict to_dict(const CountRow& r)
{
    py::dict d;
    d["m"] = r.m;
    d["count_all"] = r.count_all;
    d["count_hits"] = r.count_hits;
    d["count_undecided"] = r.count_undecided;
    d["log2_radius_hi"] = r.log2_radius_hi;
    return d;
}

} // namespace

PYBIND11_MODULE(_vwak, m)
{
    m.doc() = "Rational-ball covers and Cantor schemes on self-similar sets";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SchemeError>(m, "SchemeError", PyExc_RuntimeError);
    py::register_exception<DegenerateFit>(m, "DegenerateFit", PyExc_RuntimeError);

    m.def("load_config",
          [](const std::string& path) {
              const Ifs1D ifs = load_config(path);
              MapList out;
              for (const auto& f : ifs.maps()) {
                  out.emplace_back(to_string(f.ratio), to_string(f.offset));
              }
              return out;
          },
          py::arg("path"), "Maps of an IFS config file as (c, b) strings, sorted by ratio.");

    m.def("dimension", [](const MapList& maps) { return solve_dimension(make_ifs(maps)); }, py::arg("maps"));

    m.def("hull",
          [](const MapList& maps) {
              const IntervalQ h = make_ifs(maps).hull();
              return std::make_pair(to_string(h.lo), to_string(h.hi));
          },
          py::arg("maps"));

    m.def("measure_interval",
          [](const MapList& maps, const std::string& lo, const std::string& hi, int depth) {
              const SelfSimilarMeasure mu(make_ifs(maps));
              const MeasureEnclosure e =
                  measure_interval(mu, IntervalQ::closed(parse_rational(lo), parse_rational(hi)), depth);
              return std::make_pair(e.lo, e.hi);
          },
          py::arg("maps"), py::arg("lo"), py::arg("hi"), py::arg("depth") = 20,
          "Enclosure (lo, hi) of mu([lo, hi]).");

    m.def("count_table",
          [](const MapList& maps, const std::string& v, const std::string& family, int m_first, int m_last,
             unsigned workers) {
              const Ifs1D ifs = make_ifs(maps);
              const auto rows = count_table(ifs, ApproxSpec::power_law(parse_rational(v)), parse_family(family),
                                            m_first, m_last, ifs.hull(), {std::nullopt, workers});
              py::list out;
              for (const auto& r : rows) {
                  out.append(to_dict(r));
              }
              return out;
          },
          py::arg("maps"), py::arg("v"), py::arg("family") = "A", py::arg("m_first"), py::arg("m_last"),
          py::arg("workers") = 0);

    m.def("critical_exponent",
          [](const std::vector<std::pair<int, double>>& counts, const std::string& v, double s) {
              std::vector<LevelCount> rows;
              int lo = std::numeric_limits<int>::max();
              int hi = std::numeric_limits<int>::min();
              for (const auto& [level, n] : counts) {
                  rows.push_back({level, n, 0.0});
                  lo = std::min(lo, level);
                  hi = std::max(hi, level);
              }
              const CriticalExponent ce = critical_exponent(rows, ApproxSpec::power_law(parse_rational(v)), s, lo, hi);
              py::dict d;
              d["l_star"] = ce.l_star;
              d["formula_value"] = ce.formula_value;
              d["abs_gap"] = ce.abs_gap;
              d["validated_regime"] = ce.validated_regime;
              return d;
          },
          py::arg("counts"), py::arg("v"), py::arg("s"), "Critical exponent from (m, count) pairs.");

    m.def("build_scheme",
          [](const MapList& maps, const std::string& v, int u, int m0, int depth, unsigned workers) {
              return dump_json(tree_to_json(build_scheme(make_ifs(maps), make_params(v, u, m0, depth, workers))));
          },
          py::arg("maps"), py::arg("v"), py::arg("u") = 2, py::arg("m0") = 3, py::arg("depth") = 2,
          py::arg("workers") = 0, "Builds the scheme and returns the tree dump as JSON text.");

    m.def("mass_summary",
          [](const std::string& tree_json) {
              CantorTree tree = tree_from_json(Json::parse(tree_json));
              const double s = solve_dimension(tree.ifs);
              const MassTree mt(std::move(tree));
              return dump_json(mass_report_json(mt, local_exponent_fit(mt, s)));
          },
          py::arg("tree_json"));

    m.def("frostman_scan",
          [](const std::string& tree_json, double t, unsigned workers) {
              const MassTree mt(tree_from_json(Json::parse(tree_json)));
              ScanSpec spec;
              spec.workers = workers;
              return dump_json(frostman_report_json(frostman_scan(mt, t, spec)));
          },
          py::arg("tree_json"), py::arg("t"), py::arg("workers") = 0);

    m.def("run",
          [](const std::vector<std::string>& args) {
              std::ostringstream out;
              std::ostringstream err;
              const int code = run_command(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Runs a CLI subcommand; returns (exit_code, stdout, stderr).");
}

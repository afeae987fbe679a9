#include "cds/attack.hpp"
#include "cds/error.hpp"
#include "cds/image.hpp"
#include "cds/scheme.hpp"
#include "cds/stats.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

namespace py = pybind11;
using namespace cds;

namespace {

std::vector<ImageId> to_ids(const std::vector<std::uint32_t>& raw) {
    std::vector<ImageId> out;
    out.reserve(raw.size());
    for (auto v : raw) out.push_back(ImageId{v});
    return out;
}

std::vector<std::uint32_t> from_ids(std::span<const ImageId> ids) {
    std::vector<std::uint32_t> out;
    out.reserve(ids.size());
    for (auto id : ids) out.push_back(id.value);
    return out;
}

Password to_password(const std::vector<std::uint32_t>& raw) {
    return Password{to_ids(raw)};
}

Polyline to_polyline(const std::vector<std::pair<double, double>>& points) {
    Polyline p;
    for (const auto& [x, y] : points) p.points.push_back({x, y, std::nullopt});
    return p;
}

std::vector<Cell> cells_of(const CellTrace& t) {
    return t.cells;
}

py::dict rate_dict(const RateEstimate& r) {
    py::dict d;
    d["trials"] = r.trials;
    d["successes"] = r.successes;
    d["rate"] = r.rate();
    d["lower_3sigma"] = r.lower_3sigma();
    d["upper_3sigma"] = r.upper_3sigma();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CDS graphical password core";

    py::register_exception<Error>(m, "CdsError", PyExc_ValueError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<int, int>(), py::arg("cols") = 4, py::arg("rows") = 6)
        .def_property_readonly("cols", &GridSpec::cols)
        .def_property_readonly("rows", &GridSpec::rows)
        .def_property_readonly("cell_count", &GridSpec::cell_count)
        .def("__repr__", [](const GridSpec& g) {
            return "GridSpec(cols=" + std::to_string(g.cols()) + ", rows=" + std::to_string(g.rows()) + ")";
        });

    py::class_<DegradeParams>(m, "DegradeParams")
        .def(py::init([](double alpha, double beta) { return DegradeParams{alpha, beta}; }), py::arg("alpha") = 0.5,
             py::arg("beta") = 64.0)
        .def_readwrite("alpha", &DegradeParams::alpha)
        .def_readwrite("beta", &DegradeParams::beta);

    py::class_<Challenge>(m, "Challenge")
        .def_readonly("nonce", &Challenge::nonce)
        .def_readonly("grid", &Challenge::grid)
        .def_readwrite("head_cell", &Challenge::head_cell)
        .def_readwrite("tail_cell", &Challenge::tail_cell)
        .def_readwrite("max_len", &Challenge::max_len)
        .def_property(
            "layout", [](const Challenge& c) { return from_ids(c.layout.cell_to_image); },
            [](Challenge& c, const std::vector<std::uint32_t>& ids) { c.layout.cell_to_image = to_ids(ids); });

    py::class_<Decision>(m, "Decision")
        .def_readonly("accepted", &Decision::accepted)
        .def_property_readonly("reason", [](const Decision& d) { return std::string(to_string(d.reason)); })
        .def("__bool__", [](const Decision& d) { return d.accepted; })
        .def("__repr__", [](const Decision& d) {
            return std::string("Decision(") + (d.accepted ? "accept" : "reject, " + std::string(to_string(d.reason))) +
                   ")";
        });

    m.def("max_trace_length", &max_trace_length, py::arg("grid"), py::arg("n"));

    m.def(
        "generate_challenge",
        [](const std::vector<std::uint32_t>& password, const GridSpec& grid, Seed seed,
           std::optional<std::size_t> max_len) {
            std::vector<ImageId> catalog;
            for (std::uint32_t i = 0; i < grid.cell_count(); ++i) catalog.push_back(ImageId{i});
            ChallengeConfig cfg;
            cfg.max_len_override = max_len;
            return generate_challenge(to_password(password), catalog, grid, cfg, seed);
        },
        py::arg("password"), py::arg("grid"), py::arg("seed"), py::arg("max_len") = py::none(),
        "Challenge over a catalog of one image per cell, ids 0..cells-1.");

    m.def(
        "map_polyline_to_cells",
        [](const std::vector<std::pair<double, double>>& points, const GridSpec& grid) {
            return cells_of(map_polyline_to_cells(to_polyline(points), grid));
        },
        py::arg("points"), py::arg("grid"));

    m.def(
        "verify_trace",
        [](const Challenge& ch, const std::vector<std::uint32_t>& password, const std::vector<Cell>& cells) {
            return verify_trace(ch, to_password(password), CellTrace{cells});
        },
        py::arg("challenge"), py::arg("password"), py::arg("cells"));

    m.def(
        "synthesize_trace",
        [](const Challenge& ch, const std::vector<std::uint32_t>& password) {
            return cells_of(synthesize_trace(ch, to_password(password)));
        },
        py::arg("challenge"), py::arg("password"));

    m.def(
        "jitter_trace",
        [](const std::vector<Cell>& cells, const Challenge& ch, const std::vector<std::uint32_t>& password,
           std::size_t budget, Seed seed) {
            return cells_of(jitter_trace(CellTrace{cells}, ch, to_password(password), budget, seed));
        },
        py::arg("cells"), py::arg("challenge"), py::arg("password"), py::arg("budget"), py::arg("seed"));

    m.def("degrade_pixel", [](int p, const DegradeParams& d) { return static_cast<int>(degrade_pixel(p, d)); },
          py::arg("p"), py::arg("params") = DegradeParams{});

    m.def("password_space", &password_space, py::arg("catalog_size"), py::arg("length"));
    m.def("entropy_bits", &entropy_bits, py::arg("catalog_size"), py::arg("length"));

    m.def(
        "simulate_guess_attack",
        [](const GridSpec& grid, std::size_t length, std::uint64_t trials, Seed seed, bool force_truth) {
            const auto r = simulate_guess_attack(SchemeConfig{grid, length, {}}, trials, seed,
                                                 force_truth ? GuessMode::ForceTruth : GuessMode::Uniform);
            py::dict d;
            d["password_match"] = rate_dict(r.password_match);
            d["trace_accept"] = rate_dict(r.trace_accept);
            return d;
        },
        py::arg("grid"), py::arg("length"), py::arg("trials"), py::arg("seed") = 1, py::arg("force_truth") = false);

    m.def(
        "candidate_count",
        [](const Challenge& ch, const std::vector<Cell>& cells, std::size_t length, double retention, Seed seed) {
            const Observation obs = observe_session(ch, CellTrace{cells}, retention, seed);
            return intersect_candidates(std::span(&obs, 1), length).size();
        },
        py::arg("challenge"), py::arg("cells"), py::arg("length"), py::arg("retention") = 1.0, py::arg("seed") = 0,
        "Candidate-set size after observing one session.");

    m.def(
        "shoulder_surf",
        [](const GridSpec& grid, std::size_t length, std::size_t sessions, double retention, std::uint64_t trials,
           std::size_t jitter, Seed seed) {
            ShoulderSurfParams p;
            p.sessions = sessions;
            p.retention = retention;
            p.trials = trials;
            p.jitter_budget = jitter;
            const auto report = shoulder_surf_experiment(SchemeConfig{grid, length, {}}, p, seed);
            py::list rows;
            for (const auto& r : report.rows) {
                rows.append(py::make_tuple(r.trial, r.observations, r.candidates, r.contains_truth));
            }
            return rows;
        },
        py::arg("grid"), py::arg("length"), py::arg("sessions") = 3, py::arg("retention") = 1.0,
        py::arg("trials") = 10, py::arg("jitter") = 0, py::arg("seed") = 1,
        "Rows of (trial, observations, candidates, contains_truth).");

    m.def(
        "t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = stats::t_test_two_tailed(a, b);
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "anova_f",
        [](const std::vector<std::vector<double>>& groups) {
            const auto r = stats::anova_f_one_tailed(groups);
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("groups"));
}

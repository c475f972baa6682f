#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loadisc/bench.hpp"
#include "loadisc/estimate.hpp"
#include "loadisc/graph_io.hpp"
#include "loadisc/load.hpp"
#include "loadisc/oracle.hpp"
#include "loadisc/simulate.hpp"

namespace py = pybind11;
using namespace loadisc;

namespace {

Dataset dataset_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> values,
                           std::vector<std::string> names, const std::string& kind) {
    if (values.ndim() != 2) throw std::invalid_argument("data must be 2-d (rows x columns)");
    const int rows = static_cast<int>(values.shape(0));
    const int cols = static_cast<int>(values.shape(1));
    if (names.empty()) names = default_node_names(cols);
    if (static_cast<int>(names.size()) != cols)
        throw std::invalid_argument("one name per column required");
    ColumnKind ck = kind == "discrete" ? ColumnKind::Discrete : ColumnKind::Continuous;
    Dataset out(rows, std::move(names), ck);
    auto v = values.unchecked<2>();
    for (int c = 0; c < cols; ++c) {
        double mx = 1.0;
        for (int r = 0; r < rows; ++r) {
            out.set_value(r, c, v(r, c));
            mx = std::max(mx, v(r, c));
        }
        if (ck == ColumnKind::Discrete) out.set_arity(c, static_cast<int>(mx) + 1);
    }
    return out;
}

py::array_t<double> dataset_to_array(const Dataset& d) {
    py::array_t<double> out({d.rows(), d.cols()});
    auto v = out.mutable_unchecked<2>();
    for (int r = 0; r < d.rows(); ++r)
        for (int c = 0; c < d.cols(); ++c) v(r, c) = d.value(r, c);
    return out;
}

/// Owning tester handle; every tester is wrapped in the caching layer.
struct PyTester {
    std::unique_ptr<CiTester> tester;

    bool independent(NodeId x, NodeId y, const std::vector<NodeId>& s) {
        return tester->independent(x, y, s);
    }
};

py::dict direction_dict(const DirectionResult& d) {
    py::dict out;
    out["relation"] = to_string(d.relation);
    out["identifiable"] = d.is_ident;
    out["adjustment_kind"] = to_string(d.kind);
    out["adjustment_sets"] = d.sets;
    return out;
}

py::dict result_dict(const LoadResult& r, const TestStats& stats) {
    py::dict out;
    out["x"] = r.x;
    out["y"] = r.y;
    out["x_to_y"] = direction_dict(r.xy);
    out["y_to_x"] = direction_dict(r.yx);
    out["ci_tests_executed"] = stats.executed;
    out["cache_hits"] = stats.cache_hits;
    return out;
}

}  // namespace

PYBIND11_MODULE(_loadisc, m) {
    m.doc() = "local causal discovery with statistically optimal adjustment sets";

    py::class_<Dag>(m, "Dag")
        .def(py::init<int, const std::vector<Edge>&>(), py::arg("n"), py::arg("edges"))
        .def_property_readonly("num_nodes", &Dag::num_nodes)
        .def("edges", &Dag::edges)
        .def("parents", &Dag::parents, py::arg("v"))
        .def("children", &Dag::children, py::arg("v"))
        .def("has_edge", &Dag::has_edge, py::arg("parent"), py::arg("child"))
        .def("topological_order", &Dag::topological_order);

    py::class_<Cpdag>(m, "Cpdag")
        .def(py::init<int>(), py::arg("n"))
        .def_property_readonly("num_nodes", &Cpdag::num_nodes)
        .def("add_directed", &Cpdag::add_directed)
        .def("add_undirected", &Cpdag::add_undirected)
        .def("directed_edges", &Cpdag::directed_edges)
        .def("undirected_edges", &Cpdag::undirected_edges)
        .def("parents", &Cpdag::parents)
        .def("children", &Cpdag::children)
        .def("siblings", &Cpdag::siblings)
        .def("adjacent", py::overload_cast<NodeId>(&Cpdag::adjacent, py::const_))
        .def("__eq__", [](const Cpdag& a, const Cpdag& b) { return a == b; });

    m.def("cpdag_from_dag", &cpdag_from_dag, py::arg("dag"));
    m.def("d_separated", &d_separated, py::arg("dag"), py::arg("x"), py::arg("y"), py::arg("s"));
    m.def("explicit_descendants", &explicit_descendants);
    m.def("possible_ancestor", &possible_ancestor);
    m.def("explicit_ancestor", &explicit_ancestor);
    m.def("is_amenable", &is_amenable_global, py::arg("cpdag"), py::arg("x"), py::arg("y"));
    m.def("optimal_adjustment_set", &oset_from_cpdag, py::arg("cpdag"), py::arg("x"), py::arg("y"));

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&dataset_from_array), py::arg("values"),
             py::arg("names") = std::vector<std::string>{}, py::arg("kind") = "continuous")
        .def_property_readonly("rows", &Dataset::rows)
        .def_property_readonly("cols", &Dataset::cols)
        .def_property_readonly("names", &Dataset::names)
        .def("to_array", &dataset_to_array)
        .def("to_csv", &Dataset::to_csv)
        .def_static("from_csv", [](const std::string& text) { return Dataset::from_csv_inferred(text); });

    py::class_<PyTester>(m, "CiTester")
        .def("independent", &PyTester::independent, py::arg("x"), py::arg("y"), py::arg("s"))
        .def_property_readonly("num_vars", [](const PyTester& t) { return t.tester->num_vars(); })
        .def_property_readonly("executed", [](const PyTester& t) { return t.tester->stats().executed; })
        .def_property_readonly("cache_hits",
                               [](const PyTester& t) { return t.tester->stats().cache_hits; });

    m.def(
        "dsep_tester",
        [](const Dag& d) { return PyTester{caching_wrapper(dsep_tester(d))}; },
        py::arg("dag"));
    m.def(
        "fisher_z_tester",
        [](const Dataset& d, double alpha) { return PyTester{caching_wrapper(fisher_z_tester(d, alpha))}; },
        py::arg("data"), py::arg("alpha") = 0.01);
    m.def(
        "g_square_tester",
        [](const Dataset& d, double alpha) { return PyTester{caching_wrapper(g_square_tester(d, alpha))}; },
        py::arg("data"), py::arg("alpha") = 0.01);

    m.def(
        "load",
        [](NodeId x, NodeId y, PyTester& t) {
            LoadResult r = load(x, y, *t.tester);
            return result_dict(r, t.tester->stats());
        },
        py::arg("x"), py::arg("y"), py::arg("tester"));
    m.def(
        "load_star",
        [](NodeId treatment, NodeId outcome, PyTester& t) {
            LoadResult r = load_star(treatment, outcome, *t.tester);
            return result_dict(r, t.tester->stats());
        },
        py::arg("treatment"), py::arg("outcome"), py::arg("tester"));
    m.def(
        "mb_by_mb_plus",
        [](NodeId x, NodeId y, PyTester& t) {
            LoadResult r = mb_by_mb_plus(x, y, *t.tester);
            return result_dict(r, t.tester->stats());
        },
        py::arg("x"), py::arg("y"), py::arg("tester"));
    m.def(
        "pc", [](PyTester& t) { return pc_algorithm(*t.tester); }, py::arg("tester"));
    m.def(
        "mb_by_mb",
        [](NodeId target, PyTester& t) {
            DiscoveryCache cache;
            LocalGraph g = mb_by_mb(target, *t.tester, cache);
            py::dict out;
            out["focal"] = g.focal;
            out["parents"] = g.parents();
            out["children"] = g.children();
            out["siblings"] = g.siblings();
            return out;
        },
        py::arg("target"), py::arg("tester"));

    py::class_<Scm>(m, "Scm")
        .def_static("linear_gaussian",
                    py::overload_cast<Dag, RngSeed>(&Scm::linear_gaussian), py::arg("dag"),
                    py::arg("seed"))
        .def_static("binary_cpt", py::overload_cast<Dag, RngSeed, int>(&Scm::binary_cpt),
                    py::arg("dag"), py::arg("seed"), py::arg("max_parents") = 16)
        .def("implied_covariance", &Scm::implied_covariance)
        .def("total_effect", &Scm::total_effect, py::arg("t"), py::arg("o"))
        .def_property_readonly("dag", &Scm::dag);

    m.def(
        "random_dag",
        [](int n, double expected_degree, int max_degree, RngSeed seed, int max_retries) {
            return random_dag(n, expected_degree, max_degree, seed, max_retries);
        },
        py::arg("n"), py::arg("expected_degree"), py::arg("max_degree"), py::arg("seed"),
        py::arg("max_retries") = 1000);
    m.def("sample_dataset", &sample_dataset, py::arg("scm"), py::arg("rows"), py::arg("seed"));
    m.def(
        "sample_target_pair",
        [](const Dag& d, const std::string& mode, RngSeed seed) {
            return sample_target_pair(
                d, mode == "identifiable" ? TargetMode::Identifiable : TargetMode::ExplicitAncestor,
                seed);
        },
        py::arg("dag"), py::arg("mode"), py::arg("seed"));
    m.def("binary_do_effect", &binary_do_effect, py::arg("scm"), py::arg("t"), py::arg("o"),
          py::arg("rows"), py::arg("seed"));

    m.def("ols_effect", &ols_effect, py::arg("data"), py::arg("t"), py::arg("o"), py::arg("z"));
    m.def("population_effect", &population_effect, py::arg("sigma"), py::arg("t"), py::arg("o"),
          py::arg("z"));
    m.def("asymptotic_variance", &asymptotic_variance, py::arg("sigma"), py::arg("t"),
          py::arg("o"), py::arg("z"));
    m.def("intervention_distance", &intervention_distance, py::arg("est_xy"), py::arg("est_yx"),
          py::arg("truth_xy"), py::arg("truth_yx"));
    m.def("f1_oset", &f1_oset, py::arg("estimated"), py::arg("truth"));

    m.def("enumerate_mec", &oracle::enumerate_mec, py::arg("cpdag"), py::arg("max_nodes") = 12);
    m.def("valid_adjustment_sets", &oracle::valid_adjustment_sets, py::arg("dag"), py::arg("t"),
          py::arg("o"));
    m.def("common_valid_set_exists", &oracle::common_valid_set_exists, py::arg("cpdag"),
          py::arg("t"), py::arg("o"), py::arg("max_nodes") = 12);

    m.def("graph_to_json", [](const Cpdag& g, std::vector<std::string> names) {
        return graph_to_json(NamedGraph::from_cpdag(g, std::move(names)));
    }, py::arg("cpdag"), py::arg("names") = std::vector<std::string>{});
    m.def("graph_from_json", [](const std::string& text) {
        NamedGraph g = graph_from_json(text);
        return py::make_tuple(g.graph, g.names);
    });
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vaclin/cfn.hpp"
#include "vaclin/io.hpp"
#include "vaclin/oracle.hpp"
#include "vaclin/search.hpp"
#include "vaclin/vac.hpp"

namespace py = pybind11;
using namespace vaclin;

namespace {

py::dict solve(const Cfn& p, const std::string& prop, std::optional<Cost> ub, std::int64_t nodes,
    double timeout, std::uint64_t seed)
{
    const auto level = parse_prop_level(prop);
    if (!level)
        throw py::value_error("unknown propagation level '" + prop + "'");
    SearchConfig cfg;
    cfg.prop = *level;
    cfg.initial_ub = ub;
    cfg.node_limit = nodes;
    cfg.time_limit = timeout;
    cfg.seed = seed;
    SolveOutcome out;
    {
        py::gil_scoped_release release;
        out = branch_and_bound(p, cfg);
    }
    py::dict d;
    d["status"] = to_string(out.status);
    d["cost"] = out.best_cost < p.top() ? py::cast(out.best_cost) : py::none();
    d["assignment"] = out.assignment;
    d["lower_bound"] = out.lower_bound;
    d["nodes"] = out.stats.nodes;
    d["root_lb"] = out.stats.root_lb;
    d["root_lb_nc"] = out.stats.root_lb_nc;
    d["root_lb_lp"] = out.stats.root_lb_lp;
    d["root_lb_vac"] = out.stats.root_lb_vac;
    d["seconds"] = out.stats.seconds;
    return d;
}

} // namespace

PYBIND11_MODULE(vaclin, m)
{
    m.doc() = "Cost function network solver with virtual arc consistency on linear constraints";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

    py::class_<Cfn>(m, "Cfn")
        .def(py::init<Cost>(), py::arg("top"))
        .def("add_variable", &Cfn::add_variable, py::arg("domain_size"))
        .def("set_unary", &Cfn::set_unary, py::arg("var"), py::arg("costs"))
        .def("add_binary", &Cfn::add_binary, py::arg("x"), py::arg("y"), py::arg("costs"))
        .def("add_linear", &Cfn::add_linear, py::arg("scope"), py::arg("weights"), py::arg("capacity"))
        .def("set_lb", &Cfn::set_lb)
        .def_property_readonly("num_variables", &Cfn::num_variables)
        .def_property_readonly("top", &Cfn::top)
        .def_property_readonly("lb", &Cfn::lb)
        .def("domain_size", &Cfn::domain_size)
        .def("unary", &Cfn::unary)
        .def("in_domain", &Cfn::in_domain)
        .def("cost", [](const Cfn& p, const std::vector<int>& t) {
            if (static_cast<int>(t.size()) != p.num_variables())
                throw py::value_error("one value per variable expected");
            return assignment_cost(p, t);
        })
        .def("copy", [](const Cfn& p) { return Cfn(p); });

    m.def("parse_native", [](const std::string& text) { return parse_native(text); });
    m.def("write_native", &write_native);
    m.def(
        "parse_opb",
        [](const std::string& text) {
            OpbModel model = opb_to_cfn(parse_opb(text));
            return py::make_tuple(std::move(model.cfn), model.offset);
        },
        "Returns (network, offset) with objective = cost + offset.");

    m.def("enforce_nc", [](Cfn& p) { return enforce_nc(p); });
    m.def(
        "vac_lin",
        [](Cfn& p, std::optional<Cost> theta_start) { return vac_lin(p, make_schedule(p, theta_start)); },
        py::arg("cfn"), py::arg("theta_start") = py::none(), "Runs VAC on the network in place and returns the gain of c0.");
    m.def("make_schedule", [](const Cfn& p, std::optional<Cost> t) { return make_schedule(p, t); }, py::arg("cfn"),
        py::arg("theta_start") = py::none());
    m.def("direct_lin_propagate", &direct_lin_propagate, py::arg("cfn"), py::arg("k"));
    m.def("solve", &solve, py::arg("cfn"), py::arg("prop") = "vac-root", py::arg("ub") = py::none(),
        py::arg("nodes") = 0, py::arg("timeout") = 0.0, py::arg("seed") = 0);
    m.def(
        "brute_force_optimum",
        [](const Cfn& p) {
            const auto r = oracle::brute_force_optimum(p);
            if (!r)
                throw py::value_error("instance too large for enumeration");
            return *r;
        },
        py::arg("cfn"));
}

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "r2dnet/discretize.hpp"
#include "r2dnet/dissipativity.hpp"
#include "r2dnet/network.hpp"
#include "r2dnet/quantize.hpp"
#include "r2dnet/roesser.hpp"
#include "r2dnet/sim2d.hpp"

namespace py = pybind11;
using namespace r2dnet;

namespace {

// (rows, cols, dim) array from a VectorField.
py::array_t<double> to_array(const VectorField& f) {
  py::array_t<double> out({f.rows(), f.cols(), f.dim()});
  auto view = out.mutable_unchecked<3>();
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < f.cols(); ++j) {
      for (int k = 0; k < f.dim(); ++k) view(i, j, k) = f(i, j)(k);
    }
  }
  return out;
}

py::dict trajectory_dict(const Grid2DTrajectory& t) {
  py::dict d;
  d["y"] = to_array(t.y);
  d["u"] = to_array(t.u);
  d["xh"] = to_array(t.xh);
  d["xv"] = to_array(t.xv);
  if (!t.y_quant.empty()) d["y_transmitted"] = to_array(t.y_quant);
  d["trigger_instants"] = t.trigger_instants;
  return d;
}

template <class Model>
void bind_blocks(py::class_<Model>& cls) {
  cls.def_readwrite("a11", &Model::a11)
      .def_readwrite("a12", &Model::a12)
      .def_readwrite("a21", &Model::a21)
      .def_readwrite("a22", &Model::a22)
      .def_readwrite("b1", &Model::b1)
      .def_readwrite("b2", &Model::b2)
      .def_readwrite("c1", &Model::c1)
      .def_readwrite("c2", &Model::c2)
      .def_readwrite("d", &Model::d)
      .def_property_readonly("nh", &Model::nh)
      .def_property_readonly("nv", &Model::nv)
      .def_property_readonly("m", &Model::m)
      .def_property_readonly("p", &Model::p)
      .def_property_readonly("a", &Model::a)
      .def_property_readonly("b", &Model::b)
      .def_property_readonly("c", &Model::c);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "2-D Roesser models under sampling, quantization and event-triggered transmission";

  static PyObject* error_type = py::exception<Error>(m, "Error").release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      auto cls = py::reinterpret_borrow<py::object>(error_type);
      py::object exc = cls(e.what());
      py::setattr(exc, "kind", py::str(to_string(e.kind())));
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  py::class_<SamplingSpec>(m, "SamplingSpec")
      .def(py::init([](double h1, double h2) {
             SamplingSpec s{h1, h2};
             s.validate();
             return s;
           }),
           py::arg("h1"), py::arg("h2"))
      .def_readonly("h1", &SamplingSpec::h1)
      .def_readonly("h2", &SamplingSpec::h2);

  py::class_<ContinuousRoesser2D> continuous(m, "ContinuousRoesser2D");
  continuous.def(py::init(&make_continuous), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
                 py::arg("nh"));
  bind_blocks(continuous);

  py::class_<DiscreteRoesser2D> discrete(m, "DiscreteRoesser2D");
  discrete.def(py::init(&make_discrete), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
               py::arg("nh"));
  bind_blocks(discrete);
  discrete.def_readonly("sampling", &DiscreteRoesser2D::sampling);

  m.def(
      "pde_to_roesser",
      [](double a0, double a1, double a2, double b) {
        Pde2ndOrderSpec spec;
        spec.a0 = a0;
        spec.a1 = a1;
        spec.a2 = a2;
        spec.b = b;
        return pde_to_roesser(spec);
      },
      py::arg("a0"), py::arg("a1"), py::arg("a2"), py::arg("b"),
      "Roesser form of s_xt = a1 s_t + a2 s_x + a0 s + b f with y = r + s.");

  m.def("phi_integral", &phi_integral, py::arg("a"), py::arg("h"));
  m.def("sample_exact", &sample_exact, py::arg("model"), py::arg("sampling"));

  py::class_<QsrSupply>(m, "QsrSupply")
      .def(py::init([](Matrix q, Matrix s, Matrix r) {
             QsrSupply out{std::move(q), std::move(s), std::move(r)};
             out.validate();
             return out;
           }),
           py::arg("q"), py::arg("s"), py::arg("r"))
      .def_readonly("q", &QsrSupply::q)
      .def_readonly("s", &QsrSupply::s)
      .def_readonly("r", &QsrSupply::r);
  m.def(
      "indices_to_qsr", [](double rho, double nu, int dim) { return indices_to_qsr({rho, nu}, dim); },
      py::arg("rho"), py::arg("nu"), py::arg("dim") = 1);
  m.def("static_gain_indices", &static_gain_indices, py::arg("k"), py::arg("nu"));

  m.def(
      "lmi_feasible",
      [](const DiscreteRoesser2D& disc, const QsrSupply& supply, double tol) {
        FeasibilityOptions options;
        options.tol = tol;
        const auto result = lmi_feasible(build_dissipation_lmi(disc, supply), options);
        py::dict d;
        d["status"] = result.status == FeasibilityStatus::Feasible     ? "feasible"
                      : result.status == FeasibilityStatus::Infeasible ? "infeasible"
                                                                       : "budget";
        d["best_lambda_max"] = result.best_lambda_max;
        d["lower_bound"] = result.lower_bound;
        if (result.certificate) {
          d["p_h"] = result.certificate->p_h;
          d["p_v"] = result.certificate->p_v;
        }
        return d;
      },
      py::arg("disc"), py::arg("supply"), py::arg("tol") = 1e-7);

  m.def(
      "maximize_rho",
      [](const DiscreteRoesser2D& disc, double nu, double tol_rho) {
        const auto r = maximize_rho(disc, nu, tol_rho);
        const char* status = r.status == RhoStatus::Ok ? "ok" : r.status == RhoStatus::Clamped ? "clamped" : "budget";
        return py::make_tuple(r.rho, status);
      },
      py::arg("disc"), py::arg("nu"), py::arg("tol_rho") = 1e-3);

  py::class_<LogQuantizerSpec>(m, "LogQuantizer")
      .def_static("from_theta", &LogQuantizerSpec::from_theta, py::arg("theta"), py::arg("dead_zone") = 0.0)
      .def_static("from_delta", &LogQuantizerSpec::from_delta, py::arg("delta"), py::arg("dead_zone") = 0.0)
      .def_property_readonly("theta", &LogQuantizerSpec::theta)
      .def_property_readonly("delta", &LogQuantizerSpec::delta)
      .def_property_readonly("dead_zone", &LogQuantizerSpec::dead_zone)
      .def("__call__", [](const LogQuantizerSpec& q, double v) { return quantize(q, v); });
  m.def("quantize", &quantize, py::arg("spec"), py::arg("v"));

  py::class_<LoopIndices>(m, "LoopIndices")
      .def(py::init([](double rho_p, double nu_p, double rho_c, double nu_c, double delta_p, double delta_c) {
             return LoopIndices{rho_p, nu_p, rho_c, nu_c, delta_p, delta_c};
           }),
           py::arg("rho_p"), py::arg("nu_p"), py::arg("rho_c"), py::arg("nu_c"), py::arg("delta_p"),
           py::arg("delta_c"))
      .def_readwrite("rho_p", &LoopIndices::rho_p)
      .def_readwrite("nu_p", &LoopIndices::nu_p)
      .def_readwrite("rho_c", &LoopIndices::rho_c)
      .def_readwrite("nu_c", &LoopIndices::nu_c)
      .def_readwrite("delta_p", &LoopIndices::delta_p)
      .def_readwrite("delta_c", &LoopIndices::delta_c);

  py::class_<NetworkConditionReport>(m, "NetworkConditionReport")
      .def_readonly("q1", &NetworkConditionReport::q1)
      .def_readonly("q2", &NetworkConditionReport::q2)
      .def_readonly("r1", &NetworkConditionReport::r1)
      .def_readonly("r2", &NetworkConditionReport::r2)
      .def_readonly("beta1", &NetworkConditionReport::beta1)
      .def_readonly("beta2", &NetworkConditionReport::beta2)
      .def_readonly("stable", &NetworkConditionReport::stable);
  m.def("quantized_loop_report", &quantized_loop_report, py::arg("idx"), py::arg("beta1"), py::arg("beta2"));
  m.def("search_beta", &search_beta, py::arg("idx"));

  py::class_<TriggerParams>(m, "TriggerParams")
      .def_readonly("q1", &TriggerParams::q1)
      .def_readonly("q2", &TriggerParams::q2)
      .def_readonly("eps_sq", &TriggerParams::eps_sq)
      .def_readonly("threshold_coeff", &TriggerParams::threshold_coeff);
  m.def("trigger_params", &trigger_params, py::arg("idx"), py::arg("beta1"), py::arg("beta2"),
        py::arg("theta1"), py::arg("theta2"));

  m.def(
      "simulate_open_loop",
      [](const DiscreteRoesser2D& disc, const Vector& xh0, const Vector& xv0, int n1, int n2) {
        return trajectory_dict(simulate_open_loop(disc, BoundaryConditions::constant(xh0, n2, xv0, n1), {}, n1, n2));
      },
      py::arg("disc"), py::arg("xh0"), py::arg("xv0"), py::arg("n1"), py::arg("n2"),
      "Unforced run from constant boundary values.");

  m.def(
      "simulate_closed_loop",
      [](const DiscreteRoesser2D& disc, double k, const Vector& xh0, const Vector& xv0, int n1, int n2,
         std::optional<double> delta_p, std::optional<double> delta_c, std::optional<TriggerParams> trigger) {
        ClosedLoopOptions options;
        if (delta_p) options.plant_quantizer = LogQuantizerSpec::from_delta(*delta_p);
        if (delta_c) options.controller_quantizer = LogQuantizerSpec::from_delta(*delta_c);
        options.trigger = trigger;
        const auto bc = BoundaryConditions::constant(xh0, n2, xv0, n1);
        return trajectory_dict(simulate_closed_loop(disc, StaticGain{k}, options, bc, n1, n2));
      },
      py::arg("disc"), py::arg("k"), py::arg("xh0"), py::arg("xv0"), py::arg("n1"), py::arg("n2"),
      py::arg("delta_p") = py::none(), py::arg("delta_c") = py::none(), py::arg("trigger") = py::none(),
      "Static output feedback u_p = -k y_c through optional quantizers and trigger.");
}

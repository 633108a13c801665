#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/stl.h>

#include "qcap/capacity.hpp"
#include "qcap/channel.hpp"
#include "qcap/errors.hpp"
#include "qcap/pulse.hpp"
#include "qcap/qcore.hpp"

namespace py = pybind11;
using namespace qcap;

namespace {

std::array<Matrix4c, 4> to_matrices(const OutputStates& states) {
    return {states[0].matrix(), states[1].matrix(), states[2].matrix(), states[3].matrix()};
}

OutputStates to_states(const std::array<Matrix4c, 4>& m) {
    return {DensityMatrix(m[0]), DensityMatrix(m[1]), DensityMatrix(m[2]), DensityMatrix(m[3])};
}

}  // namespace

PYBIND11_MODULE(_qcap, m) {
    m.doc() = "Holevo capacity of a two-qubit noisy channel with memory, asymmetry and state bias";

    auto base = py::register_exception<Error>(m, "QcapError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

    py::class_<BasisParams>(m, "BasisParams")
        .def(py::init<double, double>(), py::arg("m_phi") = 0.0, py::arg("m_psi") = 0.0)
        .def_readwrite("m_phi", &BasisParams::m_phi)
        .def_readwrite("m_psi", &BasisParams::m_psi)
        .def("__repr__", [](const BasisParams& b) {
            return "BasisParams(m_phi=" + std::to_string(b.m_phi) + ", m_psi=" + std::to_string(b.m_psi) + ")";
        });

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init([](double nu1, double alpha, double zeta, double mu) {
                 return ChannelParams{nu1, alpha, zeta, mu};
             }),
             py::arg("nu1") = 1.0, py::arg("alpha") = 0.0, py::arg("zeta") = 0.0, py::arg("mu") = 0.0)
        .def_readwrite("nu1", &ChannelParams::nu1)
        .def_readwrite("alpha", &ChannelParams::alpha)
        .def_readwrite("zeta", &ChannelParams::zeta)
        .def_readwrite("mu", &ChannelParams::mu)
        .def("validate", &ChannelParams::validate)
        .def("__repr__", [](const ChannelParams& p) {
            return "ChannelParams(nu1=" + std::to_string(p.nu1) + ", alpha=" + std::to_string(p.alpha) +
                   ", zeta=" + std::to_string(p.zeta) + ", mu=" + std::to_string(p.mu) + ")";
        });

    py::class_<RateMatrices>(m, "RateMatrices")
        .def(py::init<>())
        .def_readwrite("r1", &RateMatrices::r1)
        .def_readwrite("r0", &RateMatrices::r0);

    py::class_<ChiResult>(m, "ChiResult")
        .def_readonly("chi_bits", &ChiResult::chi_bits)
        .def_readonly("p", &ChiResult::p)
        .def_readonly("evaluations", &ChiResult::evaluations)
        .def_readonly("converged", &ChiResult::converged);

    py::class_<CapacityResult>(m, "CapacityResult")
        .def_readonly("capacity_bits", &CapacityResult::capacity_bits)
        .def_readonly("p", &CapacityResult::p)
        .def_readonly("m_phi", &CapacityResult::m_phi)
        .def_readonly("m_psi", &CapacityResult::m_psi)
        .def_readonly("evaluations", &CapacityResult::evaluations)
        .def_readonly("converged", &CapacityResult::converged);

    py::enum_<LimitCase>(m, "LimitCase")
        .value("a", LimitCase::a)
        .value("b", LimitCase::b)
        .value("c", LimitCase::c)
        .value("d", LimitCase::d);

    m.def("make_basis", [](const BasisParams& b) {
        const BasisSet s = make_basis(b);
        return std::array<Vector4c, 4>{s[0].amplitudes(), s[1].amplitudes(), s[2].amplitudes(), s[3].amplitudes()};
    }, py::arg("params"), "The four basis vectors psi_1..psi_4 in the |00>,|01>,|10>,|11> order.");

    m.def("von_neumann_entropy", [](const Matrix4c& rho) { return von_neumann_entropy(DensityMatrix(rho)); },
          py::arg("rho"), "Entropy in bits.");

    m.def("holevo_chi", [](const Probabilities& p, const std::array<Matrix4c, 4>& states) {
        return holevo_chi(Ensemble(p, to_states(states)));
    }, py::arg("p"), py::arg("states"));

    m.def("rates_from_params", &rates_from_params, py::arg("params"));
    m.def("params_from_rates", &params_from_rates, py::arg("rates"));

    m.def("apply_channel", [](const BasisParams& b, const ChannelParams& p, double t) {
        return to_matrices(apply_channel(b, p, t));
    }, py::arg("basis"), py::arg("channel"), py::arg("t"));

    m.def("chi_for_basis", &chi_for_basis, py::arg("channel"), py::arg("t"), py::arg("basis"));

    m.def("optimize_capacity",
          [](const ChannelParams& p, double t) { return optimize_capacity(p, t); },
          py::arg("channel"), py::arg("t"), py::call_guard<py::gil_scoped_release>());

    m.def("f_closed_form", &f_closed_form, py::arg("nu_t"));

    m.def("limit_relation_residual", &limit_relation_residual, py::arg("case"), py::arg("p"), py::arg("nu_t"));

    m.def("gaussian_pulse_rate",
          [](int j, int k, double width, double delay, double amp2, double t_c, double t) {
              const PulsePair pulses = {PulseSpec::gaussian(width, 5.0 * width),
                                        PulseSpec::gaussian(width, 5.0 * width, amp2, 0.0, 0.0, delay)};
              CorrelationFn corr;
              corr.t_c = t_c;
              return compute_rate(j, k, pulses, corr, t);
          },
          py::arg("j"), py::arg("k"), py::arg("width"), py::arg("delay"), py::arg("amp2"), py::arg("t_c"),
          py::arg("t"),
          "R_jk(t) for two Gaussian pulses under an exponential bath correlation of unit scale.");
}

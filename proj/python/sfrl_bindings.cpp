#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sfrl/cli.hpp"
#include "sfrl/efi.hpp"
#include "sfrl/error.hpp"
#include "sfrl/integer_codes.hpp"
#include "sfrl/numopt.hpp"
#include "sfrl/probspace.hpp"

namespace py = pybind11;
using Matrix = std::vector<std::vector<double>>;

PYBIND11_MODULE(_sfrl, m) {
  m.doc() = "Strong functional representation toolkit";

  py::register_exception<sfrl::Error>(m, "SfrlError", PyExc_ValueError);

  m.def("entropy", [](const std::vector<double>& p) { return sfrl::entropy(sfrl::Distribution(p)); },
        py::arg("pmf"), "Shannon entropy in bits.");
  m.def("mutual_information",
        [](const Matrix& joint) { return sfrl::mutual_information(sfrl::JointDistribution::from_matrix(joint)); },
        py::arg("joint"), "I(X;Y) in bits of a two-dimensional joint pmf.");
  m.def(
      "capacity",
      [](const Matrix& rows, double tol) {
        const auto s = sfrl::blahut_arimoto_capacity(sfrl::Kernel::from_rows(rows), tol);
        return py::dict(py::arg("capacity") = s.capacity, py::arg("input") = std::vector<double>(s.input.probs().begin(), s.input.probs().end()),
                        py::arg("iterations") = s.iterations, py::arg("gap") = s.gap);
      },
      py::arg("rows"), py::arg("tol") = 1e-9, "Channel capacity in bits.");
  m.def(
      "rate_distortion",
      [](const std::vector<double>& source, const Matrix& distortion, double target) {
        const auto s = sfrl::blahut_arimoto_rate_distortion(sfrl::Distribution(source),
                                                            sfrl::DistortionMatrix::from_rows(distortion), target);
        return py::dict(py::arg("rate") = s.rate, py::arg("distortion") = s.distortion, py::arg("gap") = s.gap);
      },
      py::arg("source"), py::arg("distortion"), py::arg("target"), "R(D) in bits.");
  m.def("zipf_params", &sfrl::zipf_params, py::arg("info_bits"), "Zipf exponent for a given information budget.");
  m.def("psi_lower_bound",
        [](const Matrix& joint) { return sfrl::psi_lower_bound(sfrl::JointDistribution::from_matrix(joint)); },
        py::arg("joint"));
  m.def("entropy_bound", &sfrl::entropy_bound, py::arg("mean_log"));
  m.def(
      "lb_example",
      [](unsigned k) {
        const auto f = sfrl::lb_example_build(k);
        return py::dict(py::arg("k") = f.k, py::arg("h_v") = f.h_v, py::arg("i_xy") = f.i_xy,
                        py::arg("psi_lb") = f.psi_lb, py::arg("pass") = f.pass);
      },
      py::arg("k"));
  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "sfrl");
        std::ostringstream out, err;
        const int code = sfrl::cli::dispatch(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end in process; returns (exit_code, stdout, stderr).");
}

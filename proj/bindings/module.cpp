// Python bindings for the main library operations.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mesoncp/cp.hpp"
#include "mesoncp/dataio.hpp"
#include "mesoncp/estimation.hpp"
#include "mesoncp/model.hpp"
#include "mesoncp/montecarlo.hpp"
#include "mesoncp/temporal.hpp"

namespace py = pybind11;
using namespace mesoncp;

namespace {

std::vector<Complex> matrix_entries(const EffectiveHamiltonian& h) {
    return {h.matrix(0, 0), h.matrix(0, 1), h.matrix(1, 0), h.matrix(1, 1)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "two-level decay model of neutral-meson mixing";

    py::register_exception<Error>(m, "MesoncpError");

    py::class_<MesonParams>(m, "MesonParams")
        .def(py::init([](double m_short, double m_long, double gamma_short, double gamma_long) {
                 MesonParams p{m_short, m_long, gamma_short, gamma_long};
                 p.validate();
                 return p;
             }),
             py::arg("m_short"), py::arg("m_long"), py::arg("gamma_short"), py::arg("gamma_long"))
        .def_readonly("m_short", &MesonParams::m_short)
        .def_readonly("m_long", &MesonParams::m_long)
        .def_readonly("gamma_short", &MesonParams::gamma_short)
        .def_readonly("gamma_long", &MesonParams::gamma_long)
        .def("delta_m", &MesonParams::delta_m)
        .def("delta_gamma", &MesonParams::delta_gamma)
        .def("tau_short", &MesonParams::tau_short)
        .def("tau_long", &MesonParams::tau_long);

    py::class_<Couplings>(m, "Couplings")
        .def_readonly("lambda1_mod", &Couplings::lambda1_mod)
        .def_readonly("lambda2_mod", &Couplings::lambda2_mod)
        .def_readonly("theta1", &Couplings::theta1)
        .def_readonly("theta2", &Couplings::theta2)
        .def_readonly("omega1", &Couplings::omega1)
        .def_readonly("omega2", &Couplings::omega2)
        .def("delta_theta", &Couplings::delta_theta);

    py::enum_<Basis>(m, "Basis").value("CpEigen", Basis::CpEigen).value("Flavor", Basis::Flavor);

    py::class_<EffectiveHamiltonian>(m, "EffectiveHamiltonian")
        .def_readonly("basis", &EffectiveHamiltonian::basis)
        .def("matrix", &matrix_entries, "row-major entries [h11, h12, h21, h22]");

    py::class_<FormFactor> ff(m, "FormFactor");
    py::enum_<FormFactor::Kind>(ff, "Kind")
        .value("Flat", FormFactor::Kind::Flat)
        .value("Lorentzian", FormFactor::Kind::Lorentzian);
    ff.def(py::init([](FormFactor::Kind kind, double cutoff) {
               FormFactor f{kind, cutoff};
               f.validate();
               return f;
           }),
           py::arg("kind") = FormFactor::Kind::Flat, py::arg("cutoff") = 0.0)
        .def_readonly("kind", &FormFactor::kind)
        .def_readonly("cutoff", &FormFactor::cutoff);

    py::class_<EigenPair>(m, "EigenPair")
        .def_readonly("value", &EigenPair::value)
        .def_readonly("vector", &EigenPair::vector);

    py::class_<CptReport>(m, "CptReport")
        .def_readonly("satisfied", &CptReport::satisfied)
        .def_readonly("residuals", &CptReport::residuals);

    m.def("couplings_from_params", &couplings_from_params, py::arg("params"), py::arg("theta1"),
          py::arg("theta2"));
    m.def("build_effective_hamiltonian", &build_effective_hamiltonian);
    m.def("eigensystem", &eigensystem);
    m.def("to_flavor_basis", &to_flavor_basis);
    m.def("cpt_check", &cpt_check, py::arg("h"), py::arg("tol"));
    m.def("cpt_allowed_phases", &cpt_allowed_phases, py::arg("k_min"), py::arg("k_max"),
          py::arg("reduce") = false);
    m.def("evolve_exact", &evolve_exact, py::arg("couplings"), py::arg("form_factor"),
          py::arg("f0"), py::arg("t_grid"));

    py::class_<Epsilon> eps(m, "Epsilon");
    py::enum_<Epsilon::Kind>(eps, "Kind")
        .value("Bare", Epsilon::Kind::Bare)
        .value("Renormalized", Epsilon::Kind::Renormalized);
    eps.def_readonly("value", &Epsilon::value)
        .def_readonly("kind", &Epsilon::kind)
        .def_readonly("flagged", &Epsilon::flagged);
    m.def("make_epsilon", &make_epsilon, py::arg("value"), py::arg("kind") = Epsilon::Kind::Bare);
    m.def("epsilon_bare", &epsilon_bare);
    m.def("epsilon_from_eigenvector", &epsilon_from_eigenvector);
    m.def("epsilon_renormalized", &epsilon_renormalized);

    py::class_<QOverP>(m, "QOverP")
        .def_readonly("modulus", &QOverP::modulus)
        .def_readonly("phase_deg", &QOverP::phase_deg);
    m.def("q_over_p", &q_over_p);
    m.def("asymmetry_sl", &asymmetry_sl);
    m.def("asymmetry_sl_from_q_over_p", &asymmetry_sl_from_q_over_p);
    m.def("production_rate_ratio", &production_rate_ratio);

    py::enum_<ModelKind>(m, "ModelKind")
        .value("Standard", ModelKind::Standard)
        .value("Renormalized", ModelKind::Renormalized)
        .value("DensityCpPlus", ModelKind::DensityCpPlus)
        .value("DensityCpMinus", ModelKind::DensityCpMinus)
        .value("Total", ModelKind::Total);

    py::class_<IntensitySeries>(m, "IntensitySeries")
        .def(py::init([](std::vector<double> times, std::vector<double> values,
                         std::vector<double> errors) {
                 IntensitySeries s{std::move(times), std::move(values), std::move(errors),
                                   ModelKind::Total};
                 s.validate();
                 return s;
             }),
             py::arg("times"), py::arg("values"), py::arg("errors") = std::vector<double>{})
        .def_readonly("times", &IntensitySeries::times)
        .def_readonly("values", &IntensitySeries::values)
        .def_readonly("errors", &IntensitySeries::errors)
        .def_readonly("kind", &IntensitySeries::kind);

    py::class_<TemporalWaveFunction>(m, "TemporalWaveFunction")
        .def_readonly("params", &TemporalWaveFunction::params)
        .def_readonly("epsilon", &TemporalWaveFunction::epsilon)
        .def_readonly("n_tilde", &TemporalWaveFunction::n_tilde);

    m.def("survival_probability", &survival_probability, py::arg("gamma"), py::arg("t"));
    m.def("decay_rate_density", &decay_rate_density, py::arg("gamma"), py::arg("t"));
    m.def("psi1_standard", &psi1_standard, py::arg("params"), py::arg("epsilon"), py::arg("t"));
    m.def("intensity_standard", &intensity_standard, py::arg("params"), py::arg("epsilon"),
          py::arg("t_grid"), py::arg("scale") = 1.0, py::arg("paper_display") = false);
    m.def("build_wavefunction", &build_wavefunction, py::arg("params"), py::arg("epsilon"));
    m.def("psi_tilde", &psi_tilde, py::arg("wavefunction"), py::arg("t"));
    m.def("density_cp", &density_cp, py::arg("wavefunction"), py::arg("sector"),
          py::arg("t_grid"));
    m.def("sector_weights", &sector_weights);
    m.def("intensity_renormalized", &intensity_renormalized, py::arg("params"), py::arg("t_grid"),
          py::arg("scale") = 1.0);

    py::class_<DecaySample>(m, "DecaySample")
        .def_readonly("times", &DecaySample::times)
        .def_readonly("sectors", &DecaySample::sectors)
        .def_readonly("seed", &DecaySample::seed)
        .def_readonly("proposals", &DecaySample::proposals)
        .def("acceptance_rate", &DecaySample::acceptance_rate);
    m.def("sample_decays", &sample_decays, py::arg("wavefunction"), py::arg("n"), py::arg("seed"));
    m.def("sample_intensity", &sample_intensity, py::arg("params"), py::arg("epsilon"),
          py::arg("n"), py::arg("seed"));

    py::enum_<SectorFilter>(m, "SectorFilter")
        .value("All", SectorFilter::All)
        .value("CpPlus", SectorFilter::CpPlus)
        .value("CpMinus", SectorFilter::CpMinus);

    py::class_<BinnedDensity>(m, "BinnedDensity")
        .def_readonly("series", &BinnedDensity::series)
        .def_readonly("edges", &BinnedDensity::edges)
        .def_readonly("n_total", &BinnedDensity::n_total)
        .def_readonly("n_used", &BinnedDensity::n_used)
        .def_readonly("n_overflow", &BinnedDensity::n_overflow);
    m.def("histogram", &histogram, py::arg("sample"), py::arg("filter"), py::arg("bin_edges"));

    py::enum_<Param>(m, "Param")
        .value("DeltaM", Param::DeltaM)
        .value("EpsMod", Param::EpsMod)
        .value("EpsArg", Param::EpsArg)
        .value("GammaS", Param::GammaS)
        .value("GammaL", Param::GammaL)
        .value("Scale", Param::Scale);

    py::class_<FitParams>(m, "FitParams")
        .def(py::init<>())
        .def_readwrite("delta_m", &FitParams::delta_m)
        .def_readwrite("eps_mod", &FitParams::eps_mod)
        .def_readwrite("eps_arg", &FitParams::eps_arg)
        .def_readwrite("gamma_short", &FitParams::gamma_short)
        .def_readwrite("gamma_long", &FitParams::gamma_long)
        .def_readwrite("scale", &FitParams::scale);
    m.def("intensity_model", &intensity_model, py::arg("t"), py::arg("params"));

    py::class_<FitConfig>(m, "FitConfig")
        .def(py::init<>())
        .def_readwrite("initial", &FitConfig::initial)
        .def_readwrite("free_params", &FitConfig::free_params)
        .def_readwrite("max_iterations", &FitConfig::max_iterations)
        .def_readwrite("convergence_tol", &FitConfig::convergence_tol);

    py::class_<FitResult>(m, "FitResult")
        .def_readonly("params", &FitResult::params)
        .def_readonly("cost", &FitResult::cost)
        .def_readonly("iterations", &FitResult::iterations)
        .def_readonly("converged", &FitResult::converged)
        .def_readonly("rank_deficient", &FitResult::rank_deficient)
        .def_readonly("free_params", &FitResult::free_params)
        .def_readonly("covariance", &FitResult::covariance)
        .def_readonly("cost_trace", &FitResult::cost_trace)
        .def("std_errors", &FitResult::std_errors)
        .def("correlation", &FitResult::correlation, py::arg("i"), py::arg("j"));
    m.def("fit_intensity", &fit_intensity, py::arg("data"), py::arg("config"));
    m.def("fit_intensity_scan", &fit_intensity_scan, py::arg("data"), py::arg("config"),
          py::arg("delta_m_guesses"));

    py::class_<RefValue>(m, "RefValue")
        .def_readonly("value", &RefValue::value)
        .def_readonly("tolerance", &RefValue::tolerance)
        .def_readonly("provenance", &RefValue::provenance);

    py::class_<ParticleDataset>(m, "ParticleDataset")
        .def_readonly("name", &ParticleDataset::name)
        .def_readonly("params", &ParticleDataset::params)
        .def_readonly("time_unit", &ParticleDataset::time_unit)
        .def_readonly("reference_values", &ParticleDataset::reference_values);
    m.def("builtin_dataset_names", &builtin_dataset_names);
    m.def("builtin_dataset", &builtin_dataset, py::arg("name"));
    m.def("load_params", &load_params, py::arg("path"));
    m.def("save_params", &save_params, py::arg("path"), py::arg("dataset"));
    m.def("save_series", &save_series, py::arg("path"), py::arg("series"));
    m.def("load_series", &load_series, py::arg("path"));
    m.def("save_sample", &save_sample, py::arg("path"), py::arg("sample"));
    m.def("load_sample", &load_sample, py::arg("path"));

#ifdef MESONCP_VERSION
    m.attr("__version__") = MESONCP_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}

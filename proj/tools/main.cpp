// Command-line front end: CP-violation observables, intensity/density curves,
// CPT checks, exact evolution, event generation, and intensity fits.
#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mesoncp/cp.hpp"
#include "mesoncp/dataio.hpp"
#include "mesoncp/estimation.hpp"
#include "mesoncp/model.hpp"
#include "mesoncp/montecarlo.hpp"
#include "mesoncp/temporal.hpp"

namespace {

using namespace mesoncp;

constexpr double rad_to_deg = 180.0 / pi;

struct CommonOpts {
    std::string dataset = "kaon";
    std::string params_file;
    double theta1 = 0.0;
    double theta2 = 0.5 * pi;  // delta_theta = -pi/2
    double t_max = 0.0;        // 0: default 20 tau_S
    int points = 2000;
    std::string output = "-";
};

void add_dataset_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--dataset", o.dataset, "builtin dataset (kaon, Bs, D)")
        ->capture_default_str();
    cmd->add_option("--params", o.params_file, "parameter file (overrides --dataset)")
        ->check(CLI::ExistingFile);
}

void add_theta_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--theta-s", o.theta1, "coupling phase of the short-lived level [rad]")
        ->capture_default_str();
    cmd->add_option("--theta-l", o.theta2, "coupling phase of the long-lived level [rad]")
        ->capture_default_str();
}

void add_grid_opts(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--t-max", o.t_max, "grid end in dataset time units (default 20 tau_S)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--points", o.points, "number of grid points")
        ->capture_default_str()
        ->check(CLI::Range(2, 10000000));
}

void add_output_opt(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("-o,--output", o.output, "output path ('-' for stdout)")->capture_default_str();
}

ParticleDataset resolve_dataset(const CommonOpts& o) {
    if (!o.params_file.empty()) return load_params(o.params_file);
    return builtin_dataset(o.dataset);
}

std::vector<double> make_grid(const ParticleDataset& ds, const CommonOpts& o) {
    const double tmax = o.t_max > 0.0 ? o.t_max : 20.0 / ds.params.gamma_short;
    std::vector<double> g(static_cast<std::size_t>(o.points));
    for (int k = 0; k < o.points; ++k)
        g[static_cast<std::size_t>(k)] = tmax * k / (o.points - 1);
    return g;
}

// usage errors detected after parsing (writability, option combinations)
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& output, const std::string& text) {
    if (output == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) throw UsageError("cannot open output path '" + output + "'");
    out << text;
    if (!out) throw UsageError("write failed for '" + output + "'");
}

void write_series(const std::string& output, const IntensitySeries& s) {
    if (output == "-") {
        std::ostringstream buf;
        const bool with_errors = !s.errors.empty();
        buf << (with_errors ? "t,value,stderr\n" : "t,value\n");
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            buf << format_double(s.times[k]) << "," << format_double(s.values[k]);
            if (with_errors) buf << "," << format_double(s.errors[k]);
            buf << "\n";
        }
        std::cout << buf.str();
    } else {
        save_series(output, s);
    }
}

std::string kv(const std::string& key, double v) { return key + " = " + format_double(v) + "\n"; }
std::string kv(const std::string& key, const std::string& v) { return key + " = " + v + "\n"; }

std::string complex_kv(const std::string& key, const Complex& z) {
    return key + " = " + format_double(z.real()) + " " + format_double(z.imag()) + "\n";
}

int cmd_epsilon(const CommonOpts& o) {
    const auto ds = resolve_dataset(o);
    const auto bare = epsilon_bare(ds.params);
    const auto ren = epsilon_renormalized(ds.params);
    const auto qp = q_over_p(ren);
    std::string out;
    out += kv("dataset", ds.name);
    out += kv("eps_mod", std::abs(bare.value));
    out += kv("eps_arg_deg", std::arg(bare.value) * rad_to_deg);
    out += kv("eps_th_mod", std::abs(ren.value));
    out += kv("eps_th_arg_deg", std::arg(ren.value) * rad_to_deg);
    out += kv("eps_th_re", ren.value.real());
    out += kv("eps_th_im", ren.value.imag());
    out += kv("q_over_p_mod", qp.modulus);
    out += kv("q_over_p_phase_deg", qp.phase_deg);
    out += kv("a_sl", asymmetry_sl(ren));
    out += kv("a_sl_qp", asymmetry_sl_from_q_over_p(ren));
    out += kv("prod_ratio", production_rate_ratio(ds.params));
    out += kv("flagged", ren.flagged ? std::string("true") : std::string("false"));
    write_text(o.output, out);
    return 0;
}

std::string dump_hamiltonian(const EffectiveHamiltonian& h) {
    std::string out;
    out += kv("basis", h.basis == Basis::CpEigen ? std::string("K1K2") : std::string("K0K0bar"));
    out += complex_kv("h11", h.matrix(0, 0));
    out += complex_kv("h12", h.matrix(0, 1));
    out += complex_kv("h21", h.matrix(1, 0));
    out += complex_kv("h22", h.matrix(1, 1));
    return out;
}

int cmd_hamiltonian(const CommonOpts& o) {
    const auto ds = resolve_dataset(o);
    const auto c = couplings_from_params(ds.params, o.theta1, o.theta2);
    const auto h = build_effective_hamiltonian(c);
    const auto pairs = eigensystem(h);
    const auto eps = epsilon_from_eigenvector(h);
    std::string out;
    out += kv("dataset", ds.name);
    out += kv("delta_theta", c.delta_theta());
    out += dump_hamiltonian(h);
    out += complex_kv("eigenvalue_plus", pairs[0].value);
    out += complex_kv("eigenvalue_minus", pairs[1].value);
    out += kv("eps_eig_mod", std::abs(eps.value));
    out += kv("eps_eig_arg_deg", std::arg(eps.value) * rad_to_deg);
    out += dump_hamiltonian(to_flavor_basis(h));
    write_text(o.output, out);
    return 0;
}

int cmd_cpt_check(const CommonOpts& o, double tol) {
    const auto ds = resolve_dataset(o);
    const auto c = couplings_from_params(ds.params, o.theta1, o.theta2);
    const auto rep = cpt_check(to_flavor_basis(build_effective_hamiltonian(c)), tol);
    std::string out;
    out += kv("dataset", ds.name);
    out += kv("delta_theta", c.delta_theta());
    out += kv("tol", tol);
    out += kv("residual_m_diag", rep.residuals[0]);
    out += kv("residual_gamma_diag", rep.residuals[1]);
    out += kv("residual_m_offdiag", rep.residuals[2]);
    out += kv("residual_gamma_offdiag", rep.residuals[3]);
    out += kv("cpt", rep.satisfied ? std::string("PASS") : std::string("FAIL"));
    write_text(o.output, out);
    return 0;
}

int cmd_intensity(const CommonOpts& o, const std::string& model, double scale, bool paper) {
    const auto ds = resolve_dataset(o);
    const auto grid = make_grid(ds, o);
    IntensitySeries s;
    if (model == "standard")
        s = intensity_standard(ds.params, epsilon_bare(ds.params), grid, scale, paper);
    else
        s = intensity_renormalized(ds.params, grid, scale);
    write_series(o.output, s);
    return 0;
}

int cmd_density(const CommonOpts& o, const std::string& sector) {
    const auto ds = resolve_dataset(o);
    const auto w = build_wavefunction(ds.params, epsilon_bare(ds.params));
    const auto grid = make_grid(ds, o);
    write_series(o.output, density_cp(w, sector == "minus" ? -1 : 1, grid));
    return 0;
}

int cmd_evolve(const CommonOpts& o, const std::string& ff_name, double cutoff,
               const std::vector<double>& f0v) {
    const auto ds = resolve_dataset(o);
    const auto c = couplings_from_params(ds.params, o.theta1, o.theta2);
    FormFactor ff;
    if (ff_name == "lorentzian") {
        if (!(cutoff > 0.0))
            throw UsageError("--cutoff must be positive for the lorentzian form factor");
        ff = FormFactor{FormFactor::Kind::Lorentzian, cutoff};
    }
    const std::array<Complex, 2> f0{Complex{f0v[0], f0v[1]}, Complex{f0v[2], f0v[3]}};
    const auto grid = make_grid(ds, o);
    const auto states = evolve_exact(c, ff, f0, grid);
    std::ostringstream buf;
    buf << "t,f1_re,f1_im,f2_re,f2_im\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        buf << format_double(grid[k]) << "," << format_double(states[k][0].real()) << ","
            << format_double(states[k][0].imag()) << "," << format_double(states[k][1].real())
            << "," << format_double(states[k][1].imag()) << "\n";
    }
    write_text(o.output, buf.str());
    return 0;
}

int cmd_sample(const CommonOpts& o, const std::string& model, std::size_t n, std::uint64_t seed) {
    const auto ds = resolve_dataset(o);
    DecaySample s;
    if (model == "temporal") {
        const auto w = build_wavefunction(ds.params, epsilon_bare(ds.params));
        s = sample_decays(w, n, seed);
    } else {
        s = sample_intensity(ds.params, epsilon_bare(ds.params), n, seed);
    }
    if (o.output == "-") {
        std::ostringstream buf;
        buf << "t,sector\n";
        for (std::size_t k = 0; k < s.times.size(); ++k)
            buf << format_double(s.times[k]) << "," << s.sectors[k] << "\n";
        std::cout << buf.str();
    } else {
        save_sample(o.output, s);
    }
    return 0;
}

struct FitOpts {
    std::string input;
    int bins = 200;
    std::string sector = "plus";
    std::vector<std::string> free = {"delta_m", "eps_mod", "eps_arg", "scale"};
    double guess_dm = 0.0, guess_eps_mod = 0.0, guess_eps_arg = 0.0, guess_scale = 0.0;
    int dm_scan = 1;
    int max_iter = 200;
    double tol = 1e-10;
};

Param param_from_name(const std::string& name) {
    for (Param p : {Param::DeltaM, Param::EpsMod, Param::EpsArg, Param::GammaS, Param::GammaL,
                    Param::Scale})
        if (name == param_name(p)) return p;
    throw UsageError("unknown fit parameter '" + name + "'");
}

bool looks_like_sample(const std::string& path) {
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    return header == "t,sector";
}

int cmd_fit(const CommonOpts& o, const FitOpts& fo) {
    const auto ds = resolve_dataset(o);
    IntensitySeries data;
    if (looks_like_sample(fo.input)) {
        const auto sample = load_sample(fo.input);
        const double tmax = o.t_max > 0.0 ? o.t_max : 20.0 / ds.params.gamma_short;
        std::vector<double> edges;
        for (int k = 0; k <= fo.bins; ++k) edges.push_back(tmax * k / fo.bins);
        const SectorFilter filter = fo.sector == "minus"  ? SectorFilter::CpMinus
                                    : fo.sector == "all" ? SectorFilter::All
                                                         : SectorFilter::CpPlus;
        const auto hist = histogram(sample, filter, edges);
        if (hist.n_overflow > 0)
            std::cerr << "note: " << hist.n_overflow
                      << " events beyond t-max were left out of the histogram\n";
        data = hist.series;
    } else {
        data = load_series(fo.input);
    }

    const auto bare = epsilon_bare(ds.params);
    FitConfig cfg;
    cfg.max_iterations = fo.max_iter;
    cfg.convergence_tol = fo.tol;
    cfg.initial.gamma_short = ds.params.gamma_short;
    cfg.initial.gamma_long = ds.params.gamma_long;
    cfg.initial.delta_m = fo.guess_dm > 0.0 ? fo.guess_dm : std::abs(ds.params.delta_m());
    cfg.initial.eps_mod = fo.guess_eps_mod > 0.0 ? fo.guess_eps_mod : std::abs(bare.value);
    cfg.initial.eps_arg = fo.guess_eps_arg != 0.0 ? fo.guess_eps_arg : -std::arg(bare.value);
    cfg.free_params.clear();
    for (const auto& name : fo.free) cfg.free_params.push_back(param_from_name(name));

    if (fo.guess_scale > 0.0) {
        cfg.initial.scale = fo.guess_scale;
    } else {
        // start the scale on the first data point
        FitParams probe = cfg.initial;
        probe.scale = 1.0;
        const double f0 = intensity_model(data.times.front(), probe);
        cfg.initial.scale =
            (f0 > 0.0 && data.values.front() > 0.0) ? data.values.front() / f0 : 1.0;
    }

    FitResult r;
    if (fo.dm_scan > 1) {
        std::vector<double> starts;
        for (int k = 0; k < fo.dm_scan; ++k) {
            const double frac = -0.2 + 0.4 * k / (fo.dm_scan - 1);
            starts.push_back(cfg.initial.delta_m * (1.0 + frac));
        }
        r = fit_intensity_scan(data, cfg, starts);
    } else {
        r = fit_intensity(data, cfg);
    }

    std::string out;
    out += kv("converged", r.converged ? std::string("true") : std::string("false"));
    out += kv("iterations", static_cast<double>(r.iterations));
    out += kv("cost", r.cost);
    out += kv("n_points", static_cast<double>(data.times.size()));
    out += kv("rank_deficient", r.rank_deficient ? std::string("true") : std::string("false"));
    const auto se = r.std_errors();
    for (std::size_t j = 0; j < r.free_params.size(); ++j) {
        const auto name = std::string(param_name(r.free_params[j]));
        out += kv("param " + name, param_value(r.params, r.free_params[j]));
        out += kv("stderr " + name, se[j]);
    }
    for (std::size_t i = 0; i < r.free_params.size(); ++i)
        for (std::size_t j = i + 1; j < r.free_params.size(); ++j)
            out += kv("corr " + std::string(param_name(r.free_params[i])) + " " +
                          std::string(param_name(r.free_params[j])),
                      r.correlation(i, j));
    // renormalized modulus implied by the fitted widths
    out += kv("derived eps_th_mod",
              r.params.eps_mod * std::sqrt(r.params.gamma_long / r.params.gamma_short));
    write_text(o.output, out);
    return 0;
}

int cmd_datasets() {
    std::string out;
    for (const auto& name : builtin_dataset_names()) {
        const auto ds = builtin_dataset(name);
        out += kv("dataset", ds.name);
        out += kv("units", ds.time_unit);
        out += kv("gamma_S", ds.params.gamma_short);
        out += kv("gamma_L", ds.params.gamma_long);
        out += kv("delta_m", ds.params.delta_m());
        out += kv("tau_S", ds.params.tau_short());
        out += kv("tau_L", ds.params.tau_long());
        for (const auto& [key, ref] : ds.reference_values)
            out += "ref " + key + " = " + format_double(ref.value) + " tol " +
                   format_double(ref.tolerance) + " source " + ref.provenance + "\n";
        out += "\n";
    }
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-level decay model of neutral-meson mixing: CP observables, decay curves, "
                 "event generation and fits"};
    app.name("mesoncp");
    app.require_subcommand(1);

    CommonOpts eps_o;
    auto* eps_cmd = app.add_subcommand("epsilon", "CP-violation parameter and derived observables");
    add_dataset_opts(eps_cmd, eps_o);
    add_output_opt(eps_cmd, eps_o);

    CommonOpts ham_o;
    auto* ham_cmd = app.add_subcommand("hamiltonian", "effective Hamiltonian in both bases");
    add_dataset_opts(ham_cmd, ham_o);
    add_theta_opts(ham_cmd, ham_o);
    add_output_opt(ham_cmd, ham_o);

    CommonOpts cpt_o;
    double cpt_tol = 1e-10;
    auto* cpt_cmd = app.add_subcommand("cpt-check", "CPT residuals of the flavor-basis matrix");
    add_dataset_opts(cpt_cmd, cpt_o);
    add_theta_opts(cpt_cmd, cpt_o);
    cpt_cmd->add_option("--tol", cpt_tol, "residual tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_output_opt(cpt_cmd, cpt_o);

    CommonOpts int_o;
    std::string int_model = "standard";
    double int_scale = 1.0;
    bool int_paper = false;
    auto* int_cmd = app.add_subcommand("intensity", "CP=+1 detection intensity curve (CSV)");
    add_dataset_opts(int_cmd, int_o);
    add_grid_opts(int_cmd, int_o);
    int_cmd->add_option("--model", int_model, "standard or renormalized")
        ->capture_default_str()
        ->check(CLI::IsMember({"standard", "renormalized"}));
    int_cmd->add_option("--scale", int_scale, "overall intensity scale I(0)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    int_cmd->add_flag("--display-interference", int_paper,
                      "use the displayed interference coefficient (half the exact one)");
    add_output_opt(int_cmd, int_o);

    CommonOpts den_o;
    std::string den_sector = "plus";
    auto* den_cmd = app.add_subcommand("density", "decay-time density of one CP sector (CSV)");
    add_dataset_opts(den_cmd, den_o);
    add_grid_opts(den_cmd, den_o);
    den_cmd->add_option("--sector", den_sector, "plus or minus")
        ->capture_default_str()
        ->check(CLI::IsMember({"plus", "minus"}));
    add_output_opt(den_cmd, den_o);

    CommonOpts evo_o;
    std::string evo_ff = "flat";
    double evo_cutoff = 0.0;
    std::vector<double> evo_f0 = {1.0, 0.0, 0.0, 0.0};
    auto* evo_cmd =
        app.add_subcommand("evolve", "exact memory-kernel evolution of the two levels (CSV)");
    add_dataset_opts(evo_cmd, evo_o);
    add_theta_opts(evo_cmd, evo_o);
    add_grid_opts(evo_cmd, evo_o);
    evo_cmd->add_option("--form-factor", evo_ff, "flat or lorentzian")
        ->capture_default_str()
        ->check(CLI::IsMember({"flat", "lorentzian"}));
    evo_cmd->add_option("--cutoff", evo_cutoff, "lorentzian cutoff in dataset inverse-time units");
    evo_cmd->add_option("--f0", evo_f0, "initial amplitudes re1 im1 re2 im2")->expected(4);
    add_output_opt(evo_cmd, evo_o);

    CommonOpts smp_o;
    std::string smp_model = "standard";
    std::size_t smp_n = 0;
    std::uint64_t smp_seed = 12345;
    auto* smp_cmd = app.add_subcommand("sample", "draw decay events (CSV t,sector)");
    add_dataset_opts(smp_cmd, smp_o);
    smp_cmd->add_option("-n,--events", smp_n, "number of events")
        ->required()
        ->check(CLI::PositiveNumber);
    smp_cmd->add_option("--seed", smp_seed, "RNG seed")->capture_default_str();
    smp_cmd->add_option("--model", smp_model,
                        "standard (CP=+1 detection intensity) or temporal (two-sector density)")
        ->capture_default_str()
        ->check(CLI::IsMember({"standard", "temporal"}));
    add_output_opt(smp_cmd, smp_o);

    CommonOpts fit_o;
    FitOpts fo;
    auto* fit_cmd = app.add_subcommand("fit", "fit the oscillating intensity model to data");
    add_dataset_opts(fit_cmd, fit_o);
    fit_cmd->add_option("--input", fo.input,
                        "event CSV (t,sector) or series CSV (t,value[,stderr])")
        ->required()
        ->check(CLI::ExistingFile);
    fit_cmd->add_option("--bins", fo.bins, "histogram bins for event input")
        ->capture_default_str()
        ->check(CLI::Range(1, 1000000));
    fit_cmd->add_option("--t-max", fit_o.t_max, "histogram end for event input (default 20 tau_S)")
        ->check(CLI::PositiveNumber);
    fit_cmd->add_option("--sector", fo.sector, "sector filter for event input")
        ->capture_default_str()
        ->check(CLI::IsMember({"plus", "minus", "all"}));
    fit_cmd->add_option("--free", fo.free,
                        "free parameters (delta_m eps_mod eps_arg gamma_S gamma_L scale)");
    fit_cmd->add_option("--guess-dm", fo.guess_dm, "starting delta_m (default: dataset value)");
    fit_cmd->add_option("--guess-eps-mod", fo.guess_eps_mod, "starting |eps|");
    fit_cmd->add_option("--guess-eps-arg", fo.guess_eps_arg, "starting interference phase [rad]");
    fit_cmd->add_option("--guess-scale", fo.guess_scale, "starting scale (default: from data)");
    fit_cmd->add_option("--dm-scan", fo.dm_scan,
                        "number of delta_m starting points spread +-20% around the guess")
        ->capture_default_str()
        ->check(CLI::Range(1, 10001));
    fit_cmd->add_option("--max-iter", fo.max_iter, "iteration cap")->capture_default_str();
    fit_cmd->add_option("--tol", fo.tol, "relative cost-decrease convergence tolerance")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_output_opt(fit_cmd, fit_o);

    auto* ds_cmd = app.add_subcommand("datasets", "list builtin datasets with provenance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForVersion") return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*eps_cmd) return cmd_epsilon(eps_o);
        if (*ham_cmd) return cmd_hamiltonian(ham_o);
        if (*cpt_cmd) return cmd_cpt_check(cpt_o, cpt_tol);
        if (*int_cmd) return cmd_intensity(int_o, int_model, int_scale, int_paper);
        if (*den_cmd) return cmd_density(den_o, den_sector);
        if (*evo_cmd) return cmd_evolve(evo_o, evo_ff, evo_f0.size() == 4 ? evo_cutoff : 0.0, evo_f0);
        if (*smp_cmd) return cmd_sample(smp_o, smp_model, smp_n, smp_seed);
        if (*fit_cmd) return cmd_fit(fit_o, fo);
        if (*ds_cmd) return cmd_datasets();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const LookupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

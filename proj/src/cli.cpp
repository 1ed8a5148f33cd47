#include "nlgrav/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nlgrav/errors.hpp"
#include "nlgrav/evolution.hpp"
#include "nlgrav/groundstate.hpp"
#include "nlgrav/io.hpp"
#include "nlgrav/tables.hpp"
#include "nlgrav/variational.hpp"

namespace nlgrav::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct ModelArgs {
    std::string model = "newtonian";
    std::optional<double> mass_kg;
    std::optional<double> ms_ev;
    std::optional<double> yukawa_mu_inv_m;
    std::optional<double> beta;
    std::optional<double> mu;
    bool no_gravity = false;

    void add_to(CLI::App& app) {
        app.add_option("--model", model, "newtonian, idg or yukawa")
            ->check(CLI::IsMember({"newtonian", "idg", "yukawa"}));
        app.add_option("--mass", mass_kg, "Particle mass in kg (SI mode)");
        app.add_option("--ms-ev", ms_ev, "Non-locality scale M_s in eV (SI mode, idg)");
        app.add_option("--yukawa-mu", yukawa_mu_inv_m, "Yukawa range parameter in 1/m (SI mode)");
        app.add_option("--beta", beta, "Dimensionless non-locality beta (natural mode, idg)");
        app.add_option("--mu", mu, "Dimensionless Yukawa mu (natural mode)");
    }

    // Physical parameters when --mass is given, otherwise nullopt.
    std::optional<PhysicalParams> physical() const {
        if (!mass_kg) return std::nullopt;
        PhysicalParams p;
        p.mass_kg = *mass_kg;
        p.model = parse_model(model);
        p.ms_ev = ms_ev;
        p.yukawa_mu_inv_m = yukawa_mu_inv_m;
        p.validate();
        return p;
    }

    GravityKernel kernel() const {
        GravityKernel k;
        if (const auto p = physical()) {
            k = make_kernel(*p, natural_scales(*p));
        } else {
            switch (parse_model(model)) {
                case GravityModel::newtonian:
                    k = GravityKernel::newtonian();
                    break;
                case GravityModel::idg:
                    if (!beta) throw DomainError("idg needs --beta (or --mass with --ms-ev)");
                    k = GravityKernel::idg(*beta);
                    break;
                case GravityModel::yukawa:
                    if (!mu) throw DomainError("yukawa needs --mu (or --mass with --yukawa-mu)");
                    k = GravityKernel::yukawa(*mu);
                    break;
            }
        }
        if (no_gravity) k.strength = 0.0;
        k.validate();
        return k;
    }

    json to_json() const {
        json j = {{"model", model}, {"no_gravity", no_gravity}};
        auto put = [&](const char* key, const std::optional<double>& v) {
            j[key] = v ? json(*v) : json(nullptr);
        };
        put("mass_kg", mass_kg);
        put("ms_ev", ms_ev);
        put("yukawa_mu_inv_m", yukawa_mu_inv_m);
        put("beta", beta);
        put("mu", mu);
        return j;
    }
};

struct GridArgs {
    std::size_t nodes = 1200;
    std::optional<double> r_max;
    std::optional<double> initial_width;
    double tolerance = 1e-9;
    std::size_t max_iterations = 20000;

    void add_to(CLI::App& app) {
        app.add_option("--nodes", nodes, "Radial grid nodes")->check(CLI::Range(8, 200000));
        app.add_option("--r-max", r_max, "Outer radius in natural units");
        app.add_option("--initial-width", initial_width, "Initial Gaussian width in natural units");
        app.add_option("--tolerance", tolerance, "Residual tolerance")->check(CLI::PositiveNumber);
        app.add_option("--max-iterations", max_iterations, "Iteration cap");
    }

    GroundStateConfig config() const {
        GroundStateConfig c;
        c.nodes = nodes;
        c.max_nodes = std::max(c.max_nodes, 4 * nodes);
        c.r_max = r_max;
        c.initial_width = initial_width;
        c.tolerance = tolerance;
        c.max_iterations = max_iterations;
        return c;
    }

    json to_json() const {
        return {{"nodes", nodes},
                {"r_max", r_max ? json(*r_max) : json(nullptr)},
                {"initial_width", initial_width ? json(*initial_width) : json(nullptr)},
                {"tolerance", tolerance},
                {"max_iterations", max_iterations}};
    }
};

double parse_positive(const std::string& text, const char* flag) {
    double v = 0.0;
    std::size_t used = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(flag) + " expects positive numbers, got '" + text + "'");
    }
    return v;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw DomainError("cannot write " + (dir / name).string());
    return os;
}

void write_json(const fs::path& dir, const std::string& name, const json& j) {
    auto os = open_output(dir, name);
    os << j.dump(2) << '\n';
}

int run_table1(const fs::path& dir, unsigned threads, std::ostream& out) {
    const auto t = compute_table1(threads);
    {
        auto os = open_output(dir, "table1.csv");
        write_table1_csv(os, t);
    }
    write_json(dir, "table1.manifest.json",
               io::make_manifest("table1", {{"threads", threads}, {"tolerance", kTable1Tolerance}}));
    out << "table1: " << t.cells.size() - t.failures << "/" << t.cells.size()
        << " cells within " << kTable1Tolerance * 100 << "%, max deviation "
        << t.max_relative_deviation * 100 << "%\n";
    return t.failures == 0 ? kExitOk : kExitNumerical;
}

int run_fig1(const fs::path& dir, const Fig1Options& opt, std::ostream& out) {
    const auto curves = compute_fig1(opt);
    {
        auto os = open_output(dir, "fig1.csv");
        write_fig1_csv(os, curves);
    }
    const auto props = check_fig1(curves);
    write_json(dir, "fig1.manifest.json",
               io::make_manifest("fig1", {{"mass_min_kg", opt.mass_min_kg},
                                          {"mass_max_kg", opt.mass_max_kg},
                                          {"points", opt.points},
                                          {"ms_ev", opt.ms_ev},
                                          {"include_newtonian", opt.include_newtonian}}));
    out << "fig1: " << curves.size() << " curves, failed points " << props.failed_points
        << ", monotonicity violations " << props.monotonicity_violations << ", ordering violations "
        << props.ordering_violations << "\n";
    return props.failed_points == 0 ? kExitOk : kExitNumerical;
}

int run_groundstate(const fs::path& dir, const ModelArgs& model, const GridArgs& grid,
                    bool compare_variational, std::ostream& out) {
    const auto k = model.kernel();
    if (k.strength == 0.0) throw DomainError("a ground state needs gravity");
    const auto gs = solve_ground_state(k, grid.config());
    const auto phi = self_consistent_potential(gs.state, k);

    json report = {{"solver", io::to_json(gs.report, true)}};
    if (compare_variational) {
        MinimizeOptions mo;
        mo.convention = EnergyConvention::functional;
        const auto var = minimize_scaled(k, mo);
        const auto gap = gaussian_functional_gap(gs, k);
        report["variational"] = {{"width_functional_convention", var.s},
                                 {"width_ratio", gs.report.width / var.s},
                                 {"gaussian_gap", gap.gap},
                                 {"gaussian_sigma_on_grid", gap.gaussian_sigma}};
    }
    if (const auto p = model.physical()) {
        const auto scales = natural_scales(*p);
        report["length_unit_m"] = scales.length_unit_m;
        report["width_m"] = length_to_si(gs.report.width, scales);
    }
    {
        auto os = open_output(dir, "profile.csv");
        io::write_profile_csv(os, gs.state, phi, {{"model", model.model}});
    }
    write_json(dir, "groundstate.json", report);
    write_json(dir, "groundstate.manifest.json",
               io::make_manifest("groundstate", {{"model", model.to_json()}, {"grid", grid.to_json()}}));
    out << "groundstate: converged=" << (gs.report.converged ? "yes" : "no")
        << " residual=" << gs.report.residual << " width=" << gs.report.width
        << " F=" << gs.report.energy_functional << "\n";
    return gs.report.converged ? kExitOk : kExitNumerical;
}

struct EvolveArgs {
    std::string initial = "gaussian";
    std::string profile_path;
    double sigma0 = 1.0;
    double dt = 0.01;
    std::size_t steps = 1000;
    std::size_t stride = 1;
};

int run_evolve(const fs::path& dir, const ModelArgs& model, const GridArgs& grid, const EvolveArgs& ev,
               std::ostream& out) {
    const auto k = model.kernel();
    RadialState init;
    if (ev.initial == "ground") {
        if (k.strength == 0.0) throw DomainError("--initial ground needs gravity");
        const auto gs = solve_ground_state(k, grid.config());
        if (!gs.report.converged) throw NumericalError("initial ground state did not converge");
        init = gs.state;
    } else if (ev.initial == "profile") {
        std::ifstream is(ev.profile_path);
        if (!is) throw DomainError("cannot read profile '" + ev.profile_path + "'");
        init = io::read_profile_csv(is);
        normalize(init);
    } else {
        if (!(ev.sigma0 > 0.0)) throw DomainError("--sigma0 must be positive");
        const double r_max = grid.r_max.value_or(40.0 * ev.sigma0);
        init = gaussian_state(RadialGrid::with_extent(r_max, grid.nodes), ev.sigma0);
    }

    EvolutionConfig cfg;
    cfg.dt = ev.dt;
    cfg.steps = ev.steps;
    cfg.observables_stride = ev.stride;
    const auto tr = evolve(init, k, cfg);

    double norm_drift = 0.0, f_drift = 0.0, width_dev = 0.0, free_dev = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        norm_drift = std::max(norm_drift, std::abs(tr.norms[i] - tr.norms[0]));
        f_drift = std::max(f_drift, std::abs(tr.energies_F[i] - tr.energies_F[0]));
        width_dev = std::max(width_dev, std::abs(tr.widths[i] / tr.widths[0] - 1.0));
        if (ev.initial == "gaussian") {
            const double w = free_gaussian_width(ev.sigma0, tr.times[i]);
            free_dev = std::max(free_dev, std::abs(tr.widths[i] / w - 1.0));
        }
    }
    json report = {{"samples", tr.times.size()},
                   {"norm_drift", norm_drift},
                   {"functional_drift", f_drift},
                   {"width_deviation", width_dev}};
    if (ev.initial == "gaussian") report["free_law_deviation"] = free_dev;
    {
        auto os = open_output(dir, "trajectory.csv");
        io::write_trajectory_csv(os, tr, {{"dt", cfg.dt}, {"initial", ev.initial}});
    }
    write_json(dir, "evolve.json", report);
    write_json(dir, "evolve.manifest.json",
               io::make_manifest("evolve", {{"model", model.to_json()},
                                            {"grid", grid.to_json()},
                                            {"initial", ev.initial},
                                            {"sigma0", ev.sigma0},
                                            {"dt", ev.dt},
                                            {"steps", ev.steps},
                                            {"stride", ev.stride}}));
    out << "evolve: " << ev.steps << " steps, norm drift " << norm_drift << ", F drift " << f_drift
        << ", width deviation " << width_dev << "\n";
    return kExitOk;
}

int run_kernel_check(const fs::path& dir, double beta, std::size_t points, std::ostream& out) {
    const auto kc = kernel_check(beta, points);
    {
        auto os = open_output(dir, "kernel_check.csv");
        write_kernel_check_csv(os, kc);
    }
    out << "kernel-check: max relative deviation " << kc.max_relative_deviation << "\n";
    return kc.max_relative_deviation <= 1e-6 ? kExitOk : kExitNumerical;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spreads and dynamics of self-gravitating quantum systems"};
    app.set_config("--config", "", "TOML/INI file with option defaults; command-line flags win");
    app.require_subcommand(1);
    app.fallthrough();
    std::string output_dir = ".";
    unsigned threads = 1;
    app.add_option("-o,--output-dir", output_dir, "Directory for CSV and JSON outputs");
    app.add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::Range(1u, 256u));

    auto* table1 = app.add_subcommand("table1", "Ground-state spreads against the reference table");

    Fig1Options fig;
    bool no_newtonian = false;
    auto* fig1 = app.add_subcommand("fig1", "Spread versus mass for several non-locality scales");
    fig1->add_option("--mass-min", fig.mass_min_kg, "Smallest mass in kg")->check(CLI::PositiveNumber);
    fig1->add_option("--mass-max", fig.mass_max_kg, "Largest mass in kg")->check(CLI::PositiveNumber);
    fig1->add_option("--points", fig.points, "Masses per curve")->check(CLI::Range(2, 100000));
    std::vector<std::string> ms_text;
    auto* ms_opt = fig1->add_option("--ms", ms_text, "Non-locality scales in eV (none: Newtonian only)")
                       ->expected(0, -1);
    fig1->add_flag("--no-newtonian", no_newtonian, "Omit the Newtonian curve");

    ModelArgs gs_model;
    GridArgs gs_grid;
    bool compare_variational = false;
    auto* groundstate = app.add_subcommand("groundstate", "Self-consistent ground state on a radial grid");
    gs_model.add_to(*groundstate);
    gs_grid.add_to(*groundstate);
    groundstate->add_flag("--compare-variational", compare_variational,
                          "Report the Gaussian gap and the variational width");

    ModelArgs ev_model;
    GridArgs ev_grid;
    EvolveArgs ev;
    auto* evolve_cmd = app.add_subcommand("evolve", "Real-time evolution of a radial state");
    ev_model.add_to(*evolve_cmd);
    ev_grid.add_to(*evolve_cmd);
    evolve_cmd->add_flag("--no-gravity", ev_model.no_gravity, "Switch the self-interaction off");
    evolve_cmd->add_option("--initial", ev.initial, "gaussian, ground or profile")
        ->check(CLI::IsMember({"gaussian", "ground", "profile"}));
    evolve_cmd->add_option("--profile", ev.profile_path, "Profile CSV for --initial profile");
    evolve_cmd->add_option("--sigma0", ev.sigma0, "Initial Gaussian width (natural units)");
    evolve_cmd->add_option("--dt", ev.dt, "Time step")->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--steps", ev.steps, "Number of steps");
    evolve_cmd->add_option("--stride", ev.stride, "Sample every n steps")->check(CLI::PositiveNumber);

    double kc_beta = 1.0;
    std::size_t kc_points = 50;
    auto* kcheck = app.add_subcommand("kernel-check", "Closed-form kernel against its spectral inversion");
    kcheck->add_option("--beta", kc_beta, "Dimensionless non-locality")->check(CLI::PositiveNumber);
    kcheck->add_option("--points", kc_points, "Number of radii")->check(CLI::Range(2, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    const fs::path dir(output_dir);
    try {
        if (*table1) return run_table1(dir, threads, out);
        if (*fig1) {
            fig.include_newtonian = !no_newtonian;
            if (ms_opt->count() > 0) {
                fig.ms_ev.clear();
                for (const auto& t : ms_text) {
                    if (t.empty()) continue;
                    fig.ms_ev.push_back(parse_positive(t, "--ms"));
                }
            }
            fig.threads = threads;
            return run_fig1(dir, fig, out);
        }
        if (*groundstate) return run_groundstate(dir, gs_model, gs_grid, compare_variational, out);
        if (*evolve_cmd) return run_evolve(dir, ev_model, ev_grid, ev, out);
        if (*kcheck) return run_kernel_check(dir, kc_beta, kc_points, out);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        if (!e.diagnostics().empty()) err << e.diagnostics() << "\n";
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace nlgrav::cli

// Command-line front end: loads models and configs, runs the engines, and
// emits CSV/JSON results.  The run report (with timing) goes to stdout; the
// files on disk depend only on the configuration, so identical configs give
// byte-identical outputs.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "symgeo/dh_localization.hpp"
#include "symgeo/io_util.hpp"
#include "symgeo/lie_algebra.hpp"
#include "symgeo/parallel.hpp"
#include "symgeo/path_group.hpp"
#include "symgeo/pendulum.hpp"
#include "symgeo/spectral_trace.hpp"
#include "symgeo/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using symgeo::io::fmt17;

namespace {

struct Check {
    std::string name;
    bool pass = false;
    double residual = 0.0;
    double tol = 0.0;
    bool informational = false;
};

struct RunContext {
    std::string command_echo;
    fs::path out_dir;
    std::vector<Check> checks;
    std::vector<std::pair<std::string, std::string>> outputs;  // path, digest

    void check(const std::string& name, double residual, double tol) {
        checks.push_back({name, residual <= tol, residual, tol, false});
    }
    void check_flag(const std::string& name, bool pass) {
        checks.push_back({name, pass, pass ? 0.0 : 1.0, 0.0, false});
    }
    void info(const std::string& name, double value) {
        checks.push_back({name, true, value, 0.0, true});
    }

    void emit(const std::string& filename, const std::string& content) {
        fs::create_directories(out_dir);
        const fs::path p = out_dir / filename;
        symgeo::io::atomic_write(p.string(), content);
        outputs.emplace_back(p.string(), symgeo::io::fnv1a_digest(content));
    }

    void write_manifest() {
        ordered_json m;
        m["schema_version"] = symgeo::file_schema_version;
        ordered_json files = ordered_json::array();
        for (const auto& [path, digest] : outputs) {
            ordered_json f;
            f["path"] = fs::path(path).filename().string();
            f["digest"] = digest;
            files.push_back(f);
        }
        m["outputs"] = files;
        const std::string content = m.dump(2) + "\n";
        fs::create_directories(out_dir);
        const fs::path p = out_dir / "manifest.json";
        symgeo::io::atomic_write(p.string(), content);
    }

    bool all_pass() const {
        for (const Check& c : checks)
            if (!c.informational && !c.pass) return false;
        return true;
    }

    int finish(double wall_seconds) {
        write_manifest();
        ordered_json rep;
        rep["command"] = command_echo;
        rep["library_version"] = symgeo::library_version;
        rep["schema_version"] = symgeo::file_schema_version;
        rep["wall_time_s"] = wall_seconds;
        ordered_json jc = ordered_json::array();
        for (const Check& c : checks) {
            ordered_json e;
            e["name"] = c.name;
            e["pass"] = c.pass;
            e["residual"] = c.residual;
            if (!c.informational) e["tol"] = c.tol;
            e["informational"] = c.informational;
            jc.push_back(e);
        }
        rep["checks"] = jc;
        ordered_json files = ordered_json::array();
        for (const auto& [path, digest] : outputs) {
            ordered_json f;
            f["path"] = path;
            f["digest"] = digest;
            files.push_back(f);
        }
        rep["outputs"] = files;
        std::cout << rep.dump(2) << std::endl;
        return all_pass() ? 0 : 1;
    }
};

fs::path default_out_dir() {
    if (const char* env = std::getenv("SYMGEO_OUT")) return env;
    return "symgeo_out";
}

std::vector<double> parse_double_list(const std::string& csv, const char* what) {
    std::vector<double> out;
    std::istringstream is(csv);
    std::string cell;
    while (std::getline(is, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": cannot parse '" + cell + "'");
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

ordered_json matrix_json(const symgeo::pendulum::IntMat2& m) {
    return ordered_json::array({ordered_json::array({m.m[0][0], m.m[0][1]}),
                                ordered_json::array({m.m[1][0], m.m[1][1]})});
}

// ---------------------------------------------------------------------------
// lie3: seeded group-law residuals for one algebra

struct Lie3Options {
    std::string algebra = "so3";
    std::string algebra_file;
    int steps = 1000;
    int trials = 20;
    std::uint64_t seed = 0;
};

int run_lie3(const Lie3Options& opt, RunContext& ctx) {
    using namespace symgeo;
    lie::StandardAlgebra std_alg = [&] {
        if (opt.algebra_file.empty()) return lie::make_standard(opt.algebra);
        lie::LieAlgebra a = lie::load_structure_file(opt.algebra_file);
        return lie::StandardAlgebra{a, lie::MatrixRealization{a, 0, {}}};
    }();
    const lie::LieAlgebra& alg = std_alg.algebra;
    const bool have_realization = !std_alg.realization.rep.empty();

    struct TrialResidual {
        double cocycle = 0.0, assoc = 0.0, inverse = 0.0, develop = 0.0;
    };
    std::vector<TrialResidual> res(opt.trials);

    par::for_chunks(static_cast<std::size_t>(opt.trials), 1, par::Exec::parallel,
                    [&](std::size_t b, std::size_t e, std::size_t) {
                        for (std::size_t tr = b; tr < e; ++tr) {
                            const std::uint64_t s0 = opt.seed * 1000 + tr * 3;
                            paths::GridPath g = paths::random_unit_path(alg, opt.steps, s0);
                            paths::GridPath d = paths::random_unit_path(alg, opt.steps, s0 + 1);
                            paths::GridPath eps = paths::random_unit_path(alg, opt.steps, s0 + 2);

                            const paths::Transport Ag = paths::transport(g);
                            const paths::Transport Ad = paths::transport(d);
                            const paths::GridPath gd = paths::path_mul(g, d);
                            const paths::Transport Agd = paths::transport(gd);
                            double coc = 0.0;
                            for (int k = 0; k <= opt.steps; ++k)
                                coc = std::max(coc, (Agd.at(k) - Ag.at(k) * Ad.at(k)).cwiseAbs().maxCoeff());
                            res[tr].cocycle = coc;

                            const paths::GridPath lhs = paths::path_mul(gd, eps);
                            const paths::GridPath rhs = paths::path_mul(g, paths::path_mul(d, eps));
                            res[tr].assoc = (lhs.samples() - rhs.samples()).rowwise().norm().maxCoeff();

                            const paths::GridPath gi = paths::path_inv(g);
                            res[tr].inverse = std::max(paths::path_mul(g, gi).sup_norm(),
                                                       paths::path_mul(gi, g).sup_norm());

                            if (have_realization) {
                                const Eigen::MatrixXd E_gd = paths::develop(gd, std_alg.realization);
                                const Eigen::MatrixXd E_g = paths::develop(g, std_alg.realization);
                                const Eigen::MatrixXd E_d = paths::develop(d, std_alg.realization);
                                res[tr].develop = (E_gd - E_g * E_d).norm();
                            }
                        }
                    });

    std::ostringstream csv;
    csv << "trial,cocycle,associativity,inverse,develop\n";
    TrialResidual worst;
    for (int tr = 0; tr < opt.trials; ++tr) {
        csv << tr << "," << fmt17(res[tr].cocycle) << "," << fmt17(res[tr].assoc) << ","
            << fmt17(res[tr].inverse) << "," << fmt17(res[tr].develop) << "\n";
        worst.cocycle = std::max(worst.cocycle, res[tr].cocycle);
        worst.assoc = std::max(worst.assoc, res[tr].assoc);
        worst.inverse = std::max(worst.inverse, res[tr].inverse);
        worst.develop = std::max(worst.develop, res[tr].develop);
    }
    ctx.emit("residuals.csv", csv.str());

    ctx.check("cocycle", worst.cocycle, 1e-7);
    ctx.check("associativity", worst.assoc, 1e-7);
    ctx.check("inverse", worst.inverse, 1e-8);
    if (have_realization) ctx.check("develop_homomorphism", worst.develop, 1e-8);
    return 0;
}

// ---------------------------------------------------------------------------
// pendulum subcommands

int run_monodromy(const symgeo::pendulum::Loop& loop, RunContext& ctx) {
    using namespace symgeo::pendulum;
    const MonodromyResult res = monodromy(loop);

    std::ostringstream csv;
    csv << "step,h,l,T,Theta_branch,defect\n";
    for (std::size_t k = 0; k < res.trace.size(); ++k) {
        const LoopSample& s = res.trace[k];
        csv << k << "," << fmt17(s.h) << "," << fmt17(s.l) << "," << fmt17(s.T) << ","
            << fmt17(s.theta_branch) << "," << fmt17(s.defect) << "\n";
    }
    ctx.emit("loop_trace.csv", csv.str());

    ordered_json j;
    j["matrix"] = matrix_json(res.matrix);
    j["residual"] = res.max_defect;
    j["loop"] = {{"center", {loop.center_h, loop.center_l}},
                 {"radius", loop.radius},
                 {"steps", loop.steps},
                 {"reverse", loop.reverse},
                 {"turns", loop.turns}};
    ctx.emit("monodromy.json", j.dump(2) + "\n");

    ctx.check_flag("matrix_determinant_one", res.matrix.det() == 1);
    ctx.check("lattice_matching_defect", res.max_defect, 0.25);
    ctx.info("matrix_trace", static_cast<double>(res.matrix.trace()));
    return 0;
}

int run_periods(double h, double l, bool flow_check, RunContext& ctx) {
    using namespace symgeo::pendulum;
    const EnergyMomentum v{h, l};
    const Periods p200 = periods(v, 200);
    const Periods p400 = periods(v, 400);
    const double J = action(v, 200);
    const double J2 = action(v, 400);
    const TurningPoints tp = turning_points(v);

    ordered_json j;
    j["h"] = h;
    j["l"] = l;
    j["z_minus"] = tp.z_minus;
    j["z_plus"] = tp.z_plus;
    j["T"] = p400.T;
    j["Theta"] = p400.Theta;
    j["J"] = J2;

    const double scale = std::max(1.0, std::abs(p400.T));
    ctx.check("quadrature_T_node_doubling", std::abs(p400.T - p200.T) / scale, 1e-9);
    ctx.check("quadrature_J_node_doubling", std::abs(J2 - J) / std::max(1.0, std::abs(J2)), 1e-9);

    if (flow_check) {
        const FlowResult flow = flow_periods_oracle(v);
        j["T_flow"] = flow.T;
        j["Theta_flow"] = flow.Theta;
        j["energy_drift"] = flow.energy_drift;
        ctx.check("flow_vs_quadrature_T", std::abs(flow.T - p400.T) / p400.T, 1e-5);
        ctx.check("flow_energy_drift", flow.energy_drift, 1e-8);
    }
    ctx.emit("periods.json", j.dump(2) + "\n");
    return 0;
}

int run_joint_spectrum(double hbar, const symgeo::pendulum::Window& window, RunContext& ctx) {
    using namespace symgeo::pendulum;
    const JointSpectrum spec = joint_spectrum(hbar, window);

    std::ostringstream csv;
    csv << "h,l,n,m\n";
    double max_residual = 0.0;
    for (const SpectrumPoint& p : spec.points) {
        csv << fmt17(p.h) << "," << fmt17(p.l) << "," << p.n << "," << p.m << "\n";
        const double J = action({p.h, p.l});
        max_residual = std::max(max_residual, std::abs(J - hbar * (static_cast<double>(p.n) + 0.5)));
    }
    ctx.emit("joint_spectrum.csv", csv.str());
    ctx.check("quantization_residual", max_residual, 1e-8);
    ctx.info("point_count", static_cast<double>(spec.points.size()));
    return 0;
}

int run_cells(double hbar, const symgeo::pendulum::Window& window,
              const symgeo::pendulum::Loop& loop, RunContext& ctx) {
    using namespace symgeo::pendulum;
    const JointSpectrum spec = joint_spectrum(hbar, window);
    const CellTransportResult res = cell_transport(spec, loop);

    ordered_json j;
    j["hbar"] = hbar;
    j["matrix"] = matrix_json(res.matrix);
    j["residual"] = res.max_defect;
    ctx.emit("cell_transport.json", j.dump(2) + "\n");

    ctx.check_flag("matrix_determinant_one", res.matrix.det() == 1);
    ctx.check("cell_matching_defect", res.max_defect, 0.3);
    return 0;
}

// ---------------------------------------------------------------------------
// dh subcommands

int run_dh_check(const std::string& model_path, const std::vector<double>& t_grid,
                 std::uint64_t mc_samples, std::uint64_t seed, int bins, RunContext& ctx) {
    using namespace symgeo::dh;
    const HamiltonianS1Model model = load_model(model_path);

    VerifyOptions opt;
    SphereHistogram hist;
    if (mc_samples > 0) {
        hist = mc_sphere_pushforward(mc_samples, seed, bins);
        opt.mc = &hist;
    }
    const VerifyReport rep = verify_identity(model, t_grid, opt);

    ordered_json j;
    j["model"] = model.label;
    ordered_json per_t = ordered_json::array();
    for (const auto& e : rep.per_t) {
        ordered_json row;
        row["t"] = e.t;
        row["localization"] = e.localization;
        row["transform"] = e.transform;
        row["rel_error"] = e.rel_error;
        per_t.push_back(row);
    }
    j["per_t"] = per_t;
    j["max_internal_rel_error"] = rep.max_internal_rel_error;
    if (mc_samples > 0) {
        j["max_mc_rel_error"] = rep.max_mc_rel_error;
        j["mc"] = {{"samples", mc_samples}, {"seed", seed}, {"bins", bins}, {"rng", hist.rng_id}};
    }
    ctx.emit("verify_report.json", j.dump(2) + "\n");

    ctx.check("localization_vs_transform", rep.max_internal_rel_error, 1e-10);
    if (mc_samples > 0) ctx.check("mc_oracle_per_bin", rep.max_mc_rel_error, 0.01);
    return 0;
}

int run_dh_density(const std::string& model_path, int grid, RunContext& ctx) {
    using namespace symgeo::dh;
    const HamiltonianS1Model model = load_model(model_path);
    const PiecewisePoly rho = dh_density(model);
    const double lo = rho.breakpoints().front(), hi = rho.breakpoints().back();

    std::ostringstream csv;
    csv << "x,rho\n";
    double min_val = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double x = lo + (i + 0.5) * (hi - lo) / grid;
        const double r = rho.eval(x);
        min_val = std::min(min_val, r);
        csv << fmt17(x) << "," << fmt17(r) << "\n";
    }
    ctx.emit("density.csv", csv.str());
    ctx.check("density_nonnegative", std::max(0.0, -min_val), 0.0);
    ctx.info("total_volume", rho.integral());
    return 0;
}

// ---------------------------------------------------------------------------
// spectra subcommands

symgeo::spectral::FlatTorus torus_from_options(const std::string& name, const std::string& lattice) {
    using symgeo::spectral::FlatTorus;
    if (!lattice.empty()) {
        const std::vector<double> v = parse_double_list(lattice, "--lattice");
        if (v.size() != 4) throw CLI::ValidationError("--lattice expects a11,a21,a12,a22");
        FlatTorus t;
        t.lattice << v[0], v[2], v[1], v[3];
        if (!t.valid()) throw CLI::ValidationError("--lattice: singular lattice");
        return t;
    }
    if (name == "square") return FlatTorus::square();
    if (name == "rect") return FlatTorus::rectangular();
    throw CLI::ValidationError("--torus must be square or rect (or pass --lattice)");
}

int run_spectrum(const symgeo::spectral::FlatTorus& torus, double lmax, RunContext& ctx) {
    using namespace symgeo::spectral;
    const SpectrumList s = enumerate_spectrum(torus, lmax);
    std::ostringstream csv;
    csv << "lambda,multiplicity\n";
    for (std::size_t i = 0; i < s.lambda.size(); ++i)
        csv << fmt17(s.lambda[i]) << "," << s.multiplicity[i] << "\n";
    ctx.emit("spectrum.csv", csv.str());
    ctx.check_flag("ground_state", !s.lambda.empty() && s.lambda[0] == 0.0 && s.multiplicity[0] == 1);
    ctx.info("total_count", static_cast<double>(s.total_count()));
    return 0;
}

int run_weyl(const symgeo::spectral::FlatTorus& torus, double lmax, double lambda, RunContext& ctx) {
    using namespace symgeo::spectral;
    const SpectrumList s = enumerate_spectrum(torus, lmax);
    const WeylFit fit = weyl_fit(s, lambda);
    ordered_json j;
    j["lambda"] = lambda;
    j["measured"] = fit.measured;
    j["predicted"] = fit.predicted;
    j["ratio"] = fit.ratio;
    j["count"] = counting_function(s, lambda);
    ctx.emit("weyl.json", j.dump(2) + "\n");
    ctx.info("weyl_ratio_minus_one", std::abs(fit.ratio - 1.0));
    return 0;
}

int run_smooth(const symgeo::spectral::FlatTorus& torus, double lmax, double lambda, double sigma,
               RunContext& ctx) {
    using namespace symgeo::spectral;
    const SpectrumList s = enumerate_spectrum(torus, lmax);
    const SmoothedDensity d = smoothed_density(s, lambda, sigma);
    ordered_json j;
    j["lambda"] = lambda;
    j["sigma"] = sigma;
    j["value"] = d.value;
    j["leading_term"] = d.leading_term;
    ctx.emit("smooth.json", j.dump(2) + "\n");
    ctx.info("relative_deviation_from_leading", std::abs(d.value / d.leading_term - 1.0));
    return 0;
}

int run_trace(const symgeo::spectral::FlatTorus& torus, double lmax, double eps, double tmin,
              double tmax, double dt, RunContext& ctx) {
    using namespace symgeo::spectral;
    const SpectrumList s = enumerate_spectrum(torus, lmax);
    const TraceSignal tr = wave_trace(s, tmin, tmax, dt, eps);
    std::ostringstream csv;
    csv << "t,re,im,abs\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        csv << fmt17(tr.t[i]) << "," << fmt17(tr.value[i].real()) << "," << fmt17(tr.value[i].imag())
            << "," << fmt17(tr.abs_at(i)) << "\n";
    ctx.emit("trace.csv", csv.str());
    return 0;
}

int run_peaks(const symgeo::spectral::FlatTorus& torus, double lmax, double eps, double tmin,
              double tmax, double dt, int count, RunContext& ctx) {
    using namespace symgeo::spectral;
    const SpectrumList s = enumerate_spectrum(torus, lmax);
    const TraceSignal tr = wave_trace(s, tmin, tmax, dt, eps);
    const std::vector<Peak> peaks = detect_peaks(tr, torus, count);

    ordered_json j;
    ordered_json arr = ordered_json::array();
    double max_residual = 0.0;
    for (const Peak& p : peaks) {
        ordered_json e;
        e["t"] = p.t;
        e["height"] = p.height;
        e["matched_length"] = p.matched_length;
        e["residual"] = p.residual;
        arr.push_back(e);
        max_residual = std::max(max_residual, p.residual);
    }
    j["peaks"] = arr;
    j["eps"] = eps;
    ctx.emit("peaks.json", j.dump(2) + "\n");
    ctx.check("peak_position_vs_lattice_length", max_residual, 0.02);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symgeo: numerical experiments in symplectic geometry"};
    app.set_version_flag("--version", std::string("symgeo ") + symgeo::library_version +
                                          " (schema v" + std::to_string(symgeo::file_schema_version) + ")");
    app.require_subcommand(1);

    std::string out_dir_flag;
    app.add_option("--out", out_dir_flag, "output directory (default: $SYMGEO_OUT or ./symgeo_out)");

    // lie3
    Lie3Options lie3;
    CLI::App* c_lie3 = app.add_subcommand("lie3", "path-group transport and group-law residuals");
    c_lie3->add_option("--algebra", lie3.algebra, "abelian(n), heisenberg3, affine1, so3, sl2");
    c_lie3->add_option("--algebra-file", lie3.algebra_file, "structure-constant JSON file");
    c_lie3->add_option("--steps", lie3.steps, "grid resolution N")->check(CLI::Range(2, 1000000));
    c_lie3->add_option("--trials", lie3.trials, "number of seeded trials")->check(CLI::PositiveNumber);
    c_lie3->add_option("--seed", lie3.seed, "base RNG seed")->required();

    // pendulum
    CLI::App* c_pend = app.add_subcommand("pendulum", "spherical pendulum monodromy");
    symgeo::pendulum::Loop loop;
    CLI::App* c_mono = c_pend->add_subcommand("monodromy", "period-lattice holonomy around a loop");
    c_mono->add_option("--center-h", loop.center_h, "loop center, energy");
    c_mono->add_option("--center-l", loop.center_l, "loop center, angular momentum");
    c_mono->add_option("--radius", loop.radius, "loop radius")->check(CLI::PositiveNumber);
    c_mono->add_option("--loop-steps", loop.steps, "loop discretization (>= 64)");
    c_mono->add_flag("--reverse", loop.reverse, "traverse clockwise");
    c_mono->add_option("--turns", loop.turns, "number of turns")->check(CLI::PositiveNumber);

    double per_h = 0.3, per_l = 0.4;
    bool per_flow = false;
    CLI::App* c_per = c_pend->add_subcommand("periods", "periods, rotation number and action");
    c_per->add_option("--energy", per_h, "energy")->required();
    c_per->add_option("--momentum", per_l, "angular momentum")->required();
    c_per->add_flag("--flow-check", per_flow, "cross-check against the Hamiltonian flow oracle");

    double hbar = 0.05;
    std::string window_flag = "0.2,1.8,-0.85,0.85";
    CLI::App* c_spec = c_pend->add_subcommand("spectrum", "EBK joint spectrum");
    c_spec->add_option("--hbar", hbar, "Planck parameter")->check(CLI::PositiveNumber);
    c_spec->add_option("--window", window_flag, "h_min,h_max,l_min,l_max");

    symgeo::pendulum::Loop qloop;
    qloop.steps = 64;
    double q_hbar = 0.05;
    std::string q_window = "0.2,1.8,-0.85,0.85";
    CLI::App* c_cells = c_pend->add_subcommand("cells", "lattice-cell transport around a loop");
    c_cells->add_option("--hbar", q_hbar, "Planck parameter")->check(CLI::PositiveNumber);
    c_cells->add_option("--window", q_window, "h_min,h_max,l_min,l_max");
    c_cells->add_option("--center-h", qloop.center_h, "loop center, energy");
    c_cells->add_option("--center-l", qloop.center_l, "loop center, angular momentum");
    c_cells->add_option("--radius", qloop.radius, "loop radius")->check(CLI::PositiveNumber);
    c_cells->add_option("--loop-steps", qloop.steps, "loop discretization");
    c_cells->add_flag("--reverse", qloop.reverse, "traverse clockwise");
    c_cells->add_option("--turns", qloop.turns, "number of turns")->check(CLI::PositiveNumber);

    // dh
    CLI::App* c_dh = app.add_subcommand("dh", "circle-action localization");
    std::string dh_model, dh_t = "0.1,0.5,1,2,5";
    std::uint64_t dh_samples = 0, dh_seed = 0;
    int dh_bins = 40;
    bool dh_seed_set = false;
    CLI::App* c_check = c_dh->add_subcommand("check", "verify the localization identity");
    c_check->add_option("--model", dh_model, "model JSON file")->required();
    c_check->add_option("--t", dh_t, "comma-separated t grid");
    c_check->add_option("--mc-samples", dh_samples, "Monte Carlo sample count (sphere oracle)");
    CLI::Option* seed_opt = c_check->add_option("--seed", dh_seed, "RNG seed (required with --mc-samples)");
    c_check->add_option("--bins", dh_bins, "histogram bins")->check(CLI::PositiveNumber);
    seed_opt->each([&](const std::string&) { dh_seed_set = true; });

    std::string dens_model;
    int dens_grid = 1000;
    CLI::App* c_dens = c_dh->add_subcommand("density", "pushforward density on a grid");
    c_dens->add_option("--model", dens_model, "model JSON file")->required();
    c_dens->add_option("--grid", dens_grid, "sample count")->check(CLI::PositiveNumber);

    // spectra
    CLI::App* c_sp = app.add_subcommand("spectra", "flat-torus spectra and wave trace");
    std::string torus_name = "square", torus_lattice;
    double lmax = 200.0, sp_lambda = 200.0, sp_sigma = 1.0;
    double tr_eps = 0.05, tr_tmin = 0.5, tr_tmax = 18.0, tr_dt = 0.005;
    int pk_count = 5;
    auto add_torus_flags = [&](CLI::App* c) {
        c->add_option("--torus", torus_name, "square or rect");
        c->add_option("--lattice", torus_lattice, "a11,a21,a12,a22 lattice columns");
        c->add_option("--lmax", lmax, "enumeration cutoff")->check(CLI::PositiveNumber);
    };
    CLI::App* c_enum = c_sp->add_subcommand("spectrum", "eigenvalues with multiplicity");
    add_torus_flags(c_enum);
    CLI::App* c_weyl = c_sp->add_subcommand("weyl", "counting function vs phase-space volume");
    add_torus_flags(c_weyl);
    c_weyl->add_option("--lambda", sp_lambda, "evaluation point");
    CLI::App* c_smooth = c_sp->add_subcommand("smooth", "Gaussian-smoothed eigenvalue density");
    add_torus_flags(c_smooth);
    c_smooth->add_option("--lambda", sp_lambda, "evaluation point");
    c_smooth->add_option("--sigma", sp_sigma, "kernel width")->check(CLI::PositiveNumber);
    CLI::App* c_trace = c_sp->add_subcommand("trace", "regularized wave trace on a t grid");
    add_torus_flags(c_trace);
    c_trace->add_option("--eps", tr_eps, "Abel regularization")->check(CLI::PositiveNumber);
    c_trace->add_option("--tmin", tr_tmin, "grid start");
    c_trace->add_option("--tmax", tr_tmax, "grid end");
    c_trace->add_option("--dt", tr_dt, "grid spacing")->check(CLI::PositiveNumber);
    CLI::App* c_peaks = c_sp->add_subcommand("peaks", "wave-trace peaks vs geodesic lengths");
    add_torus_flags(c_peaks);
    c_peaks->add_option("--eps", tr_eps, "Abel regularization")->check(CLI::PositiveNumber);
    c_peaks->add_option("--tmin", tr_tmin, "grid start");
    c_peaks->add_option("--tmax", tr_tmax, "grid end");
    c_peaks->add_option("--dt", tr_dt, "grid spacing")->check(CLI::PositiveNumber);
    c_peaks->add_option("--count", pk_count, "number of peaks")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --version and --help land here with success codes
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunContext ctx;
    {
        std::ostringstream echo;
        for (int i = 0; i < argc; ++i) echo << (i ? " " : "") << argv[i];
        ctx.command_echo = echo.str();
    }
    ctx.out_dir = out_dir_flag.empty() ? default_out_dir() : fs::path(out_dir_flag);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto parse_window = [](const std::string& s) {
            const std::vector<double> v = parse_double_list(s, "--window");
            if (v.size() != 4) throw CLI::ValidationError("--window expects h_min,h_max,l_min,l_max");
            return symgeo::pendulum::Window{v[0], v[1], v[2], v[3]};
        };

        if (*c_lie3) {
            run_lie3(lie3, ctx);
        } else if (*c_mono) {
            run_monodromy(loop, ctx);
        } else if (*c_per) {
            run_periods(per_h, per_l, per_flow, ctx);
        } else if (*c_spec) {
            run_joint_spectrum(hbar, parse_window(window_flag), ctx);
        } else if (*c_cells) {
            run_cells(q_hbar, parse_window(q_window), qloop, ctx);
        } else if (*c_check) {
            if (dh_samples > 0 && !dh_seed_set)
                throw CLI::ValidationError("--seed is required when --mc-samples is set");
            run_dh_check(dh_model, parse_double_list(dh_t, "--t"), dh_samples, dh_seed, dh_bins, ctx);
        } else if (*c_dens) {
            run_dh_density(dens_model, dens_grid, ctx);
        } else if (*c_enum) {
            run_spectrum(torus_from_options(torus_name, torus_lattice), lmax, ctx);
        } else if (*c_weyl) {
            run_weyl(torus_from_options(torus_name, torus_lattice), lmax, sp_lambda, ctx);
        } else if (*c_smooth) {
            run_smooth(torus_from_options(torus_name, torus_lattice), lmax, sp_lambda, sp_sigma, ctx);
        } else if (*c_trace) {
            run_trace(torus_from_options(torus_name, torus_lattice), lmax, tr_eps, tr_tmin, tr_tmax,
                      tr_dt, ctx);
        } else if (*c_peaks) {
            run_peaks(torus_from_options(torus_name, torus_lattice), lmax, tr_eps, tr_tmin, tr_tmax,
                      tr_dt, pk_count, ctx);
        } else {
            std::cerr << "no subcommand selected" << std::endl;
            return 2;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "domain error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return ctx.finish(wall);
}

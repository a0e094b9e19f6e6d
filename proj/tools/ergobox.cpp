#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ergobox/asymptotics.hpp"
#include "ergobox/boxweight.hpp"
#include "ergobox/bridge_mc.hpp"
#include "ergobox/config.hpp"
#include "ergobox/csv.hpp"
#include "ergobox/ergodic.hpp"
#include "ergobox/errors.hpp"
#include "ergobox/model.hpp"
#include "ergobox/occupancy.hpp"
#include "ergobox/reference.hpp"
#include "ergobox/thermo.hpp"

namespace {

using namespace ergobox;

constexpr const char* kVersion = "0.1.0";

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Tracks files written by the current command so a failure removes every
// partial artifact instead of leaving a misleading half-result behind.
class ArtifactSink {
  public:
    ArtifactSink(std::string dir, bool reproducible)
        : dir_(std::move(dir)), reproducible_(reproducible) {
        std::filesystem::create_directories(dir_);
    }

    const std::string& dir() const { return dir_; }
    bool reproducible() const { return reproducible_; }

    std::string path(const std::string& name) const { return dir_ + "/" + name; }

    void write_table(const std::string& name,
                     const std::vector<std::string>& comments,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
        const std::string p = path(name);
        written_.push_back(p);
        write_csv(p, comments, header, rows);
    }

    void write_text(const std::string& name, const std::string& text) {
        const std::string p = path(name);
        written_.push_back(p);
        std::ofstream out(p);
        if (!out) throw ConfigError("cannot open output file " + p);
        out << text;
        out.flush();
        if (!out) throw ConfigError("failed writing output file " + p);
    }

    void discard() {
        for (const auto& p : written_) {
            std::error_code ec;
            std::filesystem::remove(p, ec);
        }
        written_.clear();
    }

  private:
    std::string dir_;
    bool reproducible_ = false;
    std::vector<std::string> written_;
};

std::string metadata_line(std::uint64_t seed, const QuadratureSpec& q,
                          bool reproducible) {
    std::ostringstream o;
    o << "ergobox " << kVersion << " seed=" << seed
      << " s_nodes=" << q.s_nodes << " l_panel_nodes=" << q.l_panel_nodes
      << " l_tail=" << format_double(q.l_tail)
      << " alpha_nodes=" << q.alpha_nodes << " tail_rel=1e-08 refine_rel=1e-08";
    if (!reproducible) o << " generated=" << timestamp_utc();
    return o.str();
}

RunConfig load_config(const std::string& path) {
    if (path.empty())
        throw ConfigError("this command needs --config <file>");
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> xs(n);
    for (int j = 0; j < n; ++j)
        xs[j] = (n == 1) ? a : a + (b - a) * j / static_cast<double>(n - 1);
    return xs;
}

std::vector<double> density_grid(const RunConfig& cfg, const Potential& pot,
                                 const ThermalState& st) {
    double lo = cfg.grid_xmin, hi = cfg.grid_xmax;
    if (lo == hi) {
        const double wall = pot.wall();
        if (std::isfinite(wall)) {
            hi = wall;
        } else {
            hi = std::max(4.0 * scales(pot, st.mass, st.hbar).length,
                          4.0 * st.lambda_D());
        }
        lo = -hi;
    }
    return linspace(lo, hi, cfg.grid_points);
}

int run_density(const RunConfig& cfg, ArtifactSink& sink) {
    if (cfg.sweep)
        throw ConfigError("density needs a single beta, not a sweep");
    const Potential pot = make_potential(cfg.potential);
    const ThermalState st(cfg.beta, cfg.mass, cfg.hbar);
    const std::vector<double> xs = density_grid(cfg, pot, st);

    Spectrum sp;
    bool have_spectrum = false;
    for (Method m : cfg.methods)
        if (m == Method::Spectral) have_spectrum = true;
    if (have_spectrum)
        sp = solve_spectrum_auto(pot, cfg.spectral_points, cfg.spectral_k,
                                 cfg.mass, cfg.hbar);

    MethodContext ctx;
    ctx.pot = &pot;
    ctx.mass = cfg.mass;
    ctx.hbar = cfg.hbar;
    ctx.spectrum = have_spectrum ? &sp : nullptr;
    ctx.erg = cfg.quad;

    std::vector<std::function<double(double)>> providers;
    std::vector<std::string> header{"x"};
    for (Method m : cfg.methods) {
        providers.push_back(density_provider(m, cfg.beta, ctx));
        header.push_back(method_name(m));
    }

    std::vector<std::vector<std::string>> rows;
    rows.reserve(xs.size());
    for (double x : xs) {
        std::vector<std::string> row{format_double(x)};
        for (auto& f : providers) row.push_back(format_double(f(x)));
        rows.push_back(std::move(row));
    }

    sink.write_text("resolved-config.txt", render_config(cfg));
    sink.write_table("density.csv",
                     {metadata_line(cfg.seed, cfg.quad, sink.reproducible()),
                      "beta = " + format_double(cfg.beta)},
                     header, rows);
    std::cout << "density: " << xs.size() << " points, "
              << cfg.methods.size() << " methods -> " << sink.path("density.csv")
              << "\n";
    return 0;
}

int run_groundstate(const RunConfig& cfg, ArtifactSink& sink) {
    const Potential pot = make_potential(cfg.potential);
    const GroundState gs(pot, cfg.mass, cfg.hbar);
    const GroundStateSummary& s = gs.summary();

    std::vector<std::string> comments{
        metadata_line(cfg.seed, cfg.quad, sink.reproducible()),
        "l0 = " + format_double(s.l0), "E = " + format_double(s.energy),
        "E2 = " + format_double(s.curvature)};
    if (!cfg.sweep) {
        const ThermalState st(cfg.beta, cfg.mass, cfg.hbar);
        comments.push_back("beta = " + format_double(cfg.beta));
        comments.push_back("gamma = " + format_double(gs.weight(st)));
    }

    const int n = cfg.grid_points;
    std::vector<std::vector<std::string>> rows;
    rows.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double x = s.l0 * (-1.0 + 2.0 * (j + 0.5) / n);
        rows.push_back({format_double(x), format_double(gs.density(x))});
    }

    sink.write_text("resolved-config.txt", render_config(cfg));
    sink.write_table("groundstate.csv", comments, {"x", "psi"}, rows);
    std::cout << "groundstate: l0 = " << format_double(s.l0)
              << ", E = " << format_double(s.energy) << " -> "
              << sink.path("groundstate.csv") << "\n";
    return 0;
}

int run_thermo_sweep(const RunConfig& cfg, ArtifactSink& sink) {
    if (!cfg.sweep)
        throw ConfigError("thermo-sweep needs a temperature sweep, not a "
                          "single beta");
    const Potential pot = make_potential(cfg.potential);
    SweepOptions opt;
    opt.mass = cfg.mass;
    opt.hbar = cfg.hbar;
    opt.erg = cfg.quad;
    opt.cutoff.assume_even = true;
    opt.spectral_side_points = cfg.spectral_points;
    opt.spectral_k0 = cfg.spectral_k;
    opt.units_delta01 = cfg.units_delta01;

    const SweepResult res =
        thermo_sweep(pot, cfg.methods, cfg.tmin, cfg.tmax, cfg.points, opt);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(res.rows.size());
    for (const SweepRow& r : res.rows)
        rows.push_back({format_double(r.t), method_name(r.method),
                        format_double(r.u), format_double(r.rel_u),
                        format_double(r.pdf_mse)});

    sink.write_text("resolved-config.txt", render_config(cfg));
    sink.write_table("thermo-sweep.csv",
                     {metadata_line(cfg.seed, cfg.quad, sink.reproducible()),
                      "delta01 = " + format_double(res.delta01)},
                     {"T_over_Delta01", "method", "U", "relU", "pdfMSE"}, rows);
    std::cout << "thermo-sweep: " << res.rows.size()
              << " rows, delta01 = " << format_double(res.delta01) << " -> "
              << sink.path("thermo-sweep.csv") << "\n";
    return 0;
}

int run_table1(const RunConfig& cfg, ArtifactSink& sink) {
    std::vector<std::vector<std::string>> rows;
    for (int n : {2, 4, 6, 8, 10}) {
        const Potential pot = Potential::power_law(n, 1.0, true);
        const GroundStateSummary gs = minimize_energy(pot, cfg.mass, cfg.hbar);
        const Spectrum sp =
            solve_spectrum_auto(pot, 2048, 4, cfg.mass, cfg.hbar);
        const double e0 = sp.energies[0];
        const double rel = 100.0 * (gs.energy - e0) / e0;
        rows.push_back({std::to_string(n), format_double(gs.energy),
                        format_double(e0), format_double(rel)});
        std::cout << "n = " << n << ": E_box = " << format_double(gs.energy)
                  << ", E0 = " << format_double(e0) << ", err = "
                  << format_double(rel) << "%\n";
    }
    sink.write_table("table1.csv",
                     {metadata_line(cfg.seed, cfg.quad, sink.reproducible())},
                     {"n", "E_box", "E0", "rel_err_pct"}, rows);
    return 0;
}

int run_a0(const RunConfig& cfg, ArtifactSink& sink) {
    const double a0 = compute_A0();
    sink.write_table("a0.csv",
                     {metadata_line(cfg.seed, cfg.quad, sink.reproducible())},
                     {"A0"}, {{format_double(a0)}});
    std::cout << "A0 = " << format_double(a0) << "\n";
    return 0;
}

int run_validate_phi(const RunConfig& cfg, ArtifactSink& sink) {
    const double alphas[] = {-0.5, 0.0, 0.5};
    const double ys[] = {0.5, 1.0, 2.0};
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
    for (double a : alphas) {
        for (double y : ys) {
            double norm = 0.0;
            for (const auto& nd : gauss_legendre_ab(160, -1.0, a))
                norm += nd.w * phi(a, nd.x, y);
            for (const auto& nd : gauss_legendre_ab(160, a, 1.0))
                norm += nd.w * phi(a, nd.x, y);
            const double ident = std::abs(kernel_identity_residual(a));
            const double err = std::abs(norm - 1.0);
            if (err > 1e-8 || ident > 1e-9) ok = false;
            rows.push_back({format_double(a), format_double(y),
                            format_double(norm), format_double(err),
                            format_double(ident)});
        }
    }
    sink.write_table("validate-phi.csv",
                     {metadata_line(cfg.seed, cfg.quad, sink.reproducible())},
                     {"alpha", "y", "norm", "norm_err", "identity_resid"}, rows);
    if (!ok) {
        std::cerr << "validate phi: normalization or kernel identity out of "
                     "tolerance\n";
        return 4;
    }
    std::cout << "validate phi: 9 settings within tolerance -> "
              << sink.path("validate-phi.csv") << "\n";
    return 0;
}

int run_validate_gweights(const RunConfig& cfg, ArtifactSink& sink) {
    const Potential pot = Potential::infinite_well(1e9, 0.0);
    const double settings[][2] = {{0.0, 1.0}, {0.7, 0.5}, {1.3, 2.0}};
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
    for (const auto& s : settings) {
        const double x = s[0], lambda = s[1];
        const ThermalState st(lambda * lambda * cfg.mass / (cfg.hbar * cfg.hbar),
                              cfg.mass, cfg.hbar);
        const double product =
            rho_erg(x, st, pot, cfg.quad) * std::sqrt(2.0 * kPi) * lambda;
        const double err = std::abs(product - 1.0);
        if (err > 1e-5) ok = false;
        rows.push_back({format_double(x), format_double(lambda),
                        format_double(product), format_double(err)});
    }
    sink.write_table("validate-gweights.csv",
                     {metadata_line(cfg.seed, cfg.quad, sink.reproducible())},
                     {"x", "lambda", "product", "abs_err"}, rows);
    if (!ok) {
        std::cerr << "validate gweights: free-line normalization out of "
                     "tolerance\n";
        return 4;
    }
    std::cout << "validate gweights: 3 settings within tolerance -> "
              << sink.path("validate-gweights.csv") << "\n";
    return 0;
}

struct OccupationArgs {
    double alpha = 0.0;
    double y = 2.0;
    int samples = 20000;
    std::uint64_t seed = 1;
    int bins = 40;
    int steps = 128;
};

int run_validate_occupation(const RunConfig& cfg, const OccupationArgs& args,
                            ArtifactSink& sink) {
    if (std::abs(args.alpha) > 1.0)
        throw ConfigError("occupation check needs |alpha| <= 1");
    if (!(args.y > 0.0)) throw ConfigError("occupation check needs y > 0");
    if (args.samples < 100)
        throw ConfigError("occupation check needs at least 100 samples");

    const double ell = 1.0;
    const double lambda = 2.0 * args.y * ell / kPi;
    const ConstrainedEnsemble ens =
        sample_constrained(args.alpha * ell, -ell, lambda, ell, args.steps,
                           args.samples, args.seed);
    const OccupationHistogram hist = occupation_histogram(ens.samples, args.bins);
    const double alpha_eff = ens.x_i / ell;

    int beyond3 = 0, within2 = 0;
    std::vector<std::vector<std::string>> rows;
    for (int b = 0; b < args.bins; ++b) {
        const double lo = hist.edges[b], hi = hist.edges[b + 1];
        double ref = 0.0;
        for (const auto& nd : gauss_legendre_ab(4, lo / ell, hi / ell))
            ref += nd.w * phi(alpha_eff, nd.x, args.y);
        ref /= hi - lo;
        const double dev = std::abs(hist.theta[b] - ref);
        const double se = std::max(hist.stderr_theta[b], 1e-300);
        if (dev > 3.0 * se && dev > 1e-9) ++beyond3;
        if (dev <= 2.0 * se || dev <= 1e-9) ++within2;
        rows.push_back({format_double(0.5 * (lo + hi)),
                        format_double(hist.theta[b]),
                        format_double(hist.stderr_theta[b]),
                        format_double(ref)});
    }

    sink.write_table(
        "validate-occupation.csv",
        {metadata_line(args.seed, cfg.quad, sink.reproducible()),
         "alpha = " + format_double(alpha_eff) + " y = " + format_double(args.y) +
             " samples = " + std::to_string(args.samples) +
             " steps = " + std::to_string(args.steps) +
             " acceptance = " + format_double(ens.acceptance)},
        {"bin_center", "theta", "stderr", "phi_ref"}, rows);

    const bool ok =
        beyond3 == 0 && within2 >= (args.bins * 95 + 99) / 100;
    if (!ok) {
        std::cerr << "validate occupation: " << beyond3
                  << " bins beyond 3 sigma, " << within2 << "/" << args.bins
                  << " within 2 sigma\n";
        return 4;
    }
    std::cout << "validate occupation: " << args.bins
              << " bins consistent (acceptance = "
              << format_double(ens.acceptance) << ") -> "
              << sink.path("validate-occupation.csv") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-temperature density matrices for confined particles"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    bool reproducible = false;
    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_override, "output directory override");
    app.add_flag("--reproducible", reproducible,
                 "suppress timestamps so identical runs give identical bytes");

    CLI::App* density = app.add_subcommand(
        "density", "diagonal density on a position grid, one column per method");
    CLI::App* groundstate = app.add_subcommand(
        "groundstate", "variational box ground state and its density profile");
    CLI::App* sweep = app.add_subcommand(
        "thermo-sweep", "internal energy and distribution errors over a sweep");
    CLI::App* table1 = app.add_subcommand(
        "table1", "variational vs spectral ground-state energies for z^n/n");
    CLI::App* a0 = app.add_subcommand(
        "a0", "gradient-squared coefficient of the high-temperature bracket");
    CLI::App* validate =
        app.add_subcommand("validate", "internal consistency checks");
    validate->require_subcommand(1);
    CLI::App* vphi = validate->add_subcommand(
        "phi", "occupation kernel normalization and mirror symmetry");
    CLI::App* vg = validate->add_subcommand(
        "gweights", "free-line normalization of the boundary weights");
    CLI::App* vocc = validate->add_subcommand(
        "occupation", "sampled bridge occupation against the kernel");

    OccupationArgs occ;
    vocc->add_option("--alpha", occ.alpha, "pinned endpoint in box units")
        ->required();
    vocc->add_option("--y", occ.y, "dimensionless thermal wavelength")
        ->required();
    vocc->add_option("--samples", occ.samples, "accepted paths to collect");
    vocc->add_option("--seed", occ.seed, "sampler seed");
    vocc->add_option("--bins", occ.bins, "histogram bins");
    vocc->add_option("--steps", occ.steps, "bridge discretization steps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    RunConfig cfg;
    std::unique_ptr<ArtifactSink> sink;
    try {
        const bool needs_config = density->parsed() || groundstate->parsed() ||
                                  sweep->parsed();
        if (needs_config || !config_path.empty()) cfg = load_config(config_path);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (vocc->parsed() && vocc->count("--seed") == 0) occ.seed = cfg.seed;

        sink = std::make_unique<ArtifactSink>(cfg.out_dir, reproducible);

        int rc = 0;
        if (density->parsed()) rc = run_density(cfg, *sink);
        else if (groundstate->parsed()) rc = run_groundstate(cfg, *sink);
        else if (sweep->parsed()) rc = run_thermo_sweep(cfg, *sink);
        else if (table1->parsed()) rc = run_table1(cfg, *sink);
        else if (a0->parsed()) rc = run_a0(cfg, *sink);
        else if (vphi->parsed()) rc = run_validate_phi(cfg, *sink);
        else if (vg->parsed()) rc = run_validate_gweights(cfg, *sink);
        else if (vocc->parsed()) rc = run_validate_occupation(cfg, occ, *sink);
        return rc;
    } catch (const ConfigError& e) {
        if (sink) sink->discard();
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        if (sink) sink->discard();
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const InfeasibleError& e) {
        if (sink) sink->discard();
        std::cerr << "infeasible: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        if (sink) sink->discard();
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        if (sink) sink->discard();
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

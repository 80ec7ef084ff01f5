// qw — coined-quantum-walk command line.
//
// Subcommands: evolve, dispersion, diabolo, compare, project.
// Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 contract violation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "qwalk/continuum.hpp"
#include "qwalk/diabolo.hpp"
#include "qwalk/io.hpp"

namespace fs = std::filesystem;
using namespace qwalk;

namespace {

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) throw ContractError("file-format: cannot write " + path);
}

void write_manifest(const std::string& dir, const std::vector<std::string>& files) {
    write_text(out_path(dir, "manifest.txt"), manifest_text(files));
}

std::string moments_csv_header(int dim_n) {
    std::ostringstream os;
    os << "time,total";
    for (int a = 0; a < dim_n; ++a) os << ",centroid_" << (a + 1);
    for (int a = 0; a < dim_n; ++a) os << ",var_" << (a + 1);
    os << "\n";
    return os.str();
}

std::string moments_csv_row(long time, const MomentSummary& m) {
    std::ostringstream os;
    os.precision(17);
    os << time << "," << m.total;
    for (int a = 0; a < m.centroid.size(); ++a) os << "," << m.centroid[a];
    for (int a = 0; a < m.centroid.size(); ++a) os << "," << m.covariance(a, a);
    os << "\n";
    return os.str();
}

int cmd_evolve(const std::string& config_path, const std::string& out_dir, int threads) {
    RunConfig cfg = load_config(config_path);
    if (threads > 0) cfg.threads = threads;
    if (cfg.shape.empty()) throw ConfigError("evolve requires [run] shape");
    const CoinMatrix coin = coin_by_id(cfg.coin, cfg.dimension);
    const WavePacketSpec spec = packet_from_config(cfg, coin);
    LatticeField state = build_packet(spec, cfg.shape, cfg.threads);

    std::vector<std::string> files;
    std::ostringstream momcsv;
    momcsv << moments_csv_header(cfg.dimension);

    auto snapshot = [&](const LatticeField& f) {
        const ProbabilityField p = probability_field(f);
        if (cfg.out_probability) {
            std::ostringstream name;
            name << "prob_t" << f.time << ".qwp";
            const std::string path = out_path(out_dir, name.str());
            std::ofstream os(path, std::ios::binary);
            write_probability(os, p, coin.id());
            files.push_back(path);
        }
        if (cfg.out_moments) momcsv << moments_csv_row(f.time, moments(p));
    };

    snapshot(state);
    for (long t = cfg.stride; t <= cfg.steps; t += cfg.stride) {
        if (cfg.backend == "position") {
            for (long s = 0; s < cfg.stride; ++s) state = step_position(state, coin, cfg.threads);
        } else {
            state = evolve_spectral(state, coin, cfg.stride, cfg.threads);
        }
        snapshot(state);
    }
    // Remainder steps that do not fill a whole stride still advance the state.
    const long done = (cfg.steps / cfg.stride) * cfg.stride;
    if (done < cfg.steps) {
        const long rest = cfg.steps - done;
        if (cfg.backend == "position") {
            for (long s = 0; s < rest; ++s) state = step_position(state, coin, cfg.threads);
        } else {
            state = evolve_spectral(state, coin, rest, cfg.threads);
        }
        snapshot(state);
    }

    if (cfg.out_moments) {
        const std::string path = out_path(out_dir, "moments.csv");
        write_text(path, momcsv.str());
        files.push_back(path);
    }
    {
        const std::string path = out_path(out_dir, "final_state.qwf");
        std::ofstream os(path, std::ios::binary);
        write_state(os, state, coin.id());
        files.push_back(path);
    }
    write_manifest(out_dir, files);
    return 0;
}

int cmd_dispersion(const std::string& config_path, const std::string& out_dir,
                   const std::string& coin_id, int dimension, int resolution, double tol,
                   int threads) {
    std::string id = coin_id;
    int dim = dimension;
    if (!config_path.empty()) {
        const RunConfig cfg = load_config(config_path);
        id = cfg.coin;
        dim = cfg.dimension;
    }
    const CoinMatrix coin = coin_by_id(id, dim);
    const DispersionSurface surface = compute_dispersion_surface(coin, resolution, threads);
    const DegeneracyReport report = find_degeneracies(coin, resolution, tol, threads);

    std::vector<std::string> files;
    {
        const std::string path = out_path(out_dir, "dispersion.qwd");
        std::ofstream os(path, std::ios::binary);
        write_dispersion(os, surface, coin.id());
        files.push_back(path);
    }
    {
        const std::string path = out_path(out_dir, "degeneracies.txt");
        write_text(path, report.to_text());
        files.push_back(path);
    }
    write_manifest(out_dir, files);
    std::cout << report.to_text();
    return 0;
}

int cmd_diabolo(const std::string& config_path, const std::string& out_dir, double sigma,
                double t) {
    if (!config_path.empty()) {
        const RunConfig cfg = load_config(config_path);
        sigma = cfg.sigma;
        if (cfg.steps > 0) t = double(cfg.steps);
    }
    if (sigma <= 0 || t <= 0) throw ConfigError("diabolo requires sigma > 0 and t > 0");

    std::vector<std::string> files;
    const RadialSpectrum spectrum = gaussian_radial_spectrum(sigma);
    const double ring = kConeSpeed2d * t;

    // Quadrature profile of the exact continuum integrals around the ring.
    RadialProfile quad;
    std::ostringstream quadcsv;
    quadcsv.precision(17);
    quadcsv << "xi,p\n";
    for (double xi = -4.0; xi <= 3.0 + 1e-12; xi += 0.01) {
        const double x = ring + xi * sigma;
        if (x < 0) continue;
        const auto [p0, p1] = p0_p1(spectrum, kConeSpeed2d, t, x);
        quad.xi.push_back(xi);
        quad.p.push_back(p0 * p0 + p1 * p1);
        quadcsv << xi << "," << quad.p.back() << "\n";
    }
    {
        const std::string path = out_path(out_dir, "profile_quadrature.csv");
        write_text(path, quadcsv.str());
        files.push_back(path);
    }

    if (ring < 5.0 * sigma) {
        if (diag_stream())
            *diag_stream() << "warning: asymptotic regime not reached (c*t < 5*sigma); "
                              "asymptotic output suppressed\n";
    } else {
        const RadialProfile prof = sample_asymptotic_profile();
        std::ostringstream asymcsv;
        asymcsv.precision(17);
        asymcsv << "xi,p\n";
        for (std::size_t i = 0; i < prof.xi.size(); ++i)
            asymcsv << prof.xi[i] << "," << prof.p[i] << "\n";
        const std::string path = out_path(out_dir, "profile_asymptotic.csv");
        write_text(path, asymcsv.str());
        files.push_back(path);

        const RingFeatures fa = ring_features(prof);
        const RingFeatures fq = ring_features(quad);
        std::ostringstream feat;
        feat.precision(17);
        feat << "asymptotic: inner_max=" << fa.xi_inner_max << " zero=" << fa.xi_zero
             << " outer_max=" << fa.xi_outer_max << "\n"
             << "quadrature: inner_max=" << fq.xi_inner_max << " zero=" << fq.xi_zero
             << " outer_max=" << fq.xi_outer_max << "\n";
        const std::string fpath = out_path(out_dir, "features.txt");
        write_text(fpath, feat.str());
        files.push_back(fpath);
        std::cout << feat.str();
    }
    write_manifest(out_dir, files);
    return 0;
}

int resolve_branch(const RunConfig& cfg) {
    if (cfg.coin_state.rfind("branch:", 0) != 0)
        throw ConfigError("compare requires a 'branch:<s>' coin selector in [packet]");
    return std::stoi(cfg.coin_state.substr(7));
}

int cmd_compare(const std::string& config_path, const std::string& out_dir, int threads) {
    RunConfig cfg = load_config(config_path);
    if (threads > 0) cfg.threads = threads;
    if (cfg.shape.empty()) throw ConfigError("compare requires [run] shape");
    const CoinMatrix coin = coin_by_id(cfg.coin, cfg.dimension);
    const WavePacketSpec spec = packet_from_config(cfg, coin);
    const int branch = resolve_branch(cfg);

    ProbabilityField p_exact, p_cont;
    ContinuumComparison cmp;
    try {
        cmp = compare_exact_continuum(spec, coin, cfg.shape, branch, cfg.steps, cfg.threads,
                                      &p_exact, &p_cont);
    } catch (const ContractError& e) {
        if (std::string(e.what()).find("regularity-violation") != std::string::npos)
            throw ContractError(std::string(e.what()) +
                                " (for carriers at a conical point use the diabolo subcommand)");
        throw;
    }

    std::vector<std::string> files;
    {
        const std::string path = out_path(out_dir, "comparison.txt");
        write_text(path, cmp.to_text() + "\n");
        files.push_back(path);
    }
    {
        const std::string path = out_path(out_dir, "prob_exact.qwp");
        std::ofstream os(path, std::ios::binary);
        write_probability(os, p_exact, coin.id());
        files.push_back(path);
    }
    {
        const std::string path = out_path(out_dir, "prob_continuum.qwp");
        std::ofstream os(path, std::ios::binary);
        write_probability(os, p_cont, coin.id());
        files.push_back(path);
    }
    write_manifest(out_dir, files);
    std::cout << cmp.to_text() << "\n";
    return 0;
}

int cmd_project(const std::string& config_path, const std::string& out_dir,
                const std::string& branch_list, int threads) {
    RunConfig cfg = load_config(config_path);
    if (threads > 0) cfg.threads = threads;
    if (cfg.shape.empty()) throw ConfigError("project requires [run] shape");
    const CoinMatrix coin = coin_by_id(cfg.coin, cfg.dimension);
    const WavePacketSpec spec = packet_from_config(cfg, coin);
    std::set<int> branches;
    for (int s : detail::split_csv<int>(branch_list)) branches.insert(s);
    if (branches.empty()) throw ConfigError("project requires a non-empty --branches list");

    const LatticeField state = build_packet(spec, cfg.shape, cfg.threads);
    const LatticeField proj = project_onto_branches(state, coin, branches, cfg.threads);

    std::vector<std::string> files;
    {
        const std::string path = out_path(out_dir, "projected_state.qwf");
        std::ofstream os(path, std::ios::binary);
        write_state(os, proj, coin.id());
        files.push_back(path);
    }
    {
        const std::string path = out_path(out_dir, "projected_prob.qwp");
        std::ofstream os(path, std::ios::binary);
        write_probability(os, probability_field(proj), coin.id());
        files.push_back(path);
    }
    {
        std::ostringstream txt;
        txt.precision(17);
        txt << "branches=" << branch_list << " weight=" << proj.norm2() << "\n";
        const std::string path = out_path(out_dir, "projection.txt");
        write_text(path, txt.str());
        files.push_back(path);
        std::cout << txt.str();
    }
    write_manifest(out_dir, files);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coined quantum walk engine"};
    app.require_subcommand(1);

    std::string config, out_dir = ".";
    int threads = 0;  // 0: take the config value (or 1)

    std::string coin_id = "grover";
    int dimension = 2;
    int resolution = 128;
    double tol = 1e-6;
    double sigma = 20.0, t_cont = 300.0;
    std::string branch_list = "1";

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config, "run configuration file");
        if (config_required) opt->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--threads", threads, "worker threads (overrides config)");
    };

    auto* evolve = app.add_subcommand("evolve", "evolve a packet, write snapshots");
    add_common(evolve, true);

    auto* dispersion = app.add_subcommand("dispersion", "scan surfaces, find degeneracies");
    add_common(dispersion, false);
    dispersion->add_option("--coin", coin_id, "coin id (grover, dft, file:<path>)");
    dispersion->add_option("--dimension", dimension, "lattice dimension N");
    dispersion->add_option("--resolution", resolution, "k-grid samples per axis");
    dispersion->add_option("--tol", tol, "degeneracy gap tolerance");

    auto* diabolo = app.add_subcommand("diabolo", "ring profiles at the conical point");
    add_common(diabolo, false);
    diabolo->add_option("--sigma", sigma, "packet width");
    diabolo->add_option("--t", t_cont, "evolution time");

    auto* compare = app.add_subcommand("compare", "exact walk vs continuum model");
    add_common(compare, true);

    auto* project = app.add_subcommand("project", "keep selected dispersion branches");
    add_common(project, true);
    project->add_option("--branches", branch_list, "comma-separated 1-based branch labels");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(evolve)) return cmd_evolve(config, out_dir, threads);
        if (app.got_subcommand(dispersion))
            return cmd_dispersion(config, out_dir, coin_id, dimension, resolution, tol,
                                  threads > 0 ? threads : 1);
        if (app.got_subcommand(diabolo)) return cmd_diabolo(config, out_dir, sigma, t_cont);
        if (app.got_subcommand(compare)) return cmd_compare(config, out_dir, threads);
        if (app.got_subcommand(project))
            return cmd_project(config, out_dir, branch_list, threads);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

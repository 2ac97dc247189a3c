#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "lelab/cones.hpp"
#include "lelab/error.hpp"
#include "lelab/geometry.hpp"
#include "lelab/io.hpp"
#include "lelab/lane_emden.hpp"
#include "lelab/mesh.hpp"
#include "lelab/spectrum.hpp"
#include "lelab/verify.hpp"

using namespace lelab;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, solver_failed = 3 };

struct LoadedDomain {
    DomainSpec domain;
    std::map<std::string, std::string> extra;
    MeshOptions mesh_options;
};

LoadedDomain load_domain(const std::filesystem::path& path)
{
    std::map<std::string, std::string> extra;
    const auto description = parse_domain_description(read_text_file(path), &extra);
    LoadedDomain out{build_domain(description), extra, {}};
    if (auto it = extra.find("rings"); it != extra.end()) out.mesh_options.rings = std::stoi(it->second);
    return out;
}

// File values for q and level apply unless the flag was given explicitly.
void apply_file_defaults(RunConfig& config, const LoadedDomain& loaded, bool q_flag, bool level_flag)
{
    if (!q_flag)
        if (auto it = loaded.extra.find("q"); it != loaded.extra.end()) config.q = std::stod(it->second);
    if (!level_flag)
        if (auto it = loaded.extra.find("level"); it != loaded.extra.end()) config.level = std::stoi(it->second);
    validate(config);
}

void report_line(const CheckResult& c)
{
    std::printf("%s %-28s margin=%.6g samples=%ld\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.margin, c.samples);
}

int run_solve(RunConfig config, bool q_flag, bool level_flag, bool rayleigh)
{
    const auto loaded = load_domain(config.domain);
    apply_file_defaults(config, loaded, q_flag, level_flag);
    const Mesh mesh = triangulate(loaded.domain, config.level, loaded.mesh_options);
    const LaneEmdenProblem problem(mesh);
    LaneEmdenConfig le;
    le.q = config.q;
    const SolveReport report = solve_least_energy(problem, le);

    Json j = to_json(report);
    j["nodes"] = mesh.num_nodes();
    j["level"] = config.level;
    const auto geo = geometry_report(loaded.domain);
    j["geometry"] = {{"kappa", geo.kappa}, {"beta", geo.beta}, {"alpha", geo.alpha}, {"components", geo.components}};
    if (rayleigh) {
        const auto r = rayleigh_minimize(problem, config.q);
        j["rayleigh_lambda1"] = r.lambda;
        j["rayleigh_iterations"] = r.iterations;
    }
    write_json(config.out / "solve.json", j);
    mesh_field_table(mesh, report.w).write(config.out / "w.csv");
    std::printf("solve q=%.6g level=%d lambda1=%.12g energy=%.12g residual=%.3g iterations=%d\n", config.q,
                config.level, report.lambda1, report.energy, report.residual, report.iterations);
    return ok;
}

int run_spectrum(RunConfig config, bool q_flag, int kmax)
{
    const auto loaded = load_domain(config.domain);
    apply_file_defaults(config, loaded, q_flag, true);
    if (loaded.domain.dim() != 1) throw InputError("spectrum enumeration is limited to intervals and their unions");
    std::vector<std::vector<SpectrumEntry>> parts;
    for (const auto& iv : loaded.domain.intervals()) parts.push_back(interval_spectrum(iv, config.q, kmax));
    const auto spectrum = spin_combine(parts, config.q);
    const auto gap = spectral_gap(spectrum);

    std::vector<std::string> header{"lambda"};
    for (std::size_t i = 0; i < parts.size(); ++i) header.push_back("bumps_" + std::to_string(i));
    for (std::size_t i = 0; i < parts.size(); ++i) header.push_back("spin_" + std::to_string(i));
    CsvTable table(header);
    Json entries = Json::array();
    for (const auto& e : spectrum) {
        std::vector<std::string> row{format_number(e.lambda)};
        for (int b : e.bumps) row.push_back(std::to_string(b));
        for (int s : e.spin) row.push_back(std::to_string(s));
        table.add_row(row);
        entries.push_back(to_json(e));
    }
    table.write(config.out / "spectrum.csv");
    write_json(config.out / "spectrum.json",
               Json{{"q", config.q}, {"lambda1", gap.lambda1}, {"lambda2", gap.lambda2}, {"gap", gap.gap},
                    {"entries", entries}});
    std::printf("spectrum q=%.6g entries=%zu lambda1=%.12g lambda2=%.12g gap=%.12g\n", config.q, spectrum.size(),
                gap.lambda1, gap.lambda2, gap.gap);
    return ok;
}

int run_cones(const RunConfig& config, int N, bool sigma, bool concentration, std::optional<int> level_flag)
{
    std::vector<double> betas = config.sweep_beta;
    if (betas.empty()) betas = concentration ? std::vector<double>{0.95} : std::vector<double>{0.0, 0.5, 0.9};
    std::vector<std::string> header{"beta", "cap_eigenvalue", "alpha", "q_threshold", "narrow", "class"};
    if (sigma) header.insert(header.end(), {"sigma", "theta", "discrepancy"});
    CsvTable table(header);
    for (double beta : betas) {
        const double lam = cap_eigenvalue(N, beta);
        const double alpha = alpha_of_beta(N, beta);
        const bool narrow = is_narrow(N, beta, config.q);
        std::vector<std::string> row{format_number(beta), format_number(lam), format_number(alpha),
                                     format_number(q_threshold(alpha)), narrow ? "1" : "0",
                                     to_string(compactness_classifier(N, beta, config.q))};
        if (sigma) {
            if (narrow && N == 2) {
                const auto s = sigma_beta({N, beta, 1.0}, config.q, level_flag.value_or(4));
                row.insert(row.end(), {format_number(s.sigma), format_number(s.theta), format_number(s.discrepancy)});
                std::printf("cones beta=%.6g sigma=%.12g theta=%.12g discrepancy=%.3g\n", beta, s.sigma, s.theta,
                            s.discrepancy);
            } else {
                row.insert(row.end(), {"", "", ""});
            }
        }
        table.add_row(row);
        std::printf("cones beta=%.6g lambda=%.12g alpha=%.12g q_threshold=%.6g\n", beta, lam, alpha,
                    q_threshold(alpha));
    }
    table.write(config.out / "cones.csv");

    if (concentration) {
        if (betas.size() != 1 || N != 2) throw InputError("--concentration needs a single planar beta");
        const ConeSpec cone{2, betas.front(), 1.0};
        const HomogeneousSolution V(cone, config.q);
        MeshOptions opts;
        opts.rings = 40;
        const Mesh mesh = triangulate(DomainSpec::sector(cone.beta, cone.radius), level_flag.value_or(5), opts);
        LaneEmdenConfig le;
        le.q = config.q;
        const auto w = solve_least_energy(mesh, le).w;
        auto wf = [&](Point p) {
            const auto v = interpolate(mesh, w, p);
            if (!v) throw SolverError("concentration point outside the mesh");
            return *v;
        };
        const ConeBump phi{0.001, 0.003, std::acos(cone.beta)};
        const auto ns = config.sweep_n.empty() ? parse_sweep("1:16:16") : config.sweep_n;
        CsvTable ct({"n", "gradient", "l2", "quotient", "quotient_V"});
        for (double n : ns) {
            const auto t = concentration_sequence(cone, config.q, phi, n, wf, V);
            ct.add_row(std::vector<double>{n, t.gradient, t.l2, t.quotient(), t.quotient_V()});
        }
        ct.write(config.out / "concentration.csv");
    }
    return ok;
}

struct Harness {
    std::vector<CheckResult> checks;
    void add(CheckResult c)
    {
        report_line(c);
        checks.push_back(std::move(c));
    }
};

void domain_checks(Harness& h, const std::string& tag, const DomainSpec& domain, int level, double q,
                   std::uint64_t seed, int fields)
{
    const Mesh mesh = triangulate(domain, level);
    const LaneEmdenProblem problem(mesh);
    LaneEmdenConfig le;
    le.q = q;
    const SolveReport rep = solve_least_energy(problem, le);

    auto hle = check_hardy_lane_emden(problem, rep.w, q, fields, seed);
    hle.name = "hardy_lane_emden/" + tag;
    h.add(hle);

    const auto mu = weighted_mu1(mesh, rep.w, q);
    auto muc = make_check("weighted_mu1/" + tag, 0.01 - std::abs(mu.mu1 - 1.0), 0.0, 1);
    muc.details = {{"mu1", mu.mu1}, {"eigenfield_distance", mu.distance}};
    h.add(muc);

    const auto lin = linearized_positivity(mesh, rep.w, q);
    auto lc = make_check("linearized/" + tag, lin.positive_definite ? lin.smallest : -1.0, 0.0, 1);
    lc.pass = lin.positive_definite && lin.smallest > 0.0;
    lc.details = {{"smallest", lin.smallest}, {"mu1", lin.mu1}};
    h.add(lc);

    Census census = solution_census(problem, q);
    auto iso = isolation_probe(problem, census, q, seed);
    iso.check.name = "isolation/" + tag;
    h.add(iso.check);

    const double hardy = hardy_constant(mesh, domain).eigenvalue;
    auto hc = make_check("hardy_constant/" + tag, hardy, 0.0, 1);
    hc.pass = hardy > 0.0;
    hc.details = {{"eigenvalue", hardy}};
    h.add(hc);

    // Gradient-L1 and W_n bounds over all census pairs.
    double worst_g = std::numeric_limits<double>::infinity(), worst_w = worst_g;
    long pairs = 0;
    const Vector& w = census.solutions[census.full].w;
    for (std::size_t a = 0; a < census.solutions.size(); ++a) {
        for (std::size_t b = 0; b < census.solutions.size(); ++b) {
            if (a == b) continue;
            worst_g = std::min(worst_g,
                               check_gradient_l1(problem, census.solutions[a].w, census.solutions[b].w, q).margin);
            ++pairs;
        }
        worst_w = std::min(worst_w, wn_weight(w, census.solutions[a].w, q).margin);
        worst_w = std::min(worst_w, wn_weight(w, -census.solutions[a].w, q).margin);
    }
    if (pairs) h.add(make_check("gradient_l1/" + tag, worst_g, 1e-12, pairs));
    h.add(make_check("wn_bounds/" + tag, worst_w, 1e-12, static_cast<long>(2 * census.solutions.size())));
}

int run_verify(const RunConfig& config, bool q_flag, bool level_flag)
{
    Harness h;
    const double q = config.q;
    if (config.all) {
        h.add(check_pointwise(100'000, config.seed));
        domain_checks(h, "interval", DomainSpec::interval(0, 1), 8, q, config.seed, 1000);
        domain_checks(h, "two_intervals", DomainSpec::interval_union({{0, 1}, {2, 3}}), 8, q, config.seed, 1000);
        domain_checks(h, "square", DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 5, q, config.seed, 200);
        domain_checks(h, "l_shape", DomainSpec::polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}), 4, q,
                      config.seed, 200);
        domain_checks(h, "sector", DomainSpec::sector(0.5, 1.0), 3, q, config.seed, 200);

        std::vector<LinftyPoint> family;
        for (double t : {0.5, 1.0, 2.0, 4.0, 8.0}) {
            const Mesh mesh = triangulate(DomainSpec::interval(0, t), 8);
            LaneEmdenConfig le;
            le.q = q;
            const auto rep = solve_least_energy(mesh, le);
            family.push_back({rep.lambda1, rep.w.cwiseAbs().maxCoeff()});
        }
        h.add(check_linfty_universal(family, 1, q));

        const auto rows = accumulation_rates({0, 1}, {2, 3}, q, 8);
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            worst = std::min(worst, 1e-8 - std::abs(rows[i].distance / rows[i].closed_form - 1.0));
            if (i > 0 && !(rows[i].distance < rows[i - 1].distance)) worst = std::min(worst, -1.0);
        }
        h.add(make_check("accumulation", worst, 0.0, static_cast<long>(rows.size())));
    } else if (!config.domain.empty()) {
        RunConfig c = config;
        const auto loaded = load_domain(config.domain);
        apply_file_defaults(c, loaded, q_flag, level_flag);
        domain_checks(h, config.domain.stem().string(), loaded.domain, c.level, c.q, c.seed, 200);
    } else {
        throw InputError("verify needs --all or --domain");
    }

    Json arr = Json::array();
    CsvTable table({"check", "pass", "margin", "samples"});
    bool all_pass = true;
    for (const auto& c : h.checks) {
        arr.push_back(to_json(c));
        table.add_row(std::vector<std::string>{c.name, c.pass ? "1" : "0", format_number(c.margin),
                                               std::to_string(c.samples)});
        all_pass = all_pass && c.pass;
    }
    write_json(config.out / "verify.json", Json{{"seed", config.seed}, {"q", q}, {"checks", arr}});
    table.write(config.out / "verify.csv");
    return all_pass ? ok : check_failed;
}

int run_experiment(const RunConfig& config, const std::string& name)
{
    const double q = config.q;
    if (name == "scaling") {
        const auto scales = config.sweep_scale.empty() ? parse_sweep("1:4:4") : config.sweep_scale;
        CsvTable t({"scale", "lambda1", "sup", "energy"});
        for (double s : scales) {
            const Mesh mesh = triangulate(DomainSpec::interval(0, s), config.level);
            LaneEmdenConfig le;
            le.q = q;
            const auto rep = solve_least_energy(mesh, le);
            t.add_row(std::vector<double>{s, rep.lambda1, rep.w.cwiseAbs().maxCoeff(), rep.energy});
            std::printf("scaling t=%.6g lambda1=%.12g\n", s, rep.lambda1);
        }
        t.write(config.out / "scaling.csv");
        return ok;
    }
    if (name == "corners") {
        CsvTable t({"case", "exponent", "expected", "points"});
        MeshOptions opts;
        opts.rings = 20;
        LaneEmdenConfig le;
        le.q = q;
        {
            const Mesh mesh = triangulate(DomainSpec::polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 3, opts);
            const auto rep = solve_least_energy(mesh, le);
            const auto fit = boundary_exponent_fit(mesh, rep.w, {0, 0}, {1, 1}, 1.0);
            const double expected = expected_corner_exponent(std::numbers::pi / 2, q);
            t.add_row(std::vector<std::string>{"square", format_number(fit.exponent), format_number(expected),
                                               std::to_string(fit.points)});
            std::printf("corners square exponent=%.6g expected=%.6g\n", fit.exponent, expected);
        }
        for (double beta : config.sweep_beta.empty() ? std::vector<double>{0.95} : config.sweep_beta) {
            const Mesh mesh = triangulate(DomainSpec::sector(beta, 1.0), 3, opts);
            const auto rep = solve_least_energy(mesh, le);
            const auto fit = boundary_exponent_fit(mesh, rep.w, {0, 0}, {1, 0}, 1.0);
            const double expected = expected_corner_exponent(2 * std::acos(beta), q);
            t.add_row(std::vector<std::string>{"sector_" + format_number(beta), format_number(fit.exponent),
                                               format_number(expected), std::to_string(fit.points)});
            std::printf("corners sector beta=%.6g exponent=%.6g expected=%.6g\n", beta, fit.exponent, expected);
        }
        t.write(config.out / "corners.csv");
        return ok;
    }
    if (name == "gap-collapse") {
        CsvTable t({"components", "lambda1", "lambda2", "gap"});
        std::vector<std::vector<SpectrumEntry>> parts;
        double a = 0.0, len = 1.0;
        // A sixth component moves λ₁ by less than the deduplication tolerance.
        for (int k = 1; k <= 5; ++k) {
            parts.push_back(interval_spectrum({a, a + len}, q, 3));
            a += len + 1.0;
            len *= 0.5;
            const auto gap = spectral_gap(spin_combine(parts, q));
            t.add_row(std::vector<double>{static_cast<double>(k), gap.lambda1, gap.lambda2, gap.gap});
            std::printf("gap-collapse k=%d gap=%.12g\n", k, gap.gap);
        }
        t.write(config.out / "gap_collapse.csv");
        return ok;
    }
    throw InputError("unknown experiment '" + name + "' (scaling, corners, gap-collapse)");
}

} // namespace

int main(int argc, char** argv)
{
    if (const char* env = std::getenv("LELAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }

    CLI::App app{"Sublinear Lane-Emden solvers, spectra, cone constants and inequality checks"};
    app.require_subcommand(1);
    RunConfig config;
    std::string sweep_beta, sweep_n, sweep_scale;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--q", config.q, "exponent q in (1, 2)");
        sub->add_option("--level", config.level, "refinement level");
        sub->add_option("--out", config.out, "output directory");
        sub->add_option("--seed", config.seed, "seed for randomized checks");
    };

    auto* solve = app.add_subcommand(
        "solve", "least-energy solution of -Δu = |u|^{q-2}u, first q-eigenvalue ‖w‖_q^{q-2}, geometry indices");
    common(solve);
    solve->add_option("--domain", config.domain, "domain file")->required()->check(CLI::ExistingFile);
    bool rayleigh = false;
    solve->add_flag("--rayleigh", rayleigh, "also minimize the Rayleigh quotient ∫|∇u|²/‖u‖_q²");

    auto* spectrum = app.add_subcommand(
        "spectrum", "bump spectrum of intervals, spin formula λ = [Σ(δ_i/λ_i)^{q/(2-q)}]^{(q-2)/q}, spectral gap");
    common(spectrum);
    spectrum->add_option("--domain", config.domain, "interval or interval_union file")
        ->required()
        ->check(CLI::ExistingFile);
    int kmax = 8;
    spectrum->add_option("--kmax", kmax, "bump counts per component");

    auto* cones = app.add_subcommand(
        "cones", "cap eigenvalue λ(S(β)), α(β), q threshold, compactness class, σ(β) = 1 + Θ(β), concentration");
    common(cones);
    cones->add_option("--sweep-beta", sweep_beta, "β grid start:stop:count");
    cones->add_option("--sweep-n", sweep_n, "concentration indices start:stop:count");
    int dim = 2;
    cones->add_option("--dim", dim, "ambient dimension N");
    bool sigma = false, concentration = false;
    cones->add_flag("--sigma", sigma, "Hardy constant σ with weight V^{q-2} on a tip-graded sector");
    cones->add_flag("--concentration", concentration, "quotients along φ(nx) against w and the cone solution V");

    auto* verify = app.add_subcommand(
        "verify", "inequality harness: pointwise bound, Hardy-Lane-Emden, linearized positivity, L∞ exponent, "
                  "gradient-L¹ bound, W_n bounds, census of 2^k-1 solutions, isolation, accumulation rates");
    common(verify);
    verify->add_option("--domain", config.domain, "run the per-domain checks on one file")
        ->check(CLI::ExistingFile);
    verify->add_flag("--all", config.all, "full default corpus");

    auto* experiment = app.add_subcommand("experiment", "tables: scaling, corners (boundary exponents), gap-collapse");
    common(experiment);
    std::string name;
    experiment->add_option("name", name, "experiment name")->required();
    experiment->add_option("--sweep-beta", sweep_beta, "β grid start:stop:count");
    experiment->add_option("--sweep-scale", sweep_scale, "dilation grid start:stop:count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return e.get_exit_code() == 0 ? code : config_error;
    }

    try {
        if (!sweep_beta.empty()) config.sweep_beta = parse_sweep(sweep_beta);
        if (!sweep_n.empty()) config.sweep_n = parse_sweep(sweep_n);
        if (!sweep_scale.empty()) config.sweep_scale = parse_sweep(sweep_scale);
        validate(config);
        std::filesystem::create_directories(config.out);
        auto* sub = app.get_subcommands().front();
        config.subcommand = sub->get_name();
        const bool q_flag = sub->count("--q") > 0, level_flag = sub->count("--level") > 0;
        if (sub == solve) return run_solve(config, q_flag, level_flag, rayleigh);
        if (sub == spectrum) return run_spectrum(config, q_flag, kmax);
        if (sub == cones) return run_cones(config, dim, sigma, concentration,
                             level_flag ? std::optional<int>(config.level) : std::nullopt);
        if (sub == verify) return run_verify(config, q_flag, level_flag);
        if (sub == experiment) return run_experiment(config, name);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return config_error;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return solver_failed;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return config_error;
    }
    return config_error;
}

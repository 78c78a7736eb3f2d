#include "experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <random>

#include "enclosure/errors.hpp"
#include "enclosure/format.hpp"
#include "enclosure/reconstruct.hpp"

namespace enclosure::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    return os;
}

void add_noise(BoundaryMeasurement& m, double level, std::mt19937_64& rng) {
    if (level == 0.0) return;  // leave the samples and the generator untouched
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& g : m.flux) g *= 1.0 + level * gauss(rng);
}

const char* problem_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::cavity: return "cavity";
        case ProblemKind::inclusion: return "inclusion";
        case ProblemKind::point_difference: return "point-difference";
    }
    return "?";
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const RunSettings& settings, std::ostream& log) {
    const fs::path out = settings.out.empty() ? fs::path(cfg.out) : fs::path(settings.out);
    fs::create_directories(out / "traces");
    const EllipseDomain domain = cfg.domain();
    const std::uint64_t seed = settings.seed.value_or(cfg.seed);

    SolverOptions solver;
    solver.grid_points = cfg.grid_points;
    SweepOptions sweep_opts;
    sweep_opts.directions = cfg.directions;
    sweep_opts.adaptive_window = cfg.adaptive_window;
    sweep_opts.window.ratio = cfg.window_ratio;
    sweep_opts.window.floor = cfg.window_floor;
    sweep_opts.window.count = cfg.window_count;
    sweep_opts.fit.floor = cfg.window_floor;
    sweep_opts.vertical_l_min = cfg.vertical_l_min;
    sweep_opts.vertical_l_max = cfg.vertical_l_max;
    sweep_opts.threads = settings.threads;
    sweep_opts.truth_region = cfg.region;

    SupportProfile profile;
    std::vector<Vec2> truth;
    if (cfg.problem == ProblemKind::point_difference) {
        const PointPair pair(*cfg.p, *cfg.q, domain);
        log << "point-difference sweep over " << cfg.directions << " directions\n";
        profile = sweep_point_difference(domain, cfg.region, cfg.materials, pair, sweep_opts, cfg.perpendicular_l_max);
        std::vector<Vec2> pts{pair.p, pair.q};
        if (cfg.region) pts.insert(pts.end(), cfg.region->vertices().begin(), cfg.region->vertices().end());
        truth = convex_hull(std::move(pts));
    } else {
        std::mt19937_64 rng(seed);
        std::vector<std::unique_ptr<FluxIntegrator>> data;
        std::vector<VoltageSource> sources;
        for (std::size_t i = 0; i < cfg.traces.size(); ++i) {
            const HarmonicTrace& f = cfg.traces[i];
            log << "forward solve " << i << '\n';
            BoundaryMeasurement m = cfg.problem == ProblemKind::inclusion
                                        ? solve_inclusion(domain, *cfg.region, f, cfg.materials, solver)
                                        : solve_cavity(domain, cfg.region, f, cfg.materials.gamma, solver);
            m.gamma_known = cfg.gamma_known;
            add_noise(m, cfg.noise, rng);
            auto os = open_out(out / ("measurement_" + std::to_string(i) + ".txt"));
            write_measurement(os, m);
            data.push_back(std::make_unique<FluxIntegrator>(m));
            sources.push_back({f, data.back().get()});
        }
        log << "sweep over " << cfg.directions << " directions\n";
        profile = sweep(domain, sources, sweep_opts);
        truth = truth_hull(domain, cfg.region);
    }

    for (std::size_t k = 0; k < profile.entries.size(); ++k) {
        const ProfileEntry& e = profile.entries[k];
        if (!e.trace) continue;
        char name[32];
        std::snprintf(name, sizeof name, "direction_%03zu.txt", k);
        auto os = open_out(out / "traces" / name);
        write_trace(os, *e.trace);
    }
    {
        auto os = open_out(out / "profile.txt");
        write_profile(os, profile);
    }

    const std::size_t used = profile.used();
    std::optional<HullEstimate> hull;
    std::string hull_failure;
    try {
        hull = intersect_halfplanes(profile);
    } catch (const InsufficientCoverage& e) {
        hull_failure = e.what();
    }
    {
        auto os = open_out(out / "hull.txt");
        if (hull) write_hull(os, *hull);
    }

    auto os = open_out(out / "summary.txt");
    os << "problem " << problem_name(cfg.problem) << '\n'
       << "a " << format_real(cfg.a) << '\n'
       << "b " << format_real(cfg.b) << '\n'
       << "directions " << profile.entries.size() << '\n'
       << "used " << used << '\n'
       << "excluded " << profile.entries.size() - used << '\n'
       << "noise " << format_real(cfg.noise) << '\n'
       << "seed " << seed << '\n';
    if (hull) {
        os << "hull_vertices " << hull->vertices.size() << '\n'
           << "hull_error " << format_real(hausdorff(hull->vertices, truth)) << '\n';
    } else {
        os << "hull_vertices 0\n"
           << "hull_error none (" << hull_failure << ")\n";
    }
    const int status = (used == profile.entries.size() && hull) ? 0 : 2;
    os << "status " << (status == 0 ? "ok" : "partial") << '\n';
    log << "used " << used << " of " << profile.entries.size() << " directions";
    if (hull)
        log << ", hull_error " << format_real(hausdorff(hull->vertices, truth));
    else
        log << ", no hull: " << hull_failure;
    log << '\n';
    return status;
}

}  // namespace enclosure::cli

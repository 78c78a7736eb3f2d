#include <doctest.h>

#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "enclosure/errors.hpp"
#include "experiment.hpp"
#include "suites.hpp"

using namespace enclosure;
using namespace enclosure::cli;
namespace fs = std::filesystem;

namespace {
ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "t.cfg");
}

std::string parse_error(const std::string& text) {
    try {
        (void)parse(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// every file under dir, keyed by relative path
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return files;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("enclosure_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

const char* small_cavity = R"(# ellipse with a small square
a = 2
b = 1
region = 0.3 0.1; 0.5 0.1; 0.5 0.3; 0.3 0.3
directions = 8
grid_points = 256
[trace]
alpha = 0 1
)";

std::string run_to(const std::string& text, const fs::path& out, int* status, std::optional<std::uint64_t> seed = {}) {
    RunSettings s;
    s.out = out.string();
    s.seed = seed;
    std::ostringstream log;
    *status = run_experiment(parse(text), s, log);
    return log.str();
}
}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("config parsing") {
        const ExperimentConfig c = parse(std::string(small_cavity) + "noise = 0.01\nseed = 42\n[trace]\nalpha = 1 0 2\nbeta = 0.5\n");
        CHECK(c.a == 2.0);
        CHECK(c.problem == ProblemKind::cavity);
        REQUIRE(c.region);
        CHECK(c.region->size() == 4);
        REQUIRE(c.traces.size() == 2);
        CHECK(c.traces[1].band_limit() == 2);
        CHECK(c.traces[1].beta(1) == 0.5);
        CHECK(c.traces[1].beta(2) == 0.0);
        CHECK(c.noise == 0.01);
        CHECK(c.seed == 42);

        const ExperimentConfig pd = parse("a = 1\nb = 1\nproblem = point-difference\np = 1 0\nq = -1 0\nwindow = fixed\n");
        CHECK(pd.problem == ProblemKind::point_difference);
        CHECK_FALSE(pd.adaptive_window);
        CHECK(pd.traces.empty());
    }

    TEST_CASE("parse errors name the line") {
        CHECK(parse_error("a = 2\nb = 1\nc = 3\n") == "t.cfg:3: unknown key 'c'");
        CHECK(parse_error("a = 2\nb = x\n") == "t.cfg:2: not a number: 'x'");
        CHECK(parse_error("a = 2\nalpha = 1\n") == "t.cfg:2: 'alpha' outside a [trace] block");
        CHECK(parse_error("a = 2\nb = 1\n\n[trace]\nalpha = 0 0\n").rfind("t.cfg:4: ", 0) == 0);
        CHECK(parse_error("a = 2\nb = 1\nregion = 0 0; 1 0; 2 0\n[trace]\nalpha = 0 1\n").rfind("t.cfg:3: ", 0) == 0);
        CHECK(parse_error("a = 2\nb = 1\nregion = 0 0; 3 0; 3 1\n[trace]\nalpha = 0 1\n").rfind("t.cfg:3: ", 0) == 0);
        CHECK(parse_error("a = 1\nb = 2\n[trace]\nalpha = 0 1\n").rfind("t.cfg:", 0) == 0);
        CHECK(parse_error("a = 1\nb = 1\nproblem = point-difference\np = 1 0\nq = 0.5 0\n").find("t.cfg:5:") == 0);
        CHECK(parse_error("a = 2\nb = 1\n").find("[trace]") != std::string::npos);
        CHECK(parse_error("a = 2\nb = 1\nnoise = -1\n").rfind("t.cfg:3: ", 0) == 0);
        CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ParseError);
    }

    TEST_CASE("run writes its artifacts") {
        const fs::path out = scratch("artifacts");
        int status = -1;
        run_to(small_cavity, out, &status);
        CHECK(status == 0);
        for (const char* f : {"measurement_0.txt", "profile.txt", "hull.txt", "summary.txt", "traces/direction_000.txt"})
            CHECK(fs::exists(out / f));
        const std::string summary = slurp(out / "summary.txt");
        CHECK(summary.find("used 8\n") != std::string::npos);
        CHECK(summary.find("status ok\n") != std::string::npos);
        CHECK(summary.find("hull_error ") != std::string::npos);
        std::ifstream m(out / "measurement_0.txt");
        const BoundaryMeasurement meas = read_measurement(m);
        CHECK(meas.size() == 256);
        fs::remove_all(out);
    }

    TEST_CASE("noise is reproducible and zero noise bypasses it") {
        const std::string noisy = std::string(small_cavity) + "noise = 0.01\nseed = 3\n";
        int s1 = 0, s2 = 0, s3 = 0;
        const fs::path a = scratch("noise_a"), b = scratch("noise_b"), c = scratch("noise_c");
        run_to(noisy, a, &s1);
        run_to(noisy, b, &s2);
        run_to(noisy, c, &s3, 4);
        CHECK(snapshot(a) == snapshot(b));
        CHECK(slurp(a / "measurement_0.txt") != slurp(c / "measurement_0.txt"));

        const fs::path z1 = scratch("zero_1"), z2 = scratch("zero_2");
        run_to(std::string(small_cavity) + "noise = 0\nseed = 1\n", z1, &s1);
        run_to(std::string(small_cavity) + "noise = 0\nseed = 99\n", z2, &s2);
        CHECK(slurp(z1 / "measurement_0.txt") == slurp(z2 / "measurement_0.txt"));
        CHECK(slurp(z1 / "profile.txt") == slurp(z2 / "profile.txt"));
        for (const auto& p : {a, b, c, z1, z2}) fs::remove_all(p);
    }

    TEST_CASE("a voltage failing every condition excludes every direction") {
        const fs::path out = scratch("excluded");
        int status = -1;
        const std::string log = run_to("a = 2\nb = 1\ndirections = 8\ngrid_points = 256\n[trace]\nalpha = 2\n", out, &status);
        CHECK(status == 2);
        const std::string summary = slurp(out / "summary.txt");
        CHECK(summary.find("used 0\n") != std::string::npos);
        CHECK(summary.find("hull_error none (") != std::string::npos);
        CHECK(summary.find("status partial\n") != std::string::npos);
        CHECK(slurp(out / "hull.txt").empty());
        CHECK(log.find("no hull") != std::string::npos);
        fs::remove_all(out);
    }

    TEST_CASE("suites") {
        CHECK(suite_names().size() == 10);
        const auto r = run_suite("claim211", {});
        REQUIRE(r.size() == 1);
        CHECK(r[0].id == "A2");
        CHECK(r[0].pass);
        std::ostringstream os;
        print_criterion(os, r[0]);
        CHECK(os.str().rfind("PASS A2 ", 0) == 0);
        CHECK_THROWS_AS(run_suite("nope", {}), ContractViolation);
    }
}

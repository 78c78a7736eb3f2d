#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "enclosure/errors.hpp"

namespace enclosure::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class LineError {
public:
    LineError(const std::string& source, int line) : prefix_(source + ":" + std::to_string(line) + ": ") {}
    [[noreturn]] void operator()(const std::string& what) const { throw ParseError(prefix_ + what); }

private:
    std::string prefix_;
};

std::vector<double> numbers(const std::string& text, const LineError& fail) {
    std::vector<double> out;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("not a number: '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

double number(const std::string& text, const LineError& fail) {
    const std::vector<double> v = numbers(text, fail);
    if (v.size() != 1) fail("expected one number, got '" + text + "'");
    return v[0];
}

std::size_t count(const std::string& text, const LineError& fail) {
    const double v = number(text, fail);
    if (v < 1.0 || v != static_cast<double>(static_cast<std::size_t>(v))) fail("expected a positive integer");
    return static_cast<std::size_t>(v);
}

Vec2 point(const std::string& text, const LineError& fail) {
    const std::vector<double> v = numbers(text, fail);
    if (v.size() != 2) fail("expected 'x y'");
    return {v[0], v[1]};
}

bool boolean(const std::string& text, const LineError& fail) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail("expected true or false, got '" + text + "'");
}

struct PendingTrace {
    std::vector<double> alpha;
    std::vector<double> beta;
    int line = 0;
};

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    ExperimentConfig cfg;
    std::vector<PendingTrace> traces;
    int region_line = 0;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const LineError fail(source, line_no);
        const std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line == "[trace]") {
            traces.push_back({{}, {}, line_no});
            continue;
        }
        if (line.front() == '[') fail("unknown section " + line);
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) fail("empty value for '" + key + "'");

        if (!traces.empty() && (key == "alpha" || key == "beta")) {
            (key == "alpha" ? traces.back().alpha : traces.back().beta) = numbers(value, fail);
        } else if (key == "alpha" || key == "beta") {
            fail("'" + key + "' outside a [trace] block");
        } else if (key == "a") {
            cfg.a = number(value, fail);
        } else if (key == "b") {
            cfg.b = number(value, fail);
        } else if (key == "problem") {
            if (value == "cavity") cfg.problem = ProblemKind::cavity;
            else if (value == "inclusion") cfg.problem = ProblemKind::inclusion;
            else if (value == "point-difference") cfg.problem = ProblemKind::point_difference;
            else fail("unknown problem '" + value + "'");
        } else if (key == "region") {
            std::vector<Vec2> verts;
            std::istringstream is(value);
            std::string item;
            while (std::getline(is, item, ';'))
                if (!trim(item).empty()) verts.push_back(point(item, fail));
            try {
                cfg.region = PolygonRegion(std::move(verts));
            } catch (const Error& e) {
                fail(e.what());
            }
            region_line = line_no;
        } else if (key == "gamma") {
            cfg.materials.gamma = number(value, fail);
        } else if (key == "gamma_inner") {
            cfg.materials.gamma_inner = number(value, fail);
        } else if (key == "gamma_known") {
            cfg.gamma_known = boolean(value, fail);
        } else if (key == "p") {
            cfg.p = point(value, fail);
        } else if (key == "q") {
            cfg.q = point(value, fail);
        } else if (key == "directions") {
            cfg.directions = count(value, fail);
        } else if (key == "window") {
            if (value == "adaptive") cfg.adaptive_window = true;
            else if (value == "fixed") cfg.adaptive_window = false;
            else fail("window must be adaptive or fixed");
        } else if (key == "window_ratio") {
            cfg.window_ratio = number(value, fail);
            if (!(cfg.window_ratio >= 3.0)) fail("window_ratio must be at least 3");
        } else if (key == "window_floor") {
            cfg.window_floor = number(value, fail);
            if (!(cfg.window_floor > 0.0 && cfg.window_floor < 1.0)) fail("window_floor must lie in (0, 1)");
        } else if (key == "window_count") {
            cfg.window_count = count(value, fail);
        } else if (key == "vertical_l") {
            const std::vector<double> v = numbers(value, fail);
            if (v.size() != 2 || v[0] < 1 || v[1] < v[0]) fail("vertical_l expects 'l_min l_max'");
            cfg.vertical_l_min = static_cast<int>(v[0]);
            cfg.vertical_l_max = static_cast<int>(v[1]);
        } else if (key == "perpendicular_l") {
            cfg.perpendicular_l_max = static_cast<int>(count(value, fail));
        } else if (key == "grid_points") {
            cfg.grid_points = count(value, fail);
        } else if (key == "noise") {
            cfg.noise = number(value, fail);
            if (!(cfg.noise >= 0.0)) fail("noise must be non-negative");
        } else if (key == "seed") {
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), cfg.seed);
            if (ec != std::errc{} || ptr != value.data() + value.size()) fail("seed must be an unsigned integer");
        } else if (key == "out") {
            cfg.out = value;
        } else {
            fail("unknown key '" + key + "'");
        }
    }

    const LineError at_end(source, line_no);
    try {
        const EllipseDomain d = cfg.domain();
        if (cfg.region) (void)clearance(*cfg.region, d);
        cfg.materials.validate();
    } catch (const Error& e) {
        LineError(source, region_line ? region_line : line_no)(e.what());
    }
    if (cfg.problem == ProblemKind::inclusion && (!cfg.region || !cfg.materials.gamma_inner))
        at_end("an inclusion needs 'region' and 'gamma_inner'");
    if (cfg.problem == ProblemKind::cavity && cfg.materials.gamma_inner)
        at_end("'gamma_inner' is only meaningful for an inclusion");
    if (cfg.problem == ProblemKind::point_difference) {
        if (!cfg.p || !cfg.q) at_end("point-difference needs 'p' and 'q'");
        try {
            (void)PointPair(*cfg.p, *cfg.q, cfg.domain());
        } catch (const Error& e) {
            at_end(e.what());
        }
    } else if (traces.empty()) {
        at_end("at least one [trace] block is required");
    }

    for (const PendingTrace& t : traces) {
        const LineError fail(source, t.line);
        if (t.alpha.empty()) fail("[trace] without alpha");
        std::vector<double> beta = t.beta;
        const std::size_t n = t.alpha.size() - 1;
        if (beta.size() > n) fail("beta has more entries than alpha_1..alpha_N");
        beta.resize(n, 0.0);
        HarmonicTrace f(t.alpha, beta);
        if (f.is_zero()) fail("trace is identically zero");
        cfg.traces.push_back(std::move(f));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    return parse_config(in, path);
}

}  // namespace enclosure::cli

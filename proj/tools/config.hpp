#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "enclosure/boundary_data.hpp"
#include "enclosure/forward.hpp"
#include "enclosure/geometry.hpp"

namespace enclosure::cli {

enum class ProblemKind { cavity, inclusion, point_difference };

// Flat "key = value" lines, '#' comments, and one [trace] block per voltage.
struct ExperimentConfig {
    double a = 1.0;
    double b = 1.0;
    ProblemKind problem = ProblemKind::cavity;
    std::optional<PolygonRegion> region;
    MaterialSpec materials;
    bool gamma_known = true;
    std::vector<HarmonicTrace> traces;
    std::optional<Vec2> p;
    std::optional<Vec2> q;

    std::size_t directions = 64;
    bool adaptive_window = true;
    double window_ratio = 4.0;
    double window_floor = 1e-11;
    std::size_t window_count = 32;
    int vertical_l_min = 4;
    int vertical_l_max = 40;
    int perpendicular_l_max = 12;
    std::size_t grid_points = 1024;

    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out = "out";

    EllipseDomain domain() const { return {a, b}; }
};

/// Throws ParseError naming the source and line.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

}  // namespace enclosure::cli

#pragma once

#include <iosfwd>

#include "config.hpp"

namespace enclosure::cli {

struct RunSettings {
    std::string out;       // overrides the config when non-empty
    unsigned threads = 0;  // 0: hardware concurrency
    std::optional<std::uint64_t> seed;
};

/// Forward solves, noise, sweep, hull and artifacts. Returns 0 when every
/// direction was used, 2 when some were excluded or no hull could be formed.
/// Errors propagate as exceptions (exit 1 at the caller).
int run_experiment(const ExperimentConfig& config, const RunSettings& settings, std::ostream& log);

}  // namespace enclosure::cli

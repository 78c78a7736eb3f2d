#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace enclosure::cli {

struct Criterion {
    std::string id;        // "A1".."A10"
    std::string name;
    bool pass = false;
    std::string measured;  // one-line summary of the measured values
    double seconds = 0.0;
    double time_limit = 0.0;
};

struct SuiteSettings {
    unsigned threads = 0;
    std::uint64_t seed = 1;
    std::ostream* detail = nullptr;  // per-direction lines, when wanted
};

/// lemma21 claim211 closedform circle ellipse vertical inclusion
/// nonuniqueness blindness pointdiff
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Throws ContractViolation for
/// an unknown name.
std::vector<Criterion> run_suite(const std::string& name, const SuiteSettings& settings);

/// "PASS A4 name: measured (12.3 s)"
void print_criterion(std::ostream& os, const Criterion& c);

}  // namespace enclosure::cli

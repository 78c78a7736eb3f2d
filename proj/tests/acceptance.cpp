// Prints one PASS/FAIL line per acceptance criterion. Criteria listed with
// --expect-red are known not to meet their tolerance; they still print FAIL
// but do not fail the process. Anything else failing does.
#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <sstream>

#include "suites.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria A1-A10"};
    std::string expect_red;
    unsigned threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--expect-red", expect_red, "comma-separated criteria known to fail, e.g. A4,A5");
    app.add_option("--threads", threads, "worker threads, 0 for all cores");
    app.add_option("--seed", seed, "seed for the randomized suites");
    CLI11_PARSE(app, argc, argv);

    std::set<std::string> red;
    std::istringstream is(expect_red);
    for (std::string id; std::getline(is, id, ',');)
        if (!id.empty()) red.insert(id);

    enclosure::cli::SuiteSettings settings;
    settings.threads = threads;
    settings.seed = seed;
    const auto results = enclosure::cli::run_suite("all", settings);

    int unexpected = 0;
    for (const auto& c : results) {
        enclosure::cli::print_criterion(std::cout, c);
        if (!c.pass && !red.count(c.id)) ++unexpected;
        if (c.pass && red.count(c.id)) std::cout << "  note: " << c.id << " was expected to fail but passed\n";
    }
    int passed = 0;
    for (const auto& c : results) passed += c.pass;
    std::cout << passed << '/' << results.size() << " criteria pass";
    if (!red.empty()) std::cout << ", " << unexpected << " unexpected failures";
    std::cout << '\n';
    return unexpected == 0 ? 0 : 1;
}

// Acceptance runner: executes the numbered validation criteria and prints one
// pass/fail line per criterion. Exit status 0 iff everything passed.
// Usage: acceptance [id ...]

#include <cstdlib>
#include <iostream>
#include <set>

#include "annealed_ldp/acceptance.hpp"

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    bool all_pass = true;
    annealed_ldp::acceptance::run_criteria(only, [&](const auto& r) {
        annealed_ldp::acceptance::print_result(std::cout, r);
        std::cout.flush();
        all_pass = all_pass && r.pass;
    });
    std::cout << (all_pass ? "all criteria passed" : "some criteria FAILED") << std::endl;
    return all_pass ? 0 : 1;
}

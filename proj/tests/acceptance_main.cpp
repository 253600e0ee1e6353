#include "arz/acceptance.hpp"

#include <iostream>

int main() {
    arz::AcceptanceOptions options;
    bool all = true;
    arz::run_acceptance(options, [&](const arz::CriterionResult& r) {
        std::cout << arz::format_result(r) << std::endl;
        all = all && r.passed;
    });
    std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
    return all ? 0 : 1;
}

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace arz {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;   // measured values next to their thresholds
    double seconds = 0.0;
};

struct AcceptanceOptions {
    std::string scratch_dir = "acceptance_scratch";  // used by the determinism check
    std::vector<int> only;                           // empty runs criteria 1-8
};

// One line: "[PASS] 3 kernel verification: ... (12.3 s)".
std::string format_result(const CriterionResult& result);

CriterionResult criterion_steady_identities();
CriterionResult criterion_stability_cross_check();
CriterionResult criterion_kernel_verification();
CriterionResult criterion_difference_mechanism();
CriterionResult criterion_stabilization();
CriterionResult criterion_linearization_consistency();
CriterionResult criterion_conservation();
CriterionResult criterion_determinism(const std::string& scratch_dir);

// Runs the selected criteria in order and reports each result as soon as it is known.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace arz

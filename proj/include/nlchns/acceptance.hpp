#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlchns::accept {

enum class Level { quick, full };

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    bool gating = true;  // soft criteria report without gating
    std::string detail;
};

/// Runs the verification criteria at the given level and prints one
/// pass/fail line per criterion. quick uses 32^2 grids and short
/// horizons; full runs the reference sizes.
std::vector<CriterionResult> run_acceptance(Level level, std::ostream& out);

/// Number of gating failures.
int count_failures(const std::vector<CriterionResult>& results);

}  // namespace nlchns::accept

#pragma once

#include <string>
#include <vector>

#include "xol/normal.hpp"

namespace xol {

struct SelfCheckItem {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SelfCheckReport {
    std::vector<SelfCheckItem> checks;
    double seconds = 0.0;

    bool passed() const;
};

// Fast invariant suite: normal quantiles, closed-form vs quadrature moments,
// φ_h closed forms, derivative identities, known optima and seed determinism.
// The quantile table is injectable so a damaged table can be detected.
SelfCheckReport run_selfcheck(const QuantileTable& table = default_quantile_table());

} // namespace xol

#pragma once

#include <cstddef>
#include <vector>

namespace purf {

// Piecewise-constant function on [0,1] with the same half-open cell
// convention as UniformPartition: values[j] holds on (cuts[j-1], cuts[j]].
// Duplicate cut points are allowed and carry zero mass.
struct StepFunction {
    std::vector<double> cuts;
    std::vector<double> values;  // cuts.size() + 1 entries

    double operator()(double x) const;
};

// Pointwise binary combination on the union of breakpoints.
StepFunction step_difference(const StepFunction& f, const StepFunction& g);

// Sorted union of the breakpoints of f and g (duplicates kept once).
std::vector<double> merged_cuts(const StepFunction& f, const StepFunction& g);

}  // namespace purf

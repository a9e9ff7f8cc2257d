#include "purf/step_function.hpp"

#include <algorithm>
#include <stdexcept>

namespace purf {

double StepFunction::operator()(double x) const {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("StepFunction: x outside [0,1]");
    return values[static_cast<std::size_t>(
        std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin())];
}

std::vector<double> merged_cuts(const StepFunction& f, const StepFunction& g) {
    std::vector<double> out;
    out.reserve(f.cuts.size() + g.cuts.size());
    std::merge(f.cuts.begin(), f.cuts.end(), g.cuts.begin(), g.cuts.end(),
               std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

StepFunction step_difference(const StepFunction& f, const StepFunction& g) {
    StepFunction out;
    if (f.cuts == g.cuts) {
        out.cuts = f.cuts;
        out.values.resize(f.values.size());
        for (std::size_t j = 0; j < f.values.size(); ++j)
            out.values[j] = f.values[j] - g.values[j];
        return out;
    }
    out.cuts = merged_cuts(f, g);
    out.values.resize(out.cuts.size() + 1);
    std::size_t fi = 0, gi = 0;
    for (std::size_t c = 0; c <= out.cuts.size(); ++c) {
        out.values[c] = f.values[fi] - g.values[gi];
        if (c < out.cuts.size()) {
            const double cut = out.cuts[c];
            while (fi < f.cuts.size() && f.cuts[fi] == cut) ++fi;
            while (gi < g.cuts.size() && g.cuts[gi] == cut) ++gi;
        }
    }
    return out;
}

}  // namespace purf

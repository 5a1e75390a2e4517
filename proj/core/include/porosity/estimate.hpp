#pragma once

#include <string>
#include <vector>

#include "porosity/scalar.hpp"

namespace porosity {

// Depth and tolerance shared by every limit estimator. The limsup (liminf)
// surrogate is the largest (smallest) window extremum over the last
// `windows` windows; the estimate counts as converged when the relevant
// extrema of the last `agree` windows lie within tol of each other.
struct Protocol {
    long depth = 24;
    double tol = 1e-6;
    int windows = 8;
    int agree = 3;
};

struct WindowStat {
    long index = 0;
    Scalar sup;
    Scalar inf;
    bool partial = false;
};

enum class Extremum { sup, inf };

struct EstimateBracket {
    Extremum which = Extremum::sup;
    Scalar estimate;
    double value = 0.0;
    long depth = 0;
    double tol = 0.0;
    bool converged = false;
    // Some window could not be completed within the enumeration budget.
    bool partial = false;
    std::vector<WindowStat> windows;
};

// Reduces per-window extrema (ordered by index) to a bracket.
EstimateBracket reduce_windows(std::vector<WindowStat> windows, Extremum which, const Protocol& p);

std::string bracket_json(const EstimateBracket& b);

}  // namespace porosity

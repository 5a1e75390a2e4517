#include "porosity/estimate.hpp"

#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "porosity/error.hpp"

namespace porosity {

EstimateBracket reduce_windows(std::vector<WindowStat> windows, Extremum which, const Protocol& p) {
    EstimateBracket b;
    b.which = which;
    b.depth = p.depth;
    b.tol = p.tol;
    if (windows.empty()) throw DomainError("no windows to estimate from");
    if (static_cast<int>(windows.size()) > p.windows)
        windows.erase(windows.begin(), windows.end() - p.windows);
    auto pick = [&](const WindowStat& w) -> const Scalar& { return which == Extremum::sup ? w.sup : w.inf; };
    b.estimate = pick(windows.front());
    for (const auto& w : windows) {
        const Scalar& v = pick(w);
        if (which == Extremum::sup ? b.estimate < v : v < b.estimate) b.estimate = v;
        b.partial = b.partial || w.partial;
    }
    b.value = b.estimate.to_double();
    if (static_cast<int>(windows.size()) >= p.agree) {
        double lo = INFINITY, hi = -INFINITY;
        for (auto it = windows.end() - p.agree; it != windows.end(); ++it) {
            const double v = pick(*it).to_double();
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        b.converged = hi - lo <= p.tol;
    }
    b.windows = std::move(windows);
    return b;
}

std::string bracket_json(const EstimateBracket& b) {
    json w = json::array();
    for (const auto& s : b.windows)
        w.push_back({{"index", s.index}, {"sup", s.sup.str()}, {"inf", s.inf.str()}, {"partial", s.partial}});
    json j = {{"extremum", b.which == Extremum::sup ? "sup" : "inf"},
              {"estimate", b.estimate.str()},
              {"value", b.value},
              {"depth", b.depth},
              {"tol", b.tol},
              {"converged", b.converged},
              {"partial", b.partial},
              {"windows", w}};
    return j.dump();
}

}  // namespace porosity

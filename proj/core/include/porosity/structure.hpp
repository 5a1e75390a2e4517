#pragma once

#include <optional>
#include <string>
#include <vector>

#include "porosity/estimate.hpp"
#include "porosity/porosity0.hpp"
#include "porosity/setkit.hpp"

namespace porosity {

enum class Verdict { consistent, inconsistent, inconclusive };
const char* to_string(Verdict v);

struct Component {
    Scalar a;
    Scalar b;
    // touches h or 0, so it is left out of the limit profiles
    bool partial = false;
};

// Maximal E-free open intervals in (0, h), largest first, down to the floor
// 2^-depth: consecutive points of E, plus the flagged end pieces.
struct ComponentChain {
    std::vector<Component> items;
    Scalar h;
    long depth = 0;
    std::string source;
    // The complete components only.
    std::vector<Component> complete() const;
};
ComponentChain components(const SetHandle& e, const Scalar& h, long depth);
// Every stride-th complete component starting at offset.
ComponentChain subchain(const ComponentChain& c, std::size_t stride, std::size_t offset = 0);

// limsup of a_n / b_{n+1} along the complete components, one window per index.
EstimateBracket chain_M(const ComponentChain& c, const Protocol& p);

struct SSPProfiles {
    EstimateBracket a_limit;     // limsup a_k, should tend to 0
    EstimateBracket gap_ratio;   // liminf (b_k - a_k) / b_k, should tend to 1
    EstimateBracket adjacency;   // liminf b_{k+1} / a_k, should tend to 1
};

struct SSPReport {
    Verdict verdict = Verdict::inconclusive;
    std::optional<SSPProfiles> profiles;  // absent when 0 is not a limit point
    ComponentChain chain;
    // Lower porosity at infinity of N under mu when E = mu(N).
    std::optional<EstimateBracket> image_lower_inf;
    std::optional<Verdict> image_verdict;
};
// Depth is the floor exponent; p.windows and p.agree apply per component.
SSPReport classify_ssp(const SetHandle& e, const Protocol& p);

struct CSPReport {
    Verdict verdict = Verdict::inconclusive;
    std::optional<EstimateBracket> m;  // M of the all-components chain
    std::optional<EstimateBracket> upper_porosity;
};
// A chain with finite M and strong porosity at 0.
CSPReport classify_csp(const SetHandle& e, const Protocol& p);

// F(x, y) = |x - y| min(x, y) / max(x, y)^2
Scalar f_value(const Scalar& x, const Scalar& y);

struct FProfile {
    // windows[j].sup = sup F(x, y) over x, y in E with max(x, y) <= 2^-j
    std::vector<WindowStat> windows;
    EstimateBracket bracket;
    Verdict verdict = Verdict::inconclusive;
};
FProfile f_criterion(const SetHandle& e, const Protocol& p);

struct HalfLawReport {
    bool accumulates = false;  // 0 is a limit point of E
    EstimateBracket lower;
    bool at_most_half = true;
    Verdict ssp = Verdict::inconclusive;
    std::optional<bool> equals_half;
    // local minimum of phi on [a_k, a_{k-1}] at 2 a_k - a_{k+1}
    std::size_t minima_checked = 0;
    std::size_t minima_failed = 0;
    bool pass = false;
};
HalfLawReport half_law_checks(const SetHandle& e, const Protocol& p);

std::string ssp_json(const SSPReport& r);

}  // namespace porosity

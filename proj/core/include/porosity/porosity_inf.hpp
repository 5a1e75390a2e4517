#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "porosity/estimate.hpp"
#include "porosity/porosity0.hpp"
#include "porosity/setkit.hpp"

namespace porosity {

// lambda_mu(E, n) with witness pair n <= n1 < n2 (n2 empty means infinity,
// where mu is taken as 0). ratio is lambda / mu(n).
struct InfGapReport {
    std::uint64_t n = 0;
    Scalar lambda;
    Scalar ratio;
    std::uint64_t n1 = 0;
    std::optional<std::uint64_t> n2;
    bool exact = true;
};

InfGapReport lambda_inf(const IntegerSet& e, const ScalingFunction& mu, std::uint64_t n,
                        std::size_t budget = kDefaultBudget);

// Extrema of lambda_mu(E, n) / mu(n) over n in [2^j, 2^(j+1)).
struct InfWindow {
    long index = 0;
    Scalar sup;
    Scalar inf;
    std::uint64_t argmax = 0;
    std::uint64_t argmin = 0;
};
InfWindow inf_window_extrema(const IntegerSet& e, const ScalingFunction& mu, long j);

// Extrema of mu(n_{k+1}) / mu(n_k) over elements n_k in [2^j, 2^(j+1)).
// Empty when the window holds no element with a successor.
std::optional<WindowStat> ratio_window(const IntegerSet& e, const ScalingFunction& mu, long j);

struct InfUpper {
    EstimateBracket direct;
    // 1 - liminf mu(n_k) / mu(n_{k-1}); absent for finite E.
    std::optional<EstimateBracket> ratio;
    bool agree = true;
};
// Throws Disagreement when both estimates converged yet differ beyond tol.
InfUpper upper_porosity_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p);
EstimateBracket lower_porosity_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p);

struct InfInterval {
    EstimateBracket lower;
    EstimateBracket upper;
};
// Hull [liminf, limsup] of the porosity numbers at infinity.
InfInterval porosity_interval_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p);

enum class InfLabel { nonporous, porous, strongly_porous };
const char* to_string(InfLabel l);

struct InfClassification {
    InfLabel label = InfLabel::porous;
    EstimateBracket ratio_liminf;
    EstimateBracket ratio_limsup;
    bool converged = false;
};
InfClassification classify_inf(const IntegerSet& e, const ScalingFunction& mu, const Protocol& p);

struct Theorem32Report {
    Scalar lhs;  // upper porosity of mu(E) at 0
    Scalar rhs;  // upper porosity of E at infinity
    double gap = 0.0;
    bool exact = true;
    bool converged = false;
    bool pass = false;
};
Theorem32Report check_theorem_3_2(const IntegerSet& e, const ScalingFunction& mu, const Protocol& at_zero,
                                  const Protocol& at_infinity);

struct ScalingEquivalence {
    bool equivalent = false;
    // window max of |mu1(n) mu2(m) / (mu2(n) mu1(m)) - 1| over n, m in the window
    EstimateBracket deviation;
    // mu1(n_{k+1}) mu2(n_k) / (mu1(n_k) mu2(n_{k+1})) along a supplied subsequence
    std::optional<EstimateBracket> alpha;
};
ScalingEquivalence scaling_equivalent(const ScalingFunction& mu1, const ScalingFunction& mu2, const Protocol& p,
                                      const std::optional<IntegerSet>& subsequence = std::nullopt);

struct ConcaveClosedForms {
    EstimateBracket p_mu_lower;     // 1 - limsup mu(n+1)/mu(n)
    EstimateBracket p_image_lower;  // p / (1 + p)
    std::optional<std::uint64_t> concavity_onset;
};
// Throws DomainError when mu is not concave (in the sense above) over the
// deepest window.
ConcaveClosedForms eventually_concave_closed_forms(const ScalingFunction& mu, const Protocol& p);

// M_{E,mu}: m >= 2 belongs iff [mu(m+1), mu(m-1)] meets the closure of E;
// m = 1 iff E meets [mu(2), infinity).
struct MSet {
    std::vector<std::uint64_t> prefix;  // M intersected with [1, N]
    IntegerSet lazy = IntegerSet::explicit_values({});  // the whole M, evaluated on demand
    std::uint64_t n = 0;
    // memberships decided by the closure rule because enumeration ran out
    std::size_t assumed = 0;
};
MSet build_M(const SetHandle& e, const ScalingFunction& mu, std::uint64_t n);

struct Theorem49Report {
    // 1 - inf mu(n+1)/mu(n) over the deepest n-window
    double ratio_gap = 0.0;
    bool ratio_tends_to_one = false;
    PorosityInterval at_zero;
    InfInterval at_infinity;
    double lower_gap = 0.0;
    double upper_gap = 0.0;
    bool intervals_agree = false;
    long n_depth = 0;
};
// Windows at infinity run over [2^j, 2^(j+1)) with 2^(j+1) - 1 <= N.
Theorem49Report check_theorem_4_9(const SetHandle& e, const ScalingFunction& mu, std::uint64_t n,
                                  const Protocol& at_zero, double tol);

}  // namespace porosity

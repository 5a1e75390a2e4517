#pragma once

#include <string>
#include <vector>

#include "porosity/estimate.hpp"
#include "porosity/setkit.hpp"

namespace porosity {

// Largest E-free open subinterval (a, b) of (0, h). Ties go to the largest
// left endpoint. When the enumeration budget ran out, exact is false and
// lambda <= true value <= upper_bound.
struct GapReport {
    Scalar h;
    Scalar lambda;
    Scalar a;
    Scalar b;
    bool exact = true;
    Scalar upper_bound;
};

GapReport largest_gap(const SetHandle& e, const Scalar& h);
// lambda(E, h) / h
Scalar phi(const SetHandle& e, const Scalar& h);

// Extrema of phi over the window (lo, hi].
struct PhiWindow {
    long index = 0;
    Scalar lo;
    Scalar hi;
    Scalar sup;
    Scalar inf;
    Scalar argmax;
    Scalar argmin;
    bool partial = false;
};

PhiWindow phi_extrema(const SetHandle& e, const Scalar& lo, const Scalar& hi);
// Dyadic window j: (2^-(j+1), 2^-j].
PhiWindow window_extrema(const SetHandle& e, long j);
// Windows first..last; stops early (last window marked partial) if the
// enumeration budget runs out.
std::vector<PhiWindow> phi_profile(const SetHandle& e, long first, long last);

EstimateBracket upper_porosity0(const SetHandle& e, const Protocol& p);
EstimateBracket lower_porosity0(const SetHandle& e, const Protocol& p);

struct PorosityInterval {
    EstimateBracket lower;
    EstimateBracket upper;
};
PorosityInterval porosity_interval(const SetHandle& e, const Protocol& p);

// Radii realising the window suprema together with the rescaled gaps
// (a/h, b/h). The limit interval is read off the deepest window.
struct PorosityWitness {
    std::vector<Scalar> radii;
    std::vector<GapReport> gaps;
    Scalar a;
    Scalar b;
    bool converged = false;
};
PorosityWitness porosity_witness(const SetHandle& e, const Protocol& p);

// "j,h_lo,h_hi,window_sup,window_inf"
std::string profile_csv(const std::vector<PhiWindow>& windows);

}  // namespace porosity

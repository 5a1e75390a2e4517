#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "porosity/estimate.hpp"
#include "porosity/porosity0.hpp"
#include "porosity/setkit.hpp"

namespace porosity {

// Positive scales r_0, r_1, ... tending to 0, optionally required to lie in
// a ground set.
class NormalizingSequence {
public:
    enum class Kind { from_set_points, geometric, explicit_list, gap_witness };

    // r_n = x_{offset + n stride}, with x_i the points of E in decreasing order.
    static NormalizingSequence from_set_points(const SetHandle& e, std::size_t offset = 0, std::size_t stride = 1);
    // r_n = x_{i_n} with i_n = n step + u_n, u_n uniform in [0, step) from seed.
    static NormalizingSequence sampled_from_set(const SetHandle& e, std::uint64_t seed, std::size_t step = 4);
    // r_n = q^n.
    static NormalizingSequence geometric(const Scalar& q);
    static NormalizingSequence explicit_list(std::vector<Scalar> values);
    // The radii of a porosity witness.
    static NormalizingSequence gap_witness(std::vector<Scalar> radii);

    // Every value must be a point of ground; at() throws DomainError otherwise.
    NormalizingSequence constrained_to(const SetHandle& ground) const;

    Kind kind() const { return kind_; }
    std::string kind_name() const;
    // Throws DomainError past the end of a finite list.
    Scalar at(std::size_t n) const;
    std::optional<std::size_t> length() const { return length_; }

private:
    Kind kind_ = Kind::explicit_list;
    std::function<Scalar(std::size_t)> term_;
    std::optional<std::size_t> length_;
    std::optional<SetHandle> ground_;
};

// {x / r : x in E, floor <= x / r <= cap} together with 0, ascending.
struct Snapshot {
    std::size_t n = 0;
    Scalar r;
    Scalar cap;
    std::vector<Scalar> points;
};
Snapshot snapshot(const SetHandle& e, const Scalar& r, const Scalar& cap,
                  const Scalar& floor = Scalar::pow2(-30, ScalarMode::exact));

struct Cluster {
    Scalar value;  // smallest member
    Scalar hi;     // largest member, below value + eps
    std::size_t hits = 0;
    bool stable = false;  // present in every snapshot of the tail
};

struct LimitSetEstimate {
    std::vector<Cluster> clusters;
    Scalar eps;
    std::size_t first = 0;
    std::size_t last = 0;
};

struct ClusterOptions {
    Scalar cap = Scalar(4);
    Scalar eps = Scalar::pow2(-12, ScalarMode::exact);
    std::size_t tail = 8;
};

// Points of the snapshots for n in the tail [depth - tail + 1, depth],
// merged by an ascending sweep: a point joins the current cluster when it lies
// within eps of the cluster's smallest member.
LimitSetEstimate limit_set(const SetHandle& e, const NormalizingSequence& r, std::size_t depth,
                           const ClusterOptions& opt = {});

struct Avoidance {
    bool avoided = true;
    std::optional<std::size_t> index;
    std::optional<Scalar> witness;  // rescaled point inside the interval
};
// Whether ((1 + margin) a, (1 - margin) b) holds no rescaled point of E for
// every index n in [first, depth].
Avoidance interval_avoided(const SetHandle& e, const NormalizingSequence& r, const Scalar& a, const Scalar& b,
                           std::size_t depth, double margin = 0.0, std::size_t first = 0);

struct AvoidedInterval {
    Scalar a;
    Scalar b;
    Scalar length;
};
// Longest interval in (0, 1) between consecutive cluster endpoints (and 0, 1)
// of the snapshots for n in [first, depth] that passes interval_avoided;
// ties go to the smallest a.
AvoidedInterval max_avoided_interval(const SetHandle& e, const NormalizingSequence& r, std::size_t depth,
                                     const Scalar& eps = Scalar::pow2(-12, ScalarMode::exact), std::size_t first = 0);

struct WitnessRoundTrip {
    NormalizingSequence radii;
    Scalar a;
    Scalar b;
    bool converged = false;
    Avoidance check;
};
// Radii h_j maximizing phi over dyadic windows, the limit of the rescaled
// largest gaps, and the avoidance check of that interval along the radii.
WitnessRoundTrip witness_round_trip(const SetHandle& e, const Protocol& p);

struct CardProbe {
    std::size_t stable = 0;  // lower bound on the cardinality
    std::size_t total = 0;   // upper bound at resolution eps
};
// Clusters of limit_set within [0, 1], 0 included.
CardProbe omega_card_probe(const SetHandle& e, const NormalizingSequence& r, std::size_t depth,
                           const ClusterOptions& opt = {Scalar(1), Scalar::pow2(-12, ScalarMode::exact), 8});

struct PreceqWindow {
    long index = 0;
    std::optional<double> value;  // absent when E has no point in the window
};
struct PreceqProfile {
    std::vector<PreceqWindow> windows;
    bool consistent = false;
};
// Per window (2^-(j+1), 2^-j]: sup over x in E of |x / nearest_T(x) - 1|.
PreceqProfile preceq_surrogate(const SetHandle& e, const SetHandle& t, long depth, double tol = 1e-6);

struct RStar {
    double upper = 0.0;                                       // R*
    double lower = std::numeric_limits<double>::infinity();  // R_*
    std::size_t samples = 0;
};
// Over seeded normalizing sequences drawn from E: R* = largest stable
// cluster, R_* = smallest nonzero stable cluster.
RStar r_star_quantities(const SetHandle& e, std::size_t samples, std::size_t depth, std::uint64_t seed,
                        const ClusterOptions& opt = {});

// "n,r,point"
std::string snapshot_csv(const std::vector<Snapshot>& snaps);

}  // namespace porosity

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "porosity/setkit.hpp"

namespace porosity {

using json = nlohmann::json;

class IntegerSet::Impl {
public:
    virtual ~Impl() = default;
    virtual bool contains(std::uint64_t n) const = 0;
    virtual std::optional<std::uint64_t> next_after(std::uint64_t n) const = 0;
    virtual bool is_finite() const = 0;
    virtual std::optional<std::uint64_t> arithmetic_step_from(std::uint64_t) const { return std::nullopt; }
    virtual std::string kind() const = 0;
    virtual json spec() const = 0;
};

// Produces the positive points of a set in strictly decreasing order.
class PointGenerator {
public:
    virtual ~PointGenerator() = default;
    virtual std::optional<Scalar> next() = 0;
};

struct SetHandle::Definition {
    std::string kind;
    ScalarMode mode = ScalarMode::exact;
    bool finite = false;
    bool monotone_gaps = false;
    json spec;
    std::function<std::unique_ptr<PointGenerator>()> make_generator;
    std::optional<std::pair<ScalingFunction, IntegerSet>> image;
    std::function<SetHandle(ScalarMode)> rebuild;
};

struct PointCursor::Shared {
    std::mutex mu;
    std::unique_ptr<PointGenerator> gen;
    std::vector<std::shared_ptr<const std::vector<Scalar>>> chunks;
    std::vector<std::size_t> offsets;  // start index of each chunk
    std::size_t total = 0;
    bool exhausted = false;
    std::size_t budget = kDefaultBudget;
    std::optional<Scalar> last;

    // Appends one chunk. Returns false when nothing could be added.
    bool extend_locked();
};

json scalar_json(const Scalar& s);

}  // namespace porosity

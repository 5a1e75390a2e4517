#include "porosity/spec_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "internal.hpp"
#include "porosity/error.hpp"

namespace porosity {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Scalar number(const json& j, const char* what) {
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(static_cast<long>(j.get<long long>()));
    if (j.is_number_unsigned()) return Scalar(static_cast<long>(j.get<unsigned long long>()));
    if (j.is_number_float()) {
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        return Scalar::parse(os.str());
    }
    throw ParseError(std::string("'") + what + "' must be a number or a \"p/q\" string");
}

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "' in " + j.dump());
    return j.at(key);
}

std::uint64_t uint_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
    if (v.is_string()) {
        try {
            return std::stoull(v.get<std::string>());
        } catch (...) {
        }
    }
    throw ParseError(std::string("'") + key + "' must be a nonnegative integer");
}

ScalarMode mode_of(const json& j, ScalarMode forced) {
    if (forced == ScalarMode::log_domain) return forced;
    if (j.contains("mode")) {
        const std::string m = j.at("mode").get<std::string>();
        if (m == "log" || m == "log_domain") return ScalarMode::log_domain;
        if (m != "exact") throw ParseError("unknown mode '" + m + "'");
    }
    return ScalarMode::exact;
}

json parse_json_or_shorthand(const std::string& text, const char* what);

IntegerSet integer_set_from(const json& j);

IntegerSet integer_shorthand(const std::vector<std::string>& parts) {
    const std::string& k = parts[0];
    auto arg = [&](std::size_t i) -> std::uint64_t {
        if (i >= parts.size()) throw ParseError("shorthand '" + k + "' needs more arguments");
        return std::stoull(parts[i]);
    };
    if (k == "all" || k == "naturals" || k == "N") return IntegerSet::all();
    if (k == "evens") return IntegerSet::arithmetic(2, 2);
    if (k == "odds") return IntegerSet::arithmetic(1, 2);
    if (k == "arithmetic") return IntegerSet::arithmetic(arg(1), arg(2));
    if (k == "primes") return IntegerSet::primes();
    if (k == "squares") return IntegerSet::squares();
    if (k == "fibonacci") return IntegerSet::fibonacci();
    if (k == "powers") return IntegerSet::powers(arg(1), parts.size() > 2 ? arg(2) : 0);
    if (k == "bfile") return IntegerSet::bfile(parts.at(1));
    throw ParseError("unknown integer set shorthand '" + k + "'");
}

IntegerSet integer_set_from(const json& j) {
    if (j.is_string()) return integer_shorthand(split(j.get<std::string>(), ':'));
    const std::string k = field(j, "kind").get<std::string>();
    if (k == "all") return IntegerSet::all();
    if (k == "arithmetic") return IntegerSet::arithmetic(uint_field(j, "a"), uint_field(j, "d"));
    if (k == "explicit") return IntegerSet::explicit_values(field(j, "values").get<std::vector<std::uint64_t>>());
    if (k == "primes") return IntegerSet::primes();
    if (k == "bfile") return IntegerSet::bfile(field(j, "path").get<std::string>());
    if (k == "complement_window" || k == "complement") return IntegerSet::complement(integer_set_from(field(j, "set")));
    if (k == "recurrence") {
        const std::string rule = field(j, "rule").get<std::string>();
        if (rule == "powers") return IntegerSet::powers(uint_field(j, "base"), j.contains("start") ? uint_field(j, "start") : 0);
        if (rule == "squares") return IntegerSet::squares();
        if (rule == "fibonacci") return IntegerSet::fibonacci();
        throw ParseError("unknown recurrence rule '" + rule + "'");
    }
    return integer_shorthand(split(k, ':'));
}

ScalingFunction scaling_from(const json& j, ScalarMode forced) {
    if (j.is_string()) {
        auto parts = split(j.get<std::string>(), ':');
        json o = {{"kind", parts[0]}};
        if (parts[0] == "geometric" && parts.size() > 1) o["q"] = parts[1];
        if (parts[0] == "power" && parts.size() > 1) o["p"] = parts[1];
        return scaling_from(o, forced);
    }
    const std::string k = field(j, "kind").get<std::string>();
    const ScalarMode m = mode_of(j, forced);
    if (k == "geometric") return ScalingFunction::geometric(number(field(j, "q"), "q").in_mode(m));
    if (k == "power") {
        const Scalar p = number(field(j, "p"), "p");
        if (!p.is_exact()) throw ParseError("power exponent must be rational");
        return ScalingFunction::power(p.exact(), m);
    }
    if (k == "supergeometric") return ScalingFunction::supergeometric();
    if (k == "reciprocal_factorial" || k == "factorial") return ScalingFunction::reciprocal_factorial(m);
    if (k == "tabulated") {
        std::vector<Scalar> vals;
        for (const auto& v : field(j, "values")) vals.push_back(number(v, "values").in_mode(m));
        return ScalingFunction::tabulated(std::move(vals));
    }
    throw ParseError("unknown scaling function kind '" + k + "'");
}

SetHandle set_from(const json& j, const SpecOptions& opts) {
    if (j.is_string()) {
        auto parts = split(j.get<std::string>(), ':');
        json o = {{"kind", parts[0]}};
        const std::string& k = parts[0];
        if ((k == "geometric") && parts.size() > 1) o["q"] = parts[1];
        if (k == "power" && parts.size() > 1) o["p"] = parts[1];
        if (k == "dyadic_grid") {
            o["resolution"] = parts.size() > 1 ? parts[1] : "2";
            o["refine"] = parts.size() > 2 && parts[2] == "refine";
        }
        if (k == "perturbed_geometric" && parts.size() > 1) o["q"] = parts[1];
        return set_from(o, opts);
    }
    const std::string k = field(j, "kind").get<std::string>();
    const ScalarMode m = mode_of(j, opts.mode);
    SpecOptions child = opts;
    child.mode = m;
    SetHandle out = [&]() -> SetHandle {
        if (k == "geometric") return SetHandle::geometric(number(field(j, "q"), "q").in_mode(m));
        if (k == "power") {
            const Scalar p = number(field(j, "p"), "p");
            if (!p.is_exact()) throw ParseError("power exponent must be rational");
            return SetHandle::power(p.exact(), m);
        }
        if (k == "supergeometric") return SetHandle::supergeometric();
        if (k == "factorial") return SetHandle::factorial(m);
        if (k == "prime_reciprocal") return SetHandle::prime_reciprocal(m);
        if (k == "image") return SetHandle::image(scaling_from(field(j, "mu"), m), integer_set_from(field(j, "set")));
        if (k == "union") {
            std::vector<SetHandle> parts;
            for (const auto& s : field(j, "sets")) parts.push_back(set_from(s, child));
            return SetHandle::union_of(std::move(parts));
        }
        if (k == "explicit") {
            std::vector<Scalar> pts;
            for (const auto& v : field(j, "points")) pts.push_back(number(v, "points").in_mode(m));
            return SetHandle::explicit_points(std::move(pts));
        }
        if (k == "trivial" || k == "zero") return SetHandle::trivial(m);
        if (k == "dyadic_grid") {
            bool refine = j.contains("refine") && j.at("refine").get<bool>();
            return SetHandle::dyadic_grid(uint_field(j, "resolution"), refine, m);
        }
        if (k == "scaled") return SetHandle::scaled(number(field(j, "c"), "c").in_mode(m), set_from(field(j, "set"), child));
        if (k == "perturbed_geometric") {
            Scalar c = j.contains("c") ? number(j.at("c"), "c") : Scalar(1L);
            return SetHandle::perturbed_geometric(number(field(j, "q"), "q").in_mode(m), c.in_mode(m));
        }
        throw ParseError("unknown set kind '" + k + "'");
    }();
    out = out.in_mode(m == ScalarMode::log_domain ? m : out.mode());
    return out.with_budget(opts.budget);
}

json parse_json_or_shorthand(const std::string& text, const char* what) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && (text[i] == '{' || text[i] == '"' || text[i] == '[')) {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("malformed ") + what + " JSON: " + e.what());
        }
    }
    if (i == text.size()) throw ParseError(std::string("empty ") + what + " specification");
    return json(text.substr(i));
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid specification: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("invalid number in specification: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw ParseError(std::string("number out of range in specification: ") + e.what());
    }
}

}  // namespace

SetHandle parse_set(const std::string& text, const SpecOptions& opts) {
    return guarded([&] { return set_from(parse_json_or_shorthand(text, "set"), opts); });
}

ScalingFunction parse_scaling(const std::string& text, ScalarMode mode) {
    return guarded([&] { return scaling_from(parse_json_or_shorthand(text, "scaling function"), mode); });
}

IntegerSet parse_integer_set(const std::string& text) {
    return guarded([&] { return integer_set_from(parse_json_or_shorthand(text, "integer set")); });
}

std::string read_spec_text(const std::string& path_or_text) {
    std::error_code ec;
    if (!path_or_text.empty() && path_or_text.front() != '{' && std::filesystem::is_regular_file(path_or_text, ec)) {
        std::ifstream in(path_or_text);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    return path_or_text;
}

SetHandle load_set(const std::string& path_or_text, const SpecOptions& opts) {
    return parse_set(read_spec_text(path_or_text), opts);
}

}  // namespace porosity

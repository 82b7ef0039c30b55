#pragma once

// Strict plain-text configuration: "[section]" headers with "key = value"
// lines, keys validated against a closed schema. A typo in a model parameter
// must fail, not warn.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scalekernel/diffusion.hpp"
#include "scalekernel/errors.hpp"

namespace scalekernel::cli {

/// Fully resolved run configuration.
struct Config {
    model::Family family = model::Family::OrnsteinUhlenbeck;
    double mu0 = 0.0;
    double sigma0 = 1.0;
    double theta = 1.0;
    double nu = 1.0;
    double l = 0.5;

    double q = 0.5;
    double kappa = 1.5;
    double a = 1.0;

    double a_max = 50.0;

    double dt = 1e-4;
    double horizon = 40.0;
    long n_paths = 200000;
    std::uint64_t seed = 20080419;

    std::string output_path;

    /// Keys actually present in the file, dotted form.
    std::vector<std::pair<std::string, std::string>> raw_entries;

    model::DiffusionSpec make_spec() const {
        switch (family) {
            case model::Family::BrownianDrift:
                return model::DiffusionSpec::brownian(mu0, sigma0);
            case model::Family::OrnsteinUhlenbeck:
                return model::DiffusionSpec::ornstein_uhlenbeck(theta);
            case model::Family::ShiryaevLog:
                return model::DiffusionSpec::shiryaev_log(nu, l);
            case model::Family::Custom:
                break;
        }
        throw SchemaError("custom diffusions cannot be described in a config file");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_number(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double out;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw SchemaError("value of '" + key + "' is not a number: '" + value + "'");
    }
    if (pos != value.size())
        throw SchemaError("trailing characters after number in '" + key + "': '" + value +
                          "'");
    return out;
}

inline long parse_integer(const std::string& key, const std::string& value) {
    const double d = parse_number(key, value);
    const long n = static_cast<long>(d);
    if (static_cast<double>(n) != d)
        throw SchemaError("value of '" + key + "' must be an integer: '" + value + "'");
    return n;
}

inline model::Family parse_family(const std::string& value) {
    if (value == "brownian_drift") return model::Family::BrownianDrift;
    if (value == "ornstein_uhlenbeck") return model::Family::OrnsteinUhlenbeck;
    if (value == "shiryaev_log") return model::Family::ShiryaevLog;
    throw SchemaError("unknown model.family '" + value +
                      "' (expected brownian_drift | ornstein_uhlenbeck | shiryaev_log)");
}

}  // namespace detail

/// Parses and validates a config file. Unknown keys are errors.
inline Config parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'", 0, 0);

    Config cfg;
    std::map<std::string, std::string> entries;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']')
                throw ParseError("unterminated section header", lineno,
                                 static_cast<int>(line.find('[')) + 1);
            section = detail::trim(stripped.substr(1, stripped.size() - 2));
            if (section.empty()) throw ParseError("empty section name", lineno, 1);
            continue;
        }
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", lineno,
                             static_cast<int>(line.find(stripped)) + 1);
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno, 1);
        if (value.empty())
            throw ParseError("empty value for key '" + key + "'", lineno,
                             static_cast<int>(eq) + 2);
        const std::string dotted = section.empty() ? key : section + "." + key;
        if (entries.count(dotted))
            throw SchemaError("duplicate key '" + dotted + "'");
        entries[dotted] = value;
        cfg.raw_entries.emplace_back(dotted, value);
    }

    bool family_given = false;
    std::vector<std::string> param_keys;
    for (const auto& [key, value] : entries) {
        if (key == "model.family") {
            cfg.family = detail::parse_family(value);
            family_given = true;
        } else if (key == "model.params.mu0" || key == "model.params.sigma0" ||
                   key == "model.params.theta" || key == "model.params.nu" ||
                   key == "model.params.l") {
            param_keys.push_back(key);
        } else if (key == "problem.q") {
            cfg.q = detail::parse_number(key, value);
        } else if (key == "problem.kappa") {
            cfg.kappa = detail::parse_number(key, value);
        } else if (key == "problem.a") {
            cfg.a = detail::parse_number(key, value);
        } else if (key == "search.a_max") {
            cfg.a_max = detail::parse_number(key, value);
        } else if (key == "sim.dt") {
            cfg.dt = detail::parse_number(key, value);
        } else if (key == "sim.horizon") {
            cfg.horizon = detail::parse_number(key, value);
        } else if (key == "sim.n_paths") {
            cfg.n_paths = detail::parse_integer(key, value);
        } else if (key == "sim.seed") {
            cfg.seed = static_cast<std::uint64_t>(detail::parse_integer(key, value));
        } else if (key == "output.path") {
            cfg.output_path = value;
        } else {
            throw SchemaError("unknown key '" + key + "'");
        }
    }
    if (!family_given) throw SchemaError("missing required key 'model.family'");

    // family parameters: required set depends on the family
    auto want = [&](const char* key) -> std::optional<double> {
        const auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        return detail::parse_number(key, it->second);
    };
    auto reject_foreign = [&](std::initializer_list<const char*> allowed) {
        for (const auto& k : param_keys) {
            bool ok = false;
            for (const char* al : allowed)
                if (k == al) ok = true;
            if (!ok)
                throw SchemaError("key '" + k + "' does not belong to the chosen family");
        }
    };
    switch (cfg.family) {
        case model::Family::BrownianDrift:
            reject_foreign({"model.params.mu0", "model.params.sigma0"});
            if (auto v = want("model.params.mu0")) cfg.mu0 = *v;
            if (auto v = want("model.params.sigma0")) cfg.sigma0 = *v;
            if (!(cfg.sigma0 > 0.0)) throw SchemaError("sigma0 must be positive");
            break;
        case model::Family::OrnsteinUhlenbeck:
            reject_foreign({"model.params.theta"});
            if (auto v = want("model.params.theta")) cfg.theta = *v;
            if (!(cfg.theta > 0.0)) throw SchemaError("theta must be positive");
            break;
        case model::Family::ShiryaevLog:
            reject_foreign({"model.params.nu", "model.params.l"});
            if (auto v = want("model.params.nu")) cfg.nu = *v;
            if (auto v = want("model.params.l")) cfg.l = *v;
            if (!(cfg.nu > 0.0)) throw SchemaError("nu must be positive");
            if (!(cfg.l > 0.0)) throw SchemaError("l must be positive");
            break;
        case model::Family::Custom:
            break;
    }

    if (!(cfg.q > 0.0)) throw SchemaError("q must be positive");
    if (!(cfg.kappa > 1.0)) throw SchemaError("kappa must exceed 1");
    if (!(cfg.a > 0.0)) throw SchemaError("a must be positive");
    if (!(cfg.a_max > 0.0)) throw SchemaError("a_max must be positive");
    if (!(cfg.dt > 0.0)) throw SchemaError("dt must be positive");
    if (!(cfg.horizon > cfg.dt)) throw SchemaError("horizon must exceed dt");
    if (cfg.n_paths < 1) throw SchemaError("n_paths must be at least 1");
    return cfg;
}

/// Canonical serialization of the effective configuration (stable ordering,
/// 17 significant digits), used for the manifest digest.
inline std::string canonical_config(const Config& cfg) {
    std::ostringstream os;
    os.precision(17);
    const char* fam = cfg.family == model::Family::BrownianDrift ? "brownian_drift"
                      : cfg.family == model::Family::OrnsteinUhlenbeck
                          ? "ornstein_uhlenbeck"
                          : "shiryaev_log";
    os << "model.family=" << fam << '\n';
    switch (cfg.family) {
        case model::Family::BrownianDrift:
            os << "model.params.mu0=" << cfg.mu0 << '\n'
               << "model.params.sigma0=" << cfg.sigma0 << '\n';
            break;
        case model::Family::OrnsteinUhlenbeck:
            os << "model.params.theta=" << cfg.theta << '\n';
            break;
        case model::Family::ShiryaevLog:
            os << "model.params.nu=" << cfg.nu << '\n' << "model.params.l=" << cfg.l << '\n';
            break;
        case model::Family::Custom:
            break;
    }
    os << "problem.q=" << cfg.q << '\n'
       << "problem.kappa=" << cfg.kappa << '\n'
       << "problem.a=" << cfg.a << '\n'
       << "search.a_max=" << cfg.a_max << '\n'
       << "sim.dt=" << cfg.dt << '\n'
       << "sim.horizon=" << cfg.horizon << '\n'
       << "sim.n_paths=" << cfg.n_paths << '\n'
       << "sim.seed=" << cfg.seed << '\n'
       << "output.path=" << cfg.output_path << '\n';
    return os.str();
}

/// FNV-1a 64-bit digest, hex encoded.
inline std::string config_digest(const Config& cfg) {
    const std::string canon = canonical_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

}  // namespace scalekernel::cli

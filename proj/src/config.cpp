#include "sigma2/run.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace s2 {

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = {
        {"map", KeyType::string, "identity(1)", "map family specifier"},
        {"domain.deform", KeyType::string, "none",
         "domain metric deformation: none | radius_scale(c) | squash(R) | hopf_squash(k,l) | conformal(sigma)"},
        {"kappa", KeyType::real, "4", "coupling of the sigma_2 term in E_sigma1 + kappa E_sigma2"},
        {"quad.order_1d", KeyType::integer, "64", "Gauss order for one active axis (reduced rules)"},
        {"quad.order_3d", KeyType::integer, "32", "Gauss order per axis on 3-dimensional domains"},
        {"quad.order_radial", KeyType::integer, "128", "radial Gauss order on r3_spherical"},
        {"quad.order_4d", KeyType::integer, "12", "Gauss order per axis on 4-dimensional domains"},
        {"grid.n", KeyType::integer, "0", "sample points per axis for analyze/critical (0: built-in grid)"},
        {"tol.crit", KeyType::real, "-1", "criticality tolerance (< 0: 1e-6 analytic, 1e-4 finite differences)"},
        {"system", KeyType::string, "sig3",
         "residual system: fh | area2d | sig3 | contactsig3 | fourharm | harmonic | sigma2 | coupled | nomizu"},
        {"profile.k", KeyType::integer, "2", "alpha-join winding k"},
        {"profile.l", KeyType::integer, "1", "alpha-join winding l"},
        {"profile.n", KeyType::integer, "96", "number of P1 elements"},
        {"profile.max_iter", KeyType::integer, "50000", "iteration cap of the descent"},
        {"profile.init", KeyType::string, "auto", "initial profile specifier (auto: per-k default)"},
        {"profile.log_every", KeyType::integer, "10", "iteration log stride"},
        {"stability.fields", KeyType::string, "killing,conformal,random",
         "variation field families: killing, conformal, random, hopf-horizontal"},
        {"stability.n_random", KeyType::integer, "20", "number of random fields"},
        {"stability.band", KeyType::integer, "2", "frequency band of random fields"},
        {"stability.kappa", KeyType::real, "1", "kappa of the full Hessian"},
        {"stability.lambda", KeyType::real, "1", "dilation of the homothety"},
        {"stability.form", KeyType::string, "full", "form used for the verdict: sigma2 | full | dirichlet"},
        {"threshold.lambda_min", KeyType::real, "0.2", "lower end of the lambda scan"},
        {"threshold.lambda_max", KeyType::real, "2", "upper end of the lambda scan"},
        {"threshold.n_grid", KeyType::integer, "91", "lambda grid size before bisection"},
        {"seed", KeyType::u64, "1", "base seed for random fields and conformal factors"},
        {"case", KeyType::string, "all", "reproduce case name, comma list, or all"},
        {"out", KeyType::string, "out", "output directory (--out overrides)"},
    };
    return keys;
}

namespace {

const ConfigKey* find_key(const std::string& k) {
    for (const auto& c : config_keys())
        if (c.key == k) return &c;
    return nullptr;
}

std::string check_value(const ConfigKey& k, const std::string& v) {
    if (v.empty()) return "empty value";
    auto whole = [&](auto& out) {
        auto r = std::from_chars(v.data(), v.data() + v.size(), out);
        return r.ec == std::errc() && r.ptr == v.data() + v.size();
    };
    switch (k.type) {
        case KeyType::integer: {
            long x;
            if (!whole(x)) return "expected an integer, got '" + v + "'";
            break;
        }
        case KeyType::u64: {
            std::uint64_t x;
            if (!whole(x)) return "expected an unsigned 64-bit integer, got '" + v + "'";
            break;
        }
        case KeyType::real: {
            try {
                parse_number(v);
            } catch (const Error&) {
                return "expected a number, got '" + v + "'";
            }
            break;
        }
        case KeyType::string:
            break;
    }
    return {};
}

}  // namespace

RunConfig default_config() {
    RunConfig c;
    for (const auto& k : config_keys()) c.values.emplace_back(k.key, k.dflt);
    return c;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const ConfigKey* k = find_key(key);
    if (!k) fail(Errc::config, "unknown key '" + key + "'");
    std::string err = check_value(*k, value);
    if (!err.empty()) fail(Errc::config, "key '" + key + "': " + err);
    for (auto& kv : values)
        if (kv.first == key) kv.second = value;
    if (std::find(given.begin(), given.end(), key) == given.end()) given.push_back(key);
}

std::string RunConfig::str(const std::string& key) const {
    for (const auto& kv : values)
        if (kv.first == key) return kv.second;
    fail(Errc::internal, "config key '" + key + "' not in table");
}

double RunConfig::real(const std::string& key) const { return parse_number(str(key)); }

long RunConfig::integer(const std::string& key) const {
    std::string v = str(key);
    long x = 0;
    std::from_chars(v.data(), v.data() + v.size(), x);
    return x;
}

std::uint64_t RunConfig::u64(const std::string& key) const {
    std::string v = str(key);
    std::uint64_t x = 0;
    std::from_chars(v.data(), v.data() + v.size(), x);
    return x;
}

std::string RunConfig::echo() const {
    std::string out;
    for (const auto& [k, v] : values) out += k + " = " + v + "\n";
    return out;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig c = default_config();
    std::istringstream in(text);
    std::string line;
    int no = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string t = trim(line);
        if (t.empty()) continue;
        auto where = origin + ":" + std::to_string(no) + ": ";
        auto eq = t.find('=');
        if (eq == std::string::npos) fail(Errc::config, where + "expected 'key = value'");
        std::string key = trim(t.substr(0, eq)), value = trim(t.substr(eq + 1));
        if (key.empty()) fail(Errc::config, where + "missing key");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            fail(Errc::config, where + "duplicate key '" + key + "'");
        seen.push_back(key);
        try {
            c.set(key, value);
        } catch (const Error& e) {
            fail(Errc::config, where + e.what());
        }
    }
    return c;
}

}  // namespace s2

// Acceptance run: one line per criterion, nonzero exit if any fails.
#include "sigma2/run.hpp"

#include <chrono>
#include <cstdio>
#include <map>

using namespace s2;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::map<std::string, CaseResult> cache;

const CaseResult& run(const std::string& name) {
    auto it = cache.find(name);
    if (it != cache.end()) return it->second;
    return cache.emplace(name, reproduce_case(name, default_config())).first->second;
}

std::string short_num(double v) {
    char b[48];
    std::snprintf(b, sizeof b, "%.10g", v);
    return b;
}

Outcome from_cases(const std::vector<std::string>& names, const std::vector<std::string>& show) {
    Outcome o;
    for (const auto& n : names) {
        const CaseResult& c = run(n);
        for (const auto& ch : c.checks) {
            if (!ch.pass) {
                o.pass = false;
                o.detail += " [failed " + n + ": " + ch.name + " = " + short_num(ch.value) + "]";
            }
            for (const auto& s : show)
                if (ch.name == s) o.detail += " " + s + " = " + short_num(ch.value) + ";";
        }
    }
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::vector<std::string> cases;
        std::vector<std::string> show;
    };
    const std::vector<Criterion> criteria = {
        {1, "identity calibration", {"identity-ratio"}, {"s3_join ratio", "s3_join R*"}},
        {2, "alpha-join ratio", {"alpha-join-ratio"}, {"ratio per unit degree"}},
        {3, "profile minimisation", {"profile-minimizer-k2"}, {"ratio after radius minimisation"}},
        {4, "Faddeev minimizers", {"faddeev-minimizer-k2", "faddeev-minimizer-k4"}, {"Q = k^2/4"}},
        {5,
         "criticality suite",
         {"hopf-critical", "henon-critical", "nomizu-k1", "criticality-suite"},
         {"nomizu(s,1) sup residual"}},
        {6, "stability threshold", {"threshold-kappa1"}, {"lambda* (kappa = 1)"}},
        {7, "Yano identity", {"yano-identity"}, {"worst relative Yano residual"}},
        {8, "Newton inequalities", {"newton-inequality"}, {"conformal-gradient fields: equality"}},
        {9, "degree and Hopf table", {"degree-table"}, {}},
        {10, "conformal invariance", {"conformal-invariance-m4"}, {}},
    };
    int failed = 0;
    std::map<int, bool> status;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = from_cases(c.cases, c.show);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string(" exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        status[c.id] = o.pass;
        if (!o.pass) ++failed;
        std::printf("criterion %d (%s): %s%s (%.1f s)\n", c.id, c.title, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    // 11 is a scope statement: full 3D rational-map and hopfion relaxations are not attempted;
    // its stand-ins are the descent check (3) and the residual suite (5).
    bool stand_ins = status[3] && status[5];
    if (!stand_ins) ++failed;
    std::printf("criterion 11 (out-of-scope relaxations): %s full 3D rational-map and hopfion relaxation not attempted; "
                "stand-ins 3 and 5 %s\n",
                stand_ins ? "PASS" : "FAIL", stand_ins ? "pass" : "do not pass");
    std::printf("%d of 11 criteria failed\n", failed);
    return failed ? 1 : 0;
}

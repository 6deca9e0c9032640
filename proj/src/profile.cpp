#include "sigma2/profile.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <cmath>
#include <fstream>
#include <sstream>

namespace s2 {

struct Profile::Grid {
    std::vector<double> s, v;
    gsl_interp* interp = nullptr;
    ~Grid() {
        if (interp) gsl_interp_free(interp);
    }
    double clamp(double x) const { return std::min(std::max(x, s.front()), s.back()); }
};

Profile Profile::closed(std::string name, std::function<double(double)> f, std::function<double(double)> d1,
                        std::function<double(double)> d2) {
    Profile p;
    p.name_ = std::move(name);
    p.f_ = std::move(f);
    p.d1_ = std::move(d1);
    p.d2_ = std::move(d2);
    return p;
}

Profile Profile::from_grid(std::vector<double> s, std::vector<double> v, std::string name) {
    if (s.size() != v.size() || s.size() < 3) fail(Errc::invalid_argument, "profile grid needs at least 3 points");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1])) fail(Errc::invalid_argument, "profile grid abscissae must increase strictly");
    gsl_set_error_handler_off();
    auto g = std::make_shared<Grid>();
    g->s = std::move(s);
    g->v = std::move(v);
    g->interp = gsl_interp_alloc(gsl_interp_cspline, g->s.size());
    if (!g->interp || gsl_interp_init(g->interp, g->s.data(), g->v.data(), g->s.size()) != GSL_SUCCESS)
        fail(Errc::numerical, "cubic spline setup failed");
    std::shared_ptr<const Grid> cg = g;
    Profile p;
    p.name_ = std::move(name);
    p.grid_ = cg;
    // no accelerator: evaluation stays reentrant
    p.f_ = [cg](double x) { return gsl_interp_eval(cg->interp, cg->s.data(), cg->v.data(), cg->clamp(x), nullptr); };
    p.d1_ = [cg](double x) {
        return gsl_interp_eval_deriv(cg->interp, cg->s.data(), cg->v.data(), cg->clamp(x), nullptr);
    };
    p.d2_ = [cg](double x) {
        return gsl_interp_eval_deriv2(cg->interp, cg->s.data(), cg->v.data(), cg->clamp(x), nullptr);
    };
    return p;
}

std::vector<double> Profile::knots() const { return grid_ ? grid_->s : std::vector<double>{}; }
std::vector<double> Profile::values() const { return grid_ ? grid_->v : std::vector<double>{}; }

Profile Profile::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io, "cannot open profile file '" + path + "'");
    std::vector<double> s, v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto cols = split_top_level(t, ',');
        if (cols.size() != 2) fail(Errc::io, path + ":" + std::to_string(lineno) + ": expected two columns");
        try {
            double a = parse_number(cols[0]), b = parse_number(cols[1]);
            s.push_back(a);
            v.push_back(b);
        } catch (const Error&) {
            if (s.empty()) continue;  // header row
            fail(Errc::io, path + ":" + std::to_string(lineno) + ": not numeric");
        }
    }
    return from_grid(std::move(s), std::move(v), "csv:" + path);
}

Profile Profile::parse(std::string_view text) {
    std::string t = trim(text);
    if (t.rfind("csv:", 0) == 0) return from_csv(t.substr(4));
    Spec sp = parse_spec(t);
    const std::string& n = sp.name;
    if (n == "s" || n == "identity")
        return closed("s", [](double s) { return s; }, [](double) { return 1.0; }, [](double) { return 0.0; });
    if (n == "zero")
        return closed("zero", [](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; });
    if (n == "2s")
        return closed("2s", [](double s) { return 2 * s; }, [](double) { return 2.0; }, [](double) { return 0.0; });
    if (n == "pi2_minus_2s")
        return closed("pi2_minus_2s", [](double s) { return pi / 2 - 2 * s; }, [](double) { return -2.0; },
                      [](double) { return 0.0; });
    if (n == "pi2_plus_2s")
        return closed("pi2_plus_2s", [](double s) { return pi / 2 + 2 * s; }, [](double) { return 2.0; },
                      [](double) { return 0.0; });
    if (n == "arccos_cos2")
        return closed(
            "arccos_cos2", [](double s) { return std::acos(std::cos(s) * std::cos(s)); },
            [](double s) {
                double c = std::cos(s);
                return 2 * c / std::sqrt(1 + c * c);
            },
            [](double s) {
                double c = std::cos(s);
                return -2 * std::sin(s) * std::pow(1 + c * c, -1.5);
            });
    if (n == "linear") {
        double a = sp.num("a", 0, 0.0), b = sp.num("b", 1, 1.0);
        return closed(t, [a, b](double s) { return a + b * s; }, [b](double) { return b; }, [](double) { return 0.0; });
    }
    if (n == "const") {
        double c = sp.num_required("c", 0);
        return closed(t, [c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; });
    }
    if (n == "sin_series" || n == "cos_series") {
        std::vector<double> c;
        for (auto& p : sp.positional) c.push_back(parse_number(p));
        bool is_sin = n == "sin_series";
        auto f = [c, is_sin](double s) {
            double r = 0;
            for (std::size_t j = 0; j < c.size(); ++j) r += c[j] * (is_sin ? std::sin((j + 1) * s) : std::cos((j + 1) * s));
            return r;
        };
        auto d1 = [c, is_sin](double s) {
            double r = 0;
            for (std::size_t j = 0; j < c.size(); ++j) {
                double w = j + 1.0;
                r += c[j] * w * (is_sin ? std::cos(w * s) : -std::sin(w * s));
            }
            return r;
        };
        auto d2 = [c, is_sin](double s) {
            double r = 0;
            for (std::size_t j = 0; j < c.size(); ++j) {
                double w = j + 1.0;
                r -= c[j] * w * w * (is_sin ? std::sin(w * s) : std::cos(w * s));
            }
            return r;
        };
        return closed(t, f, d1, d2);
    }
    if (n == "one_plus_sin") {  // 1 + a sin(p s)
        double a = sp.num("a", 0, 0.1), p = sp.num("p", 1, 1.0);
        return closed(t, [a, p](double s) { return 1 + a * std::sin(p * s); },
                      [a, p](double s) { return a * p * std::cos(p * s); },
                      [a, p](double s) { return -a * p * p * std::sin(p * s); });
    }
    if (n == "skyrme_atan") {  // 4 atan(exp(-c r))
        double c = sp.num("c", 0, 1.0);
        return closed(
            t, [c](double r) { return 4 * std::atan(std::exp(-c * r)); },
            [c](double r) { return -2 * c / std::cosh(c * r); },
            [c](double r) { return 2 * c * c * std::tanh(c * r) / std::cosh(c * r); });
    }
    fail(Errc::invalid_argument, "unknown profile '" + t + "'");
}

void require_boundary(const Profile& p, double a, double va, double b, double vb, const std::string& who, double tol) {
    double ea = std::abs(p(a) - va), eb = std::abs(p(b) - vb);
    if (!(ea <= tol) || !(eb <= tol)) {
        std::ostringstream os;
        os << who << ": profile '" << p.name() << "' violates the boundary conditions (" << p(a) << " at " << a << ", "
           << p(b) << " at " << b << ")";
        fail(Errc::invalid_argument, os.str());
    }
}

}  // namespace s2

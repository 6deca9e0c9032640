#include "sigma2/maps.hpp"

#include "sigma2/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace s2 {

namespace {

Vec vec(std::initializer_list<double> v) {
    Vec r(static_cast<int>(v.size()));
    int i = 0;
    for (double a : v) r[i++] = a;
    return r;
}

Mat zeros(int r, int c) { return Mat::Zero(r, c); }

int as_int(double v, const std::string& who, const std::string& key) {
    if (v != std::round(v)) fail(Errc::invalid_argument, who + ": " + key + " must be an integer");
    return static_cast<int>(v);
}

void require_nonzero(int v, const std::string& who, const std::string& key) {
    if (v == 0) fail(Errc::invalid_argument, who + ": " + key + " must be a nonzero integer");
}

std::shared_ptr<MapFamily> base(const Spec& sp, ChartPtr dom, ChartPtr cod) {
    auto m = std::make_shared<MapFamily>();
    m->name = sp.name;
    m->spec = sp.text;
    m->domain = std::move(dom);
    m->codomain = std::move(cod);
    return m;
}

void self_test_or_throw(const MapFamily& m) {
    if (!m.analytic()) return;
    SelfTest t = jacobian_self_test(m);
    if (!(t.max_rel_error <= 1e-6)) {
        std::ostringstream os;
        os << m.spec << ": analytic Jacobian disagrees with finite differences (rel " << t.max_rel_error << ")";
        fail(Errc::internal, os.str());
    }
}

Profile profile_arg(const Spec& sp, const std::string& key, int pos, const std::string& dflt) {
    return Profile::parse(sp.str(key, pos, dflt));
}

}  // namespace

MapPtr make_alpha_join(const Profile& a, int k, int l, double R, const std::string& spec) {
    const std::string n = "alpha_join";
    require_nonzero(k, n, "k");
    require_nonzero(l, n, "l");
    require_boundary(a, 0, 0, pi / 2, pi / 2, n);
    std::ostringstream r;
    r.precision(17);
    r << "s3_join(" << R << ")";
    auto m = std::make_shared<MapFamily>();
    m->name = n;
    m->spec = spec.empty() ? n + "(" + a.name() + "," + std::to_string(k) + "," + std::to_string(l) + ")" : spec;
    m->domain = make_chart(r.str());
    m->codomain = make_chart("s3_join(1)");
    double kk = k, ll = l;
    m->eval = [a, kk, ll](const Vec& x) { return vec({kk * x[0], ll * x[1], a(x[2])}); };
    m->jac = [a, kk, ll](const Vec& x) {
        Mat J = zeros(3, 3);
        J(0, 0) = kk;
        J(1, 1) = ll;
        J(2, 2) = a.d1(x[2]);
        return J;
    };
    m->passive_axes = {0, 1};
    m->params = {{"k", kk}, {"l", ll}, {"R", R}};
    self_test_or_throw(*m);
    return m;
}

MapPtr make_map(std::string_view text) { return make_map(parse_spec(text)); }

MapPtr make_map(const Spec& sp) {
    const std::string& n = sp.name;
    std::shared_ptr<MapFamily> m;

    if (n == "identity") {
        sp.check_keys({"lambda", "chart"});
        double lam = sp.num("lambda", 0, 1.0);
        if (!(lam > 0)) fail(Errc::invalid_argument, "identity: lambda must be positive");
        std::string fam = sp.str("chart", 1, "s3_join");
        if (fam != "s3_join" && fam != "s3_suspension" && fam != "s3_unit_tangent")
            fail(Errc::invalid_argument, "identity: chart must be an S^3 chart");
        std::ostringstream r;
        r.precision(17);
        r << fam << "(" << 1.0 / lam << ")";
        m = base(sp, make_chart(r.str()), make_chart(fam + "(1)"));
        m->eval = [](const Vec& x) { return x; };
        m->jac = [](const Vec& x) { return Mat(Mat::Identity(x.size(), x.size())); };
        m->passive_axes = fam == "s3_join" ? std::vector<int>{0, 1}
                          : fam == "s3_suspension" ? std::vector<int>{2}
                                                   : std::vector<int>{0, 2};
        m->params = {{"lambda", lam}};
    } else if (n == "alpha_join") {
        sp.check_keys({"alpha", "k", "l", "R"});
        Profile a = profile_arg(sp, "alpha", 0, "s");
        int k = as_int(sp.num("k", 1, 1), n, "k"), l = as_int(sp.num("l", 2, 1), n, "l");
        return make_alpha_join(a, k, l, sp.num("R", 3, 1.0), sp.text);
    } else if (n == "nomizu") {
        sp.check_keys({"alpha", "k"});
        Profile a = profile_arg(sp, "alpha", 0, "s");
        int k = as_int(sp.num("k", 1, 1), n, "k");
        if (k % 2 == 0) fail(Errc::invalid_argument, "nomizu: k must be odd");
        require_boundary(a, 0, 0, pi / 4, pi / 4, n);
        m = base(sp, make_chart("s3_unit_tangent(1)"), make_chart("s3_unit_tangent(1)"));
        double kk = k;
        m->eval = [a, kk](const Vec& x) { return vec({kk * x[0], a(x[1]), x[2]}); };
        m->jac = [a, kk](const Vec& x) {
            Mat J = zeros(3, 3);
            J(0, 0) = kk;
            J(1, 1) = a.d1(x[1]);
            J(2, 2) = 1;
            return J;
        };
        m->passive_axes = {0, 2};
        m->params = {{"k", kk}};
    } else if (n == "gamma_hopf") {
        sp.check_keys({"gamma", "k"});
        Profile g = profile_arg(sp, "gamma", 0, "pi2_minus_2s");
        int k = as_int(sp.num("k", 1, 2), n, "k");
        require_nonzero(k, n, "k");
        if (k % 2 != 0) fail(Errc::invalid_argument, "gamma_hopf: k must be even");
        m = base(sp, make_chart("s3_unit_tangent(1)"), make_chart("s2"));
        double kk = k;
        m->eval = [g, kk](const Vec& x) { return vec({g(x[1]), kk * x[2]}); };
        m->jac = [g, kk](const Vec& x) {
            Mat J = zeros(2, 3);
            J(0, 1) = g.d1(x[1]);
            J(1, 2) = kk;
            return J;
        };
        m->passive_axes = {0, 2};
        m->params = {{"k", kk}};
        // A = (k/2)(eps dtheta + cos(gamma) dmu), regular when gamma(pi/4) is 0 or pi
        double end = g(pi / 4);
        if (std::abs(end) < 1e-10 || std::abs(end - pi) < 1e-10) {
            double eps = std::cos(end);
            m->hopf_potential = [g, kk, eps](const Vec& x) {
                return vec({0.5 * kk * eps, 0.0, 0.5 * kk * std::cos(g(x[1]))});
            };
        }
    } else if (n == "alpha_hopf") {
        sp.check_keys({"alpha", "k", "l"});
        Profile a = profile_arg(sp, "alpha", 0, "2s");
        int k = as_int(sp.num("k", 1, 1), n, "k"), l = as_int(sp.num("l", 2, 1), n, "l");
        require_nonzero(k, n, "k");
        require_nonzero(l, n, "l");
        require_boundary(a, 0, 0, pi / 2, pi, n);
        m = base(sp, make_chart("s3_join(1)"), make_chart("s2"));
        double kk = k, ll = l;
        m->eval = [a, kk, ll](const Vec& x) { return vec({a(x[2]), kk * x[0] + ll * x[1]}); };
        m->jac = [a, kk, ll](const Vec& x) {
            Mat J = zeros(2, 3);
            J(0, 2) = a.d1(x[2]);
            J(1, 0) = kk;
            J(1, 1) = ll;
            return J;
        };
        m->passive_axes = {0, 1};
        m->params = {{"k", kk}, {"l", ll}};
        m->hopf_potential = [a, kk, ll](const Vec& x) {
            double c = std::cos(a(x[2]));
            return vec({0.5 * kk * (c + 1), 0.5 * ll * (c - 1), 0.0});
        };
    } else if (n == "hedgehog") {
        sp.check_keys({"f", "r_max"});
        Profile f = profile_arg(sp, "f", 0, "skyrme_atan");
        double rmax = sp.num("r_max", 1, 20.0);
        if (std::abs(f(0) - pi) > 1e-10) fail(Errc::invalid_argument, "hedgehog: profile must satisfy f(0) = pi");
        if (!(std::abs(f(rmax)) < 1e-3))
            fail(Errc::invalid_argument, "hedgehog: profile must satisfy |f(r_max)| < 1e-3");
        std::ostringstream r;
        r.precision(17);
        r << "r3_spherical(" << rmax << ")";
        m = base(sp, make_chart(r.str()), make_chart("s3_suspension(1)"));
        m->eval = [f](const Vec& x) { return vec({f(x[0]), x[1], x[2]}); };
        m->jac = [f](const Vec& x) {
            Mat J = Mat::Identity(3, 3);
            J(0, 0) = f.d1(x[0]);
            return J;
        };
        m->passive_axes = {1, 2};
        m->params = {{"r_max", rmax}};
    } else if (n == "suspension") {
        sp.check_keys({"f", "k"});
        Profile f = profile_arg(sp, "f", 0, "s");
        int k = as_int(sp.num("k", 1, 1), n, "k");
        require_nonzero(k, n, "k");
        require_boundary(f, 0, 0, pi, pi, n);
        m = base(sp, make_chart("s3_suspension(1)"), make_chart("s3_suspension(1)"));
        double kk = k;
        m->eval = [f, kk](const Vec& x) { return vec({f(x[0]), x[1], kk * x[2]}); };
        m->jac = [f, kk](const Vec& x) {
            Mat J = Mat::Identity(3, 3);
            J(0, 0) = f.d1(x[0]);
            J(2, 2) = kk;
            return J;
        };
        m->passive_axes = {1, 2};
        m->params = {{"k", kk}};
    } else if (n == "henon") {
        sp.check_keys({"a", "b"});
        double a = sp.num("a", 0, 1.4), b = sp.num("b", 1, 0.3);
        if (b == 0) fail(Errc::invalid_argument, "henon: b must be nonzero");
        m = base(sp, make_chart("r2_flat"), make_chart("r2_flat(half=4)"));
        m->eval = [a, b](const Vec& x) { return vec({x[1] + 1 - a * x[0] * x[0], b * x[0]}); };
        m->jac = [a, b](const Vec& x) {
            Mat J(2, 2);
            J << -2 * a * x[0], 1, b, 0;
            return J;
        };
        m->params = {{"a", a}, {"b", b}};
    } else if (n == "heis_dilation") {
        sp.check_keys({"a"});
        double a = sp.num("a", 0, 2.0);
        if (!(a > 0)) fail(Errc::invalid_argument, "heis_dilation: a must be positive");
        m = base(sp, make_chart("heisenberg"), make_chart("heisenberg"));
        m->eval = [a](const Vec& x) { return vec({a * x[0], a * x[1], a * a * x[2]}); };
        m->jac = [a](const Vec&) {
            Mat J = zeros(3, 3);
            J(0, 0) = a;
            J(1, 1) = a;
            J(2, 2) = a * a;
            return J;
        };
        m->params = {{"a", a}};
    } else if (n == "heis_shift") {
        sp.check_keys({"f", "a"});
        Profile f = profile_arg(sp, "f", 0, "sin_series(0.3)");
        double a = sp.num("a", 1, 1.0);
        if (!(a > 0)) fail(Errc::invalid_argument, "heis_shift: a must be positive");
        m = base(sp, make_chart("heisenberg"), make_chart("heisenberg"));
        m->eval = [f, a](const Vec& x) { return vec({x[0], a * x[1] + f.d1(x[0]), a * x[2] + f(x[0])}); };
        m->jac = [f, a](const Vec& x) {
            Mat J = zeros(3, 3);
            J(0, 0) = 1;
            J(1, 0) = f.d2(x[0]);
            J(1, 1) = a;
            J(2, 0) = f.d1(x[0]);
            J(2, 2) = a;
            return J;
        };
        m->params = {{"a", a}};
    } else if (n == "torus_contacto") {
        sp.check_keys({"f", "a"});
        Profile f = profile_arg(sp, "f", 0, "zero");
        double a = sp.num("a", 1, 1.0);
        if (a == 0) fail(Errc::invalid_argument, "torus_contacto: a must be nonzero");
        for (double z : {0.3, 1.1, 2.9})
            if (std::abs(f(z) - f(z + 2 * pi)) > 1e-10) fail(Errc::invalid_argument, "torus_contacto: f must be 2pi-periodic");
        if (std::abs(f.d1(pi / 2)) > 1e-10 || std::abs(f.d1(3 * pi / 2)) > 1e-10)
            fail(Errc::invalid_argument, "torus_contacto: f' must vanish where tan z has poles");
        m = base(sp, make_chart("t3_flat"), make_chart("t3_flat"));
        auto F = [f](double z) {
            auto g = [f](double s) { return std::tan(s) * f.d1(s); };
            return integrate_gl(g, 0.0, z, 48);
        };
        m->eval = [f, a, F](const Vec& x) { return vec({a * x[0] - F(x[2]), a * x[1] + f(x[2]), x[2]}); };
        m->jac = [f, a](const Vec& x) {
            Mat J = zeros(3, 3);
            J(0, 0) = a;
            J(0, 2) = -std::tan(x[2]) * f.d1(x[2]);
            J(1, 1) = a;
            J(1, 2) = f.d1(x[2]);
            J(2, 2) = 1;
            return J;
        };
        m->passive_axes = {0, 1};
        m->params = {{"a", a}};
    } else if (n == "sphere_contacto") {
        sp.check_keys({"A", "k"});
        Profile A = profile_arg(sp, "A", 0, "const(1)");
        int k = as_int(sp.num("k", 1, 1), n, "k");
        require_nonzero(k, n, "k");
        for (int i = 0; i <= 256; ++i) {
            double mu = 2 * pi * i / 256.0;
            if (!(std::abs(k * A(mu)) <= 1.0) || A(mu) == 0)
                fail(Errc::invalid_argument, "sphere_contacto: need 0 < |k A(mu)| <= 1 so that |k A sin 2s| < 1 on the chart");
        }
        m = base(sp, make_chart("s3_unit_tangent(1)"), make_chart("s3_unit_tangent(1)"));
        double kk = k;
        auto beta = [A](double mu) { return integrate_gl([A](double t) { return 1.0 / A(t); }, 0.0, mu, 48); };
        m->eval = [A, kk, beta](const Vec& x) {
            double u = kk * A(x[2]) * std::sin(2 * x[1]);
            return vec({kk * x[0], 0.5 * std::asin(u), beta(x[2])});
        };
        m->jac = [A, kk](const Vec& x) {
            double s = x[1], mu = x[2];
            double u = kk * A(mu) * std::sin(2 * s);
            double q = std::sqrt(1 - u * u);
            Mat J = zeros(3, 3);
            J(0, 0) = kk;
            J(1, 1) = kk * A(mu) * std::cos(2 * s) / q;
            J(1, 2) = 0.5 * kk * A.d1(mu) * std::sin(2 * s) / q;
            J(2, 2) = 1.0 / A(mu);
            return J;
        };
        m->params = {{"k", kk}};
    } else if (n == "degree_k_sphere_map") {
        sp.check_keys({"k"});
        int k = as_int(sp.num("k", 0, 2), n, "k");
        require_nonzero(k, n, "k");
        m = base(sp, make_chart("s2"), make_chart("s2"));
        double kk = k;
        m->eval = [kk](const Vec& x) { return vec({x[0], kk * x[1]}); };
        m->jac = [kk](const Vec&) {
            Mat J = Mat::Identity(2, 2);
            J(1, 1) = kk;
            return J;
        };
        m->passive_axes = {1};
        m->params = {{"k", kk}};
    } else if (n == "t4_shear_projection") {
        sp.check_keys({"a", "b"});
        double a = sp.num("a", 0, 0.5), b = sp.num("b", 1, 1.0);
        m = base(sp, make_chart("t4_flat"), make_chart("t2_flat"));
        m->eval = [a, b](const Vec& x) { return vec({2 * x[0] + a * std::sin(x[2]), x[1] + b * std::sin(x[3])}); };
        m->jac = [a, b](const Vec& x) {
            Mat J = zeros(2, 4);
            J(0, 0) = 2;
            J(0, 2) = a * std::cos(x[2]);
            J(1, 1) = 1;
            J(1, 3) = b * std::cos(x[3]);
            return J;
        };
        m->params = {{"a", a}, {"b", b}};
    } else if (n == "constant") {
        sp.check_keys({"target"});
        std::string target = sp.str("target", 0, "s3");
        if (target == "s3") {
            m = base(sp, make_chart("s3_join(1)"), make_chart("s3_join(1)"));
            m->eval = [](const Vec&) { return vec({0.5, 0.5, pi / 4}); };
            m->jac = [](const Vec&) { return zeros(3, 3); };
        } else if (target == "s2") {
            m = base(sp, make_chart("s3_join(1)"), make_chart("s2"));
            m->eval = [](const Vec&) { return vec({pi / 2, 0.5}); };
            m->jac = [](const Vec&) { return zeros(2, 3); };
            m->hopf_potential = [](const Vec&) { return Vec(Vec::Zero(3)); };
        } else {
            fail(Errc::invalid_argument, "constant: target must be s3 or s2");
        }
        m->passive_axes = {0, 1};
    } else {
        fail(Errc::invalid_argument, "unknown map family '" + n + "'");
    }
    self_test_or_throw(*m);
    return m;
}

MapPtr make_custom_map(std::string name, ChartPtr domain, ChartPtr codomain, VectorFn eval, MatrixFn jac,
                       std::vector<int> passive_axes) {
    auto m = std::make_shared<MapFamily>();
    m->name = name;
    m->spec = name;
    m->domain = std::move(domain);
    m->codomain = std::move(codomain);
    m->eval = std::move(eval);
    m->jac = std::move(jac);
    m->passive_axes = std::move(passive_axes);
    self_test_or_throw(*m);
    return m;
}

MapPtr make_suspension_map(const Profile& f, std::function<double(double, double)> q,
                           std::function<double(double, double)> r,
                           std::function<Eigen::Vector2d(double, double)> dq,
                           std::function<Eigen::Vector2d(double, double)> dr) {
    require_boundary(f, 0, 0, pi, pi, "suspension");
    auto eval = [f, q, r](const Vec& x) { return vec({f(x[0]), q(x[1], x[2]), r(x[1], x[2])}); };
    auto jac = [f, dq, dr](const Vec& x) {
        Mat J = zeros(3, 3);
        J(0, 0) = f.d1(x[0]);
        Eigen::Vector2d a = dq(x[1], x[2]), b = dr(x[1], x[2]);
        J(1, 1) = a[0];
        J(1, 2) = a[1];
        J(2, 1) = b[0];
        J(2, 2) = b[1];
        return J;
    };
    return make_custom_map("suspension(custom)", make_chart("s3_suspension(1)"), make_chart("s3_suspension(1)"), eval,
                           jac);
}

MapPtr with_domain(const MapPtr& map, ChartPtr domain) {
    if (domain->dim != map->domain->dim) fail(Errc::invalid_argument, "with_domain: dimension mismatch");
    auto m = std::make_shared<MapFamily>(*map);
    m->domain = std::move(domain);
    m->spec = map->spec + " on " + m->domain->name;
    return m;
}

MapPtr with_codomain(const MapPtr& map, ChartPtr codomain) {
    if (codomain->dim != map->codomain->dim) fail(Errc::invalid_argument, "with_codomain: dimension mismatch");
    auto m = std::make_shared<MapFamily>(*map);
    m->codomain = std::move(codomain);
    return m;
}

MapPtr finite_difference_version(const MapPtr& map) {
    auto m = std::make_shared<MapFamily>(*map);
    m->jac = nullptr;
    return m;
}

Mat fd_jacobian(const MapFamily& map, const Vec& x) {
    const int d = map.domain->dim;
    const int n = map.codomain->dim;
    const double h = fd_step;
    Mat J(n, d);
    for (int b = 0; b < d; ++b) {
        Vec xp = x, xm = x;
        xp[b] += h;
        xm[b] -= h;
        J.col(b) = (map.eval(xp) - map.eval(xm)) / (2 * h);
    }
    return J;
}

Mat jacobian(const MapFamily& map, const Vec& x) {
    if (map.analytic()) return map.jac(x);
    Vec y = map.eval(x);
    if (distance_to_singular(*map.codomain, y) <= fd_step)
        fail(Errc::domain, "jacobian: image lands within the finite-difference step of the codomain singular locus");
    return fd_jacobian(map, x);
}

SelfTest jacobian_self_test(const MapFamily& map, int n, std::uint64_t seed) {
    SelfTest t;
    if (!map.analytic()) return t;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n; ++i) {
        Vec x = random_point(*map.domain, rng, 0.05);
        Mat Ja = map.jac(x);
        Mat Jf = fd_jacobian(map, x);
        double scale = std::max(1.0, Ja.cwiseAbs().maxCoeff());
        double err = (Ja - Jf).cwiseAbs().maxCoeff() / scale;
        if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
        if (err > t.max_rel_error || t.points == 0) {
            t.max_rel_error = std::max(t.max_rel_error, err);
            t.worst_point = x;
        }
        ++t.points;
    }
    return t;
}

Vec pullback_oneform(const MapFamily& map, const VectorFn& omega, const Vec& x) {
    Mat J = jacobian(map, x);
    Vec w = omega(map.eval(x));
    return J.transpose() * w;
}

Mat pullback_area_form(const MapFamily& map, const Vec& x) {
    if (map.codomain->family != "s2") fail(Errc::domain, "pullback_area_form: codomain must be s2");
    Mat J = jacobian(map, x);
    double u = map.eval(x)[0];
    double om = -0.5 * std::sin(u);
    Mat O(2, 2);
    O << 0, om, -om, 0;
    return J.transpose() * O * J;
}

MatrixFn vertical_distribution(const MapPtr& map) {
    int m = map->domain->dim, n = map->codomain->dim;
    return [map, m, n](const Vec& x) {
        if (m == n) return Mat(Mat::Zero(m, 0));
        Mat J = jacobian(*map, x);
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
        Mat V = svd.matrixV();
        return Mat(V.rightCols(m - n));
    };
}

}  // namespace s2

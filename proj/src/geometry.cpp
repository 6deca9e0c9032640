#include "sigma2/geometry.hpp"

#include <cmath>
#include <complex>

namespace s2 {

namespace {

Mat diag3(double a, double b, double c) {
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = c;
    return m;
}

Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

double wrap_angle(double a) {
    double w = std::fmod(a, 2 * pi);
    return w < 0 ? w + 2 * pi : w;
}

std::shared_ptr<Chart> flat_chart(const std::string& name, int d, bool periodic, double half) {
    auto c = std::make_shared<Chart>();
    c->name = name;
    c->family = name;
    c->dim = d;
    for (int i = 0; i < d; ++i) {
        c->ranges.push_back(periodic ? Interval{0, 2 * pi} : Interval{-half, half});
        c->periodic.push_back(periodic);
    }
    c->metric = [d](const Vec&) { return Mat::Identity(d, d); };
    c->density = [](const Vec&) { return 1.0; };
    c->ricci = [d](const Vec&) { return Mat::Zero(d, d); };
    c->compact = periodic;
    c->volume = periodic ? std::pow(2 * pi, d) : std::numeric_limits<double>::quiet_NaN();
    return c;
}

std::shared_ptr<Chart> s3_join(double R) {
    auto c = std::make_shared<Chart>();
    c->family = "s3_join";
    c->dim = 3;
    c->ranges = {{0, 2 * pi}, {0, 2 * pi}, {0, pi / 2}};
    c->periodic = {true, true, false};
    c->singular = {{2, 0.0}, {2, pi / 2}};
    double R2 = R * R;
    c->metric = [R2](const Vec& x) {
        double cs = std::cos(x[2]), sn = std::sin(x[2]);
        return Mat(R2 * diag3(cs * cs, sn * sn, 1.0));
    };
    c->density = [R](const Vec& x) { return R * R * R * std::cos(x[2]) * std::sin(x[2]); };
    c->contact = ContactData{
        [](const Vec& x) {
            double cs = std::cos(x[2]), sn = std::sin(x[2]);
            return vec3(cs * cs, -sn * sn, 0.0);
        },
        [](const Vec&) { return vec3(1.0, -1.0, 0.0); }};
    c->embed = [](const Vec& x) {
        double cs = std::cos(x[2]), sn = std::sin(x[2]);
        return Eigen::Vector4d(cs * std::cos(x[0]), cs * std::sin(x[0]), sn * std::cos(x[1]),
                               sn * std::sin(x[1]));
    };
    c->chart_of = [](const Eigen::Vector4d& y) {
        return vec3(wrap_angle(std::atan2(y[1], y[0])), wrap_angle(std::atan2(y[3], y[2])),
                    std::atan2(std::hypot(y[2], y[3]), std::hypot(y[0], y[1])));
    };
    c->volume = 2 * pi * pi * R * R * R;
    return c;
}

std::shared_ptr<Chart> s3_suspension(double R) {
    auto c = std::make_shared<Chart>();
    c->family = "s3_suspension";
    c->dim = 3;
    c->ranges = {{0, pi}, {0, pi}, {0, 2 * pi}};
    c->periodic = {false, false, true};
    c->singular = {{0, 0.0}, {0, pi}, {1, 0.0}, {1, pi}};
    double R2 = R * R;
    c->metric = [R2](const Vec& x) {
        double ss = std::sin(x[0]), st = std::sin(x[1]);
        return Mat(R2 * diag3(1.0, ss * ss, ss * ss * st * st));
    };
    c->density = [R](const Vec& x) {
        double ss = std::sin(x[0]);
        return R * R * R * ss * ss * std::sin(x[1]);
    };
    c->contact = ContactData{
        [](const Vec& x) {
            double ss = std::sin(x[0]), st = std::sin(x[1]);
            return vec3(std::cos(x[1]), -0.5 * std::sin(2 * x[0]) * st, ss * ss * st * st);
        },
        [](const Vec& x) {
            return vec3(std::cos(x[1]), -std::sin(x[1]) * std::cos(x[0]) / std::sin(x[0]), 1.0);
        }};
    c->embed = [](const Vec& x) {
        double ss = std::sin(x[0]), st = std::sin(x[1]);
        return Eigen::Vector4d(std::cos(x[0]), ss * std::cos(x[1]), ss * st * std::cos(x[2]),
                               ss * st * std::sin(x[2]));
    };
    c->chart_of = [](const Eigen::Vector4d& y) {
        double r3 = std::sqrt(y[1] * y[1] + y[2] * y[2] + y[3] * y[3]);
        return vec3(std::atan2(r3, y[0]), std::atan2(std::hypot(y[2], y[3]), y[1]),
                    wrap_angle(std::atan2(y[3], y[2])));
    };
    c->volume = 2 * pi * pi * R * R * R;
    return c;
}

// (theta, s, mu); the point is e^{i theta}(cos s x(mu) + i sin s y(mu)).
std::shared_ptr<Chart> s3_unit_tangent(double R) {
    auto c = std::make_shared<Chart>();
    c->family = "s3_unit_tangent";
    c->dim = 3;
    c->ranges = {{0, 2 * pi}, {0, pi / 4}, {0, 2 * pi}};
    c->periodic = {true, false, true};
    c->singular = {{1, pi / 4}};
    double R2 = R * R;
    c->metric = [R2](const Vec& x) {
        Mat m = Mat::Identity(3, 3);
        m(0, 2) = m(2, 0) = std::sin(2 * x[1]);
        return Mat(R2 * m);
    };
    c->density = [R](const Vec& x) { return R * R * R * std::cos(2 * x[1]); };
    c->contact = ContactData{[](const Vec& x) { return vec3(1.0, 0.0, std::sin(2 * x[1])); },
                             [](const Vec&) { return vec3(1.0, 0.0, 0.0); }};
    c->embed = [](const Vec& x) {
        double th = x[0], s = x[1], mu = x[2];
        std::complex<double> e = std::polar(1.0, th);
        std::complex<double> z1 = e * std::complex<double>(std::cos(s) * std::cos(mu), std::sin(s) * std::sin(mu));
        std::complex<double> z2 = e * std::complex<double>(std::cos(s) * std::sin(mu), -std::sin(s) * std::cos(mu));
        return Eigen::Vector4d(z1.real(), z1.imag(), z2.real(), z2.imag());
    };
    c->volume = 2 * pi * pi * R * R * R;
    return c;
}

std::shared_ptr<Chart> s2_chart() {
    auto c = std::make_shared<Chart>();
    c->family = "s2";
    c->name = "s2";
    c->dim = 2;
    c->ranges = {{0, pi}, {0, 2 * pi}};
    c->periodic = {false, true};
    c->singular = {{0, 0.0}, {0, pi}};
    c->metric = [](const Vec& x) {
        Mat m = Mat::Identity(2, 2);
        double su = std::sin(x[0]);
        m(1, 1) = su * su;
        return m;
    };
    c->density = [](const Vec& x) { return std::sin(x[0]); };
    c->ricci = [](const Vec& x) {
        Mat m = Mat::Identity(2, 2);
        double su = std::sin(x[0]);
        m(1, 1) = su * su;
        return m;
    };
    c->volume = 4 * pi;
    return c;
}

std::shared_ptr<Chart> heisenberg(double half) {
    auto c = flat_chart("heisenberg", 3, false, half);
    c->metric = [](const Vec& x) {
        double y = x[1];
        Mat m = Mat::Identity(3, 3);
        m(0, 0) = 1 + y * y;
        m(0, 2) = m(2, 0) = -y;
        return m;
    };
    c->contact = ContactData{[](const Vec& x) { return vec3(-x[1], 0.0, 1.0); },
                             [](const Vec&) { return vec3(0.0, 0.0, 1.0); }};
    // Left-invariant frame e1 = dx + y dz, e2 = dy, e3 = dz with [e1, e2] = -e3:
    // Ric = -1/2 (dx^2 + dy^2) + 1/2 eta^2.
    c->ricci = [](const Vec& x) {
        Vec eta = vec3(-x[1], 0.0, 1.0);
        Mat m = Mat::Zero(3, 3);
        m(0, 0) = -0.5;
        m(1, 1) = -0.5;
        return Mat(m + 0.5 * eta * eta.transpose());
    };
    return c;
}

std::shared_ptr<Chart> r3_spherical(double r_max) {
    auto c = std::make_shared<Chart>();
    c->family = "r3_spherical";
    c->dim = 3;
    c->ranges = {{0, r_max}, {0, pi}, {0, 2 * pi}};
    c->periodic = {false, false, true};
    c->singular = {{0, 0.0}, {1, 0.0}, {1, pi}};
    c->metric = [](const Vec& x) {
        double r = x[0], st = std::sin(x[1]);
        return diag3(1.0, r * r, r * r * st * st);
    };
    c->density = [](const Vec& x) { return x[0] * x[0] * std::sin(x[1]); };
    c->ricci = [](const Vec&) { return Mat(Mat::Zero(3, 3)); };
    c->compact = false;
    c->volume = 4.0 / 3.0 * pi * r_max * r_max * r_max;
    return c;
}

}  // namespace

ChartPtr make_chart(std::string_view text) { return make_chart(parse_spec(text)); }

ChartPtr make_chart(const Spec& sp) {
    std::shared_ptr<Chart> c;
    const std::string& n = sp.name;
    if (n == "s3_join" || n == "s3_suspension" || n == "s3_unit_tangent") {
        sp.check_keys({"R"});
        double R = sp.num("R", 0, 1.0);
        if (!(R > 0)) fail(Errc::invalid_argument, n + ": radius must be positive");
        c = n == "s3_join" ? s3_join(R) : n == "s3_suspension" ? s3_suspension(R) : s3_unit_tangent(R);
        c->radius = R;
        double k = 2.0 / (R * R);
        auto g = c->metric;
        c->ricci = [g, k](const Vec& x) { return Mat(k * g(x)); };
    } else if (n == "s2") {
        sp.check_keys({});
        c = s2_chart();
    } else if (n == "t3_flat") {
        sp.check_keys({});
        c = flat_chart("t3_flat", 3, true, 0);
        c->contact = ContactData{[](const Vec& x) { return vec3(std::cos(x[2]), std::sin(x[2]), 0.0); },
                                 [](const Vec& x) { return vec3(std::cos(x[2]), std::sin(x[2]), 0.0); }};
    } else if (n == "t2_flat" || n == "t4_flat") {
        sp.check_keys({});
        c = flat_chart(n, n == "t2_flat" ? 2 : 4, true, 0);
    } else if (n == "r2_flat") {
        sp.check_keys({"half"});
        c = flat_chart(n, 2, false, sp.num("half", 0, 1.0));
    } else if (n == "heisenberg") {
        sp.check_keys({"half"});
        c = heisenberg(sp.num("half", 0, 1.0));
    } else if (n == "r3_spherical") {
        sp.check_keys({"r_max"});
        double rm = sp.num("r_max", 0, 20.0);
        if (!(rm > 0)) fail(Errc::invalid_argument, "r3_spherical: r_max must be positive");
        c = r3_spherical(rm);
    } else {
        fail(Errc::invalid_argument, "unknown chart '" + n + "'");
    }
    c->name = sp.text;
    return c;
}

ChartPtr radius_scale(const ChartPtr& base, double f) {
    if (!(f > 0)) fail(Errc::invalid_argument, "radius_scale: factor must be positive");
    auto c = std::make_shared<Chart>(*base);
    c->name = base->name + "+radius_scale(" + std::to_string(f) + ")";
    double f2 = f * f, fd = std::pow(f, base->dim);
    auto g = base->metric;
    auto dens = base->density;
    c->metric = [g, f2](const Vec& x) { return Mat(f2 * g(x)); };
    c->density = [dens, fd](const Vec& x) { return fd * dens(x); };
    c->volume = base->volume * fd;
    c->radius = base->radius * f;
    // constant rescaling leaves the Ricci tensor unchanged
    return c;
}

ChartPtr squash(const ChartPtr& base, double R) {
    if (!base->contact) fail(Errc::domain, "squash: chart '" + base->name + "' carries no contact data");
    if (!(R > 0)) fail(Errc::invalid_argument, "squash: R must be positive");
    auto c = std::make_shared<Chart>(*base);
    c->name = base->name + "+squash(" + std::to_string(R) + ")";
    auto g = base->metric;
    auto eta = base->contact->eta;
    double a = 1.0 / R, b = 1.0 - 1.0 / R;
    c->metric = [g, eta, a, b](const Vec& x) {
        Vec e = eta(x);
        return Mat(a * g(x) + b * e * e.transpose());
    };
    auto m = c->metric;
    c->density = [m](const Vec& x) { return std::sqrt(m(x).determinant()); };
    c->ricci = nullptr;
    c->volume = std::numeric_limits<double>::quiet_NaN();
    return c;
}

ChartPtr hopf_squash(const ChartPtr& base, int k, int l) {
    if (!base->contact) fail(Errc::domain, "hopf_squash: chart '" + base->name + "' carries no contact data");
    if (base->family != "s3_join") fail(Errc::domain, "hopf_squash: needs a join chart");
    if (k == 0 || l == 0) fail(Errc::invalid_argument, "hopf_squash: k and l must be nonzero");
    auto c = std::make_shared<Chart>(*base);
    c->name = base->name + "+hopf_squash(" + std::to_string(k) + "," + std::to_string(l) + ")";
    double R = base->radius, R2 = R * R;
    double kk = k, ll = l;
    c->metric = [R2, kk, ll](const Vec& x) {
        double cs = std::cos(x[2]), sn = std::sin(x[2]);
        return Mat(R2 * diag3(kk * kk * cs * cs, ll * ll * sn * sn, 1.0));
    };
    c->density = [R, kk, ll](const Vec& x) {
        return R * R * R * std::abs(kk * ll) * std::cos(x[2]) * std::sin(x[2]);
    };
    c->contact = ContactData{
        [kk, ll](const Vec& x) {
            double cs = std::cos(x[2]), sn = std::sin(x[2]);
            return vec3(kk * cs * cs, -ll * sn * sn, 0.0);
        },
        [kk, ll](const Vec&) { return vec3(1.0 / kk, -1.0 / ll, 0.0); }};
    c->ricci = nullptr;
    c->volume = 2 * pi * pi * R * R * R * std::abs(kk * ll);
    return c;
}

ChartPtr biconformal(const ChartPtr& base, ScalarFn sigma, ScalarFn rho, MatrixFn vertical) {
    for (const Vec& x : sample_grid(*base, base->dim == 4 ? 4 : 6, 0.05)) {
        double s = sigma(x), r = rho(x);
        if (!(std::abs(s) > 1e-12) || !(std::abs(r) > 1e-12) || !std::isfinite(s) || !std::isfinite(r))
            fail(Errc::domain, "biconformal: sigma or rho vanishes on the sample grid");
    }
    auto c = std::make_shared<Chart>(*base);
    c->name = base->name + "+biconformal";
    auto g = base->metric;
    c->metric = [g, sigma, rho, vertical](const Vec& x) {
        Mat gx = g(x);
        double s = sigma(x), r = rho(x);
        Mat V = vertical ? vertical(x) : Mat();
        if (V.cols() == 0 || s == r) return Mat(gx / (s * s));
        // g-orthogonal projector onto V
        Mat gram = V.transpose() * gx * V;
        Mat P = V * gram.inverse() * V.transpose() * gx;
        Mat gV = P.transpose() * gx * P;
        Mat gH = gx - gV;
        return Mat(gH / (s * s) + gV / (r * r));
    };
    auto m = c->metric;
    c->density = [m](const Vec& x) { return std::sqrt(m(x).determinant()); };
    c->ricci = nullptr;
    c->contact.reset();
    c->volume = std::numeric_limits<double>::quiet_NaN();
    return c;
}

ChartPtr deform_metric(const ChartPtr& chart, std::string_view text) {
    Spec sp = parse_spec(text);
    if (sp.name == "radius_scale") {
        sp.check_keys({"c"});
        return radius_scale(chart, sp.num_required("c", 0));
    }
    if (sp.name == "squash") {
        sp.check_keys({"R"});
        return squash(chart, sp.num_required("R", 0));
    }
    if (sp.name == "hopf_squash") {
        sp.check_keys({"k", "l"});
        return hopf_squash(chart, static_cast<int>(sp.integer("k", 0, 1)), static_cast<int>(sp.integer("l", 1, 1)));
    }
    if (sp.name == "conformal") {
        // constant conformal factor: gbar = sigma^-2 g
        sp.check_keys({"sigma"});
        double s = sp.num_required("sigma", 0);
        return biconformal(chart, [s](const Vec&) { return s; }, [s](const Vec&) { return s; }, nullptr);
    }
    fail(Errc::invalid_argument, "unknown deformation '" + sp.name + "'");
}

FrameField coordinate_frame(const ChartPtr& chart) {
    int d = chart->dim;
    return {chart, [d](const Vec&) { return Mat(Mat::Identity(d, d)); }};
}

Vec gram_schmidt_columns(const Mat& g, Mat& E) {
    Vec norms(E.cols());
    for (int i = 0; i < E.cols(); ++i) {
        for (int j = 0; j < i; ++j) E.col(i) -= (E.col(j).dot(g * E.col(i))) * E.col(j);
        double n = std::sqrt(E.col(i).dot(g * E.col(i)));
        norms[i] = n;
        if (n > 0) E.col(i) /= n;
    }
    return norms;
}

FrameField orthonormalize(const FrameField& frame) {
    auto chart = frame.chart;
    auto vf = frame.vectors;
    return {chart, [chart, vf](const Vec& x) {
                Mat E = vf(x);
                Mat g = chart->metric(x);
                gram_schmidt_columns(g, E);
                return E;
            }};
}

double distance_to_singular(const Chart& chart, const Vec& x) {
    double d = std::numeric_limits<double>::infinity();
    for (auto& p : chart.singular) d = std::min(d, std::abs(x[p.axis] - p.value));
    return d;
}

bool is_interior(const Chart& chart, const Vec& x) {
    if (x.size() != chart.dim) return false;
    for (int a = 0; a < chart.dim; ++a)
        if (!std::isfinite(x[a])) return false;
    for (auto& p : chart.singular) {
        const Interval& r = chart.ranges[p.axis];
        if (p.value == r.lo && !(x[p.axis] > r.lo)) return false;
        if (p.value == r.hi && !(x[p.axis] < r.hi)) return false;
    }
    return distance_to_singular(chart, x) > 0;
}

Vec wrap(const Chart& chart, const Vec& x) {
    Vec y = x;
    for (int a = 0; a < chart.dim; ++a)
        if (chart.periodic[a]) {
            double L = chart.ranges[a].length();
            double w = std::fmod(y[a] - chart.ranges[a].lo, L);
            if (w < 0) w += L;
            y[a] = chart.ranges[a].lo + w;
        }
    return y;
}

FrameConnection connection_coeffs(const Chart& chart, const FrameField& frame, const Vec& x) {
    const int d = chart.dim;
    const double h = fd_step;
    if (distance_to_singular(chart, x) <= h)
        fail(Errc::domain, "connection_coeffs: point within the finite-difference step of the singular locus");
    Mat g = chart.metric(x);
    Mat E = frame.vectors(x);
    std::array<Mat, 4> dgram, dE;
    for (int b = 0; b < d; ++b) {
        Vec xp = x, xm = x;
        xp[b] += h;
        xm[b] -= h;
        Mat Ep = frame.vectors(xp), Em = frame.vectors(xm);
        // the Gram matrix is differenced as a whole: constant for orthonormal frames
        dgram[b] = (Mat(Ep.transpose() * chart.metric(xp) * Ep) - Mat(Em.transpose() * chart.metric(xm) * Em)) / (2 * h);
        dE[b] = (Ep - Em) / (2 * h);
    }
    // derivative of E_j along E_i, and of the Gram matrix along E_i
    Mat dirE[4];
    Mat dirgram[4];
    for (int i = 0; i < d; ++i) {
        dirE[i] = Mat::Zero(d, d);
        dirgram[i] = Mat::Zero(d, d);
        for (int b = 0; b < d; ++b) {
            dirE[i] += E(b, i) * dE[b];
            dirgram[i] += E(b, i) * dgram[b];
        }
    }
    auto dgf = [&](int i, int j, int k) { return dirgram[i](j, k); };  // E_i(g(E_j, E_k))
    auto brk = [&](int i, int j, int k) {  // g([E_i, E_j], E_k)
        Vec b = dirE[i].col(j) - dirE[j].col(i);
        return b.dot(g * E.col(k));
    };
    FrameConnection G;
    G.dim = d;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                G.v[i][j][k] = 0.5 * (dgf(i, j, k) + dgf(j, i, k) - dgf(k, i, j) + brk(i, j, k) -
                                      brk(i, k, j) - brk(j, k, i));
    return G;
}

std::array<Mat, 4> christoffel(const Chart& chart, const Vec& x) {
    const int d = chart.dim;
    const double h = fd_step;
    if (distance_to_singular(chart, x) <= h)
        fail(Errc::domain, "christoffel: point within the finite-difference step of the singular locus");
    Mat g = chart.metric(x);
    Mat gi = g.inverse();
    std::array<Mat, 4> dg;
    for (int b = 0; b < d; ++b) {
        Vec xp = x, xm = x;
        xp[b] += h;
        xm[b] -= h;
        dg[b] = (chart.metric(xp) - chart.metric(xm)) / (2 * h);
    }
    std::array<Mat, 4> out;
    Mat first(d, d);
    for (int a = 0; a < d; ++a) out[a] = Mat::Zero(d, d);
    for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c) {
            Vec low(d);  // Gamma_{e b c} (first kind)
            for (int e = 0; e < d; ++e) low[e] = 0.5 * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
            Vec up = gi * low;
            for (int a = 0; a < d; ++a) out[a](b, c) = up[a];
        }
    return out;
}

MatrixFn ricci_form(const ChartPtr& chart) {
    if (!chart->ricci) fail(Errc::domain, "ricci_form: no analytic Ricci tensor for chart '" + chart->name + "'");
    return chart->ricci;
}

std::vector<Vec> sample_grid(const Chart& chart, int n, double margin) {
    const int d = chart.dim;
    std::vector<std::vector<double>> axes(d);
    for (int a = 0; a < d; ++a) {
        double lo = chart.ranges[a].lo, hi = chart.ranges[a].hi;
        if (!chart.periodic[a]) {
            double L = hi - lo;
            lo += margin * L;
            hi -= margin * L;
        }
        for (int i = 0; i < n; ++i) axes[a].push_back(lo + (hi - lo) * (i + 0.5) / n);
    }
    std::vector<Vec> out;
    std::vector<int> idx(d, 0);
    for (;;) {
        Vec x(d);
        for (int a = 0; a < d; ++a) x[a] = axes[a][idx[a]];
        out.push_back(x);
        int a = d - 1;
        while (a >= 0 && ++idx[a] == n) idx[a--] = 0;
        if (a < 0) break;
    }
    return out;
}

Vec random_point(const Chart& chart, std::mt19937_64& rng, double margin) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vec x(chart.dim);
    for (int a = 0; a < chart.dim; ++a) {
        double lo = chart.ranges[a].lo, hi = chart.ranges[a].hi;
        if (!chart.periodic[a]) {
            double L = hi - lo;
            lo += margin * L;
            hi -= margin * L;
        }
        x[a] = lo + (hi - lo) * u(rng);
    }
    return x;
}

Mat exterior_derivative(const VectorFn& omega, const Vec& x, int d) {
    const double h = fd_step;
    Mat D(d, d);  // D(a, b) = d_a w_b
    for (int a = 0; a < d; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        D.row(a) = ((omega(xp) - omega(xm)) / (2 * h)).transpose();
    }
    return D - D.transpose();
}

ContactDefect contact_defect(const Chart& chart, const Vec& x) {
    if (!chart.contact) fail(Errc::domain, "chart '" + chart.name + "' carries no contact data");
    Vec eta = chart.contact->eta(x);
    Vec xi = chart.contact->reeb(x);
    Mat deta = exterior_derivative(chart.contact->eta, x, chart.dim);
    Vec k = deta.transpose() * xi;  // (iota_xi d eta)_b = xi^a (d eta)_{ab}
    return {std::abs(eta.dot(xi) - 1.0), k.cwiseAbs().maxCoeff()};
}

}  // namespace s2

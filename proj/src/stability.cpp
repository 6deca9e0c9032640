#include "sigma2/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace s2 {

namespace {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Mat43 = Eigen::Matrix<double, 4, 3>;

constexpr double cut_lo = 0.05, cut_hi = 0.35;

// Embedding of the suspension chart with first and second derivatives.
struct SuspJet {
    Vec4 p;
    Mat43 T;
    Vec4 H[3][3];
    double n[3];  // |T_b|
};

SuspJet susp_jet(const Vec& x) {
    const double ss = std::sin(x[0]), cs = std::cos(x[0]), st = std::sin(x[1]), ct = std::cos(x[1]),
                 sx = std::sin(x[2]), cx = std::cos(x[2]);
    SuspJet j;
    j.p << cs, ss * ct, ss * st * cx, ss * st * sx;
    j.T.col(0) << -ss, cs * ct, cs * st * cx, cs * st * sx;
    j.T.col(1) << 0, -ss * st, ss * ct * cx, ss * ct * sx;
    j.T.col(2) << 0, 0, -ss * st * sx, ss * st * cx;
    j.H[0][0] = -j.p;
    j.H[0][1] = j.H[1][0] = Vec4(0, -cs * st, cs * ct * cx, cs * ct * sx);
    j.H[0][2] = j.H[2][0] = Vec4(0, 0, -cs * st * sx, cs * st * cx);
    j.H[1][1] = Vec4(0, -ss * ct, -ss * st * cx, -ss * st * sx);
    j.H[1][2] = j.H[2][1] = Vec4(0, 0, -ss * ct * sx, ss * ct * cx);
    j.H[2][2] = Vec4(0, 0, -ss * st * cx, -ss * st * sx);
    j.n[0] = 1;
    j.n[1] = std::abs(ss);
    j.n[2] = std::abs(ss * st);
    return j;
}

// Reeb field of s3_join(1) is J p.
Mat4 reeb_matrix() {
    Mat4 J = Mat4::Zero();
    J(0, 1) = -1;
    J(1, 0) = 1;
    J(2, 3) = 1;
    J(3, 2) = -1;
    return J;
}

Mat4 rotation(int i, int j) {
    Mat4 A = Mat4::Zero();
    A(i, j) = -1;
    A(j, i) = 1;
    return A;
}

ChartPtr unit_suspension() {
    static ChartPtr c = make_chart("s3_suspension(1)");
    return c;
}

// chart components of an ambient tangent vector (the suspension frame is orthogonal)
Vec chart_components(const SuspJet& j, const Vec4& X) {
    Vec v(3);
    for (int a = 0; a < 3; ++a) v[a] = j.T.col(a).dot(X) / j.T.col(a).squaredNorm();
    return v;
}

VariationField ambient_field(std::string generator, std::string kind, std::function<AmbientJet(const Vec&)> amb) {
    VariationField f;
    f.chart = unit_suspension();
    f.generator = std::move(generator);
    f.kind = std::move(kind);
    f.ambient = amb;
    f.components = [amb](const Vec& x) { return chart_components(susp_jet(x), amb(x).X); };
    return f;
}

VariationField linear_field(const Mat4& A, std::string generator, std::string kind) {
    return ambient_field(std::move(generator), std::move(kind), [A](const Vec& x) {
        SuspJet j = susp_jet(x);
        AmbientJet r;
        r.X = A * j.p;
        r.D = A * j.T;
        return r;
    });
}

double smootherstep(double u) { return u * u * u * (10 + u * (-15 + 6 * u)); }
double smootherstep_d(double u) { return 30 * u * u * (1 + u * (-2 + u)); }

double cutoff_d(double u) {
    double d = std::min(u, pi - u);
    if (d <= cut_lo || d >= cut_hi) return 0;
    double v = smootherstep_d((d - cut_lo) / (cut_hi - cut_lo)) / (cut_hi - cut_lo);
    return u <= pi / 2 ? v : -v;
}

// Point evaluation of the covariant derivative in the orthonormal suspension frame.
struct FramePoint {
    SuspJet j;
    Mat43 F;   // orthonormal frame
    Mat N;     // (a, b) = g(e_a, nabla_{e_b} X)
    Vec4 X;
};

FramePoint frame_point(const VariationField& X, const Vec& x) {
    FramePoint fp;
    fp.j = susp_jet(x);
    AmbientJet a = X.ambient(x);
    fp.X = a.X;
    for (int b = 0; b < 3; ++b) fp.F.col(b) = fp.j.T.col(b) / fp.j.n[b];
    fp.N = Mat::Zero(3, 3);
    for (int c = 0; c < 3; ++c)
        for (int b = 0; b < 3; ++b) fp.N(c, b) = fp.F.col(c).dot(a.D.col(b)) / fp.j.n[b];
    return fp;
}

void check_integer_pair(int i, int j) {
    if (i < 0 || j > 3 || i >= j) fail(Errc::invalid_argument, "rotation plane needs 0 <= i < j <= 3");
}

}  // namespace

double cutoff(double u) {
    double d = std::min(u, pi - u);
    if (d <= cut_lo) return 0;
    if (d >= cut_hi) return 1;
    return smootherstep((d - cut_lo) / (cut_hi - cut_lo));
}

VariationField killing_field(int i, int j) {
    check_integer_pair(i, j);
    return linear_field(rotation(i, j), "killing(" + std::to_string(i) + "," + std::to_string(j) + ")", "killing");
}

std::vector<VariationField> killing_fields() {
    std::vector<VariationField> v;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) v.push_back(killing_field(i, j));
    return v;
}

VariationField hopf_horizontal_killing(int which) {
    if (which == 0) return linear_field(rotation(0, 2) + rotation(1, 3), "hopf-horizontal-killing(0)", "killing");
    if (which == 1) return linear_field(rotation(0, 3) - rotation(1, 2), "hopf-horizontal-killing(1)", "killing");
    fail(Errc::invalid_argument, "hopf_horizontal_killing: index must be 0 or 1");
}

VariationField conformal_gradient_field(int i) {
    if (i < 0 || i > 3) fail(Errc::invalid_argument, "conformal_gradient_field: index must be in 0..3");
    return ambient_field("conformal-gradient(" + std::to_string(i) + ")", "conformal-gradient", [i](const Vec& x) {
        SuspJet j = susp_jet(x);
        AmbientJet r;
        r.X = -j.p[i] * j.p;
        r.X[i] += 1;
        for (int b = 0; b < 3; ++b) r.D.col(b) = -(j.T(i, b) * j.p + j.p[i] * j.T.col(b));
        return r;
    });
}

std::vector<VariationField> conformal_gradient_fields() {
    std::vector<VariationField> v;
    for (int i = 0; i < 4; ++i) v.push_back(conformal_gradient_field(i));
    return v;
}

VariationField fourier_random_field(std::uint64_t seed, int band) {
    if (band < 1) fail(Errc::invalid_argument, "fourier_random_field: band must be >= 1");
    struct Term {
        double k[3];
        double c, phi;
    };
    constexpr int terms_per_component = 6;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> kd(-band, band);
    std::uniform_real_distribution<double> cd(-1.0, 1.0), pd(0.0, 2 * pi);
    auto tab = std::make_shared<std::vector<Term>>();
    for (int a = 0; a < 3; ++a)
        for (int q = 0; q < terms_per_component; ++q) {
            Term t;
            for (double& k : t.k) k = kd(rng);
            t.c = cd(rng);
            t.phi = pd(rng);
            tab->push_back(t);
        }
    // chart components and their coordinate derivatives
    auto eval = [tab](const Vec& x, Vec& X, Mat& dX) {
        X = Vec::Zero(3);
        dX = Mat::Zero(3, 3);
        double cs = cutoff(x[0]), ct = cutoff(x[1]);
        if (cs == 0 || ct == 0) return;
        double dcs = cutoff_d(x[0]), dct = cutoff_d(x[1]);
        for (int a = 0; a < 3; ++a) {
            double f = 0, df[3] = {0, 0, 0};
            for (int q = 0; q < terms_per_component; ++q) {
                const Term& t = (*tab)[a * terms_per_component + q];
                double arg = t.k[0] * x[0] + t.k[1] * x[1] + t.k[2] * x[2] + t.phi;
                double c = std::cos(arg), s = std::sin(arg);
                f += t.c * c;
                for (int b = 0; b < 3; ++b) df[b] -= t.c * s * t.k[b];
            }
            X[a] = cs * ct * f;
            dX(a, 0) = dcs * ct * f + cs * ct * df[0];
            dX(a, 1) = cs * dct * f + cs * ct * df[1];
            dX(a, 2) = cs * ct * df[2];
        }
    };
    std::ostringstream name;
    name << "fourier-random(seed=" << seed << ",band=" << band << ")";
    VariationField f;
    f.chart = unit_suspension();
    f.generator = name.str();
    f.kind = "fourier-random";
    f.components = [eval](const Vec& x) {
        Vec X;
        Mat dX;
        eval(x, X, dX);
        return X;
    };
    f.jacobian = [eval](const Vec& x) {
        Vec X;
        Mat dX;
        eval(x, X, dX);
        return dX;
    };
    f.ambient = [eval](const Vec& x) {
        Vec X;
        Mat dX;
        eval(x, X, dX);
        SuspJet j = susp_jet(x);
        AmbientJet r;
        r.X = j.T * Eigen::Vector3d(X[0], X[1], X[2]);
        for (int b = 0; b < 3; ++b) {
            Vec4 d = Vec4::Zero();
            for (int a = 0; a < 3; ++a) d += j.H[b][a] * X[a] + j.T.col(a) * dX(a, b);
            r.D.col(b) = d;
        }
        return r;
    };
    return f;
}

VariationField coordinate_field(const ChartPtr& chart, int axis) {
    if (axis < 0 || axis >= chart->dim) fail(Errc::invalid_argument, "coordinate_field: axis out of range");
    VariationField f;
    f.chart = chart;
    f.generator = "coordinate(" + std::to_string(axis) + ")";
    f.kind = "coordinate";
    const int d = chart->dim;
    f.components = [d, axis](const Vec&) {
        Vec v = Vec::Zero(d);
        v[axis] = 1;
        return v;
    };
    f.jacobian = [d](const Vec&) { return Mat(Mat::Zero(d, d)); };
    return f;
}

VariationField custom_field(const ChartPtr& chart, VectorFn components, const std::string& name) {
    VariationField f;
    f.chart = chart;
    f.generator = name;
    f.kind = "custom";
    f.components = std::move(components);
    return f;
}

VariationField scaled(const VariationField& X, double c) {
    VariationField f = X;
    std::ostringstream os;
    os << c << "*" << X.generator;
    f.generator = os.str();
    auto comp = X.components;
    f.components = [comp, c](const Vec& x) { return Vec(c * comp(x)); };
    if (X.jacobian) {
        auto jac = X.jacobian;
        f.jacobian = [jac, c](const Vec& x) { return Mat(c * jac(x)); };
    }
    if (X.ambient) {
        auto amb = X.ambient;
        f.ambient = [amb, c](const Vec& x) {
            AmbientJet r = amb(x);
            r.X *= c;
            r.D *= c;
            return r;
        };
    }
    return f;
}

VectorCalculus vector_calculus(const VariationField& X, const Vec& x) {
    const Chart& c = *X.chart;
    const int d = c.dim;
    if (!is_interior(c, x)) fail(Errc::domain, "vector_calculus: point not in the chart interior");
    auto G = christoffel(c, x);
    Vec v = X.components(x);
    Mat J(d, d);
    if (X.jacobian) {
        J = X.jacobian(x);
    } else {
        for (int b = 0; b < d; ++b) {
            Vec xp = x, xm = x;
            xp[b] += fd_step;
            xm[b] -= fd_step;
            J.col(b) = (X.components(xp) - X.components(xm)) / (2 * fd_step);
        }
    }
    VectorCalculus r;
    r.nabla = J;
    for (int a = 0; a < d; ++a) r.nabla.row(a) += (G[a] * v).transpose();
    r.div = r.nabla.trace();
    Mat g = c.metric(x);
    Mat gn = g * r.nabla;
    r.lie = gn + gn.transpose();
    return r;
}

QuadratureRule sphere_rule(const SphereRuleOptions& o) {
    const double br[6] = {0, cut_lo, cut_hi, pi - cut_hi, pi - cut_lo, pi};
    const int ord[5] = {o.edge, o.ramp, o.middle, o.ramp, o.edge};
    std::vector<double> ax, aw;
    for (int p = 0; p < 5; ++p) {
        const auto& g = gauss_legendre(ord[p]);
        double h = 0.5 * (br[p + 1] - br[p]), c = 0.5 * (br[p + 1] + br[p]);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            ax.push_back(c + h * g.x[i]);
            aw.push_back(h * g.w[i]);
        }
    }
    QuadratureRule r;
    r.kind = "s3-panels";
    r.order = o.middle;
    const double wx = 2 * pi / o.nx;
    for (std::size_t i = 0; i < ax.size(); ++i)
        for (std::size_t k = 0; k < ax.size(); ++k)
            for (int q = 0; q < o.nx; ++q) {
                Vec x(3);
                x << ax[i], ax[k], (q + 0.5) * wx;
                double wc = aw[i] * aw[k] * wx;
                r.nodes.push_back(x);
                r.w_coord.push_back(wc);
                r.w_nu.push_back(wc * std::pow(std::sin(ax[i]), 2) * std::sin(ax[k]));
            }
    return r;
}

FieldIntegrals field_integrals(const VariationField& X, const QuadratureRule& rule) {
    const std::size_t N = rule.nodes.size();
    std::vector<double> grad(N), ric(N), div2(N), lie2(N), norm2(N), newton(N);
    const bool amb = static_cast<bool>(X.ambient) && rule.kind == "s3-panels";
    const int n = X.chart->dim;
    MatrixFn ricci;
    if (!amb) ricci = ricci_form(X.chart);
    for (std::size_t q = 0; q < N; ++q) {
        const Vec& x = rule.nodes[q];
        const double w = rule.w_nu[q];
        double G, R, D, L, X2;
        if (amb) {
            FramePoint fp = frame_point(X, x);
            Mat Ls = fp.N + fp.N.transpose();
            G = fp.N.squaredNorm();
            X2 = fp.X.squaredNorm();
            R = 2 * X2;  // unit S^3
            D = fp.N.trace();
            L = Ls.squaredNorm();
        } else {
            VectorCalculus vc = vector_calculus(X, x);
            Mat g = X.chart->metric(x);
            Mat gi = g.inverse();
            Vec v = X.components(x);
            G = (g * vc.nabla * gi * vc.nabla.transpose()).trace();
            X2 = v.dot(g * v);
            R = v.dot(ricci(x) * v);
            D = vc.div;
            L = (gi * vc.lie * gi * vc.lie).trace();
        }
        newton[q] = 0.5 * L - (2.0 / n) * D * D;
        grad[q] = w * G;
        ric[q] = w * R;
        div2[q] = w * D * D;
        lie2[q] = w * L;
        norm2[q] = w * X2;
    }
    FieldIntegrals I;
    I.grad2 = pairwise_sum(grad);
    I.ric = pairwise_sum(ric);
    I.div2 = pairwise_sum(div2);
    I.lie2 = pairwise_sum(lie2);
    I.norm2 = pairwise_sum(norm2);
    I.newton_min = N ? *std::min_element(newton.begin(), newton.end()) : 0.0;
    I.newton_max_abs = 0;
    for (double v : newton) I.newton_max_abs = std::max(I.newton_max_abs, std::abs(v));
    return I;
}

FieldIntegrals field_integrals(const VariationField& X) {
    if (X.ambient) {
        static const QuadratureRule rule = sphere_rule();
        return field_integrals(X, rule);
    }
    return field_integrals(X, product_gauss(*X.chart, X.chart->dim <= 2 ? 48 : 24));
}

HomothetyForm parse_homothety_form(const std::string& s) {
    if (s == "sigma2") return HomothetyForm::sigma2;
    if (s == "full") return HomothetyForm::full;
    if (s == "dirichlet") return HomothetyForm::dirichlet;
    fail(Errc::invalid_argument, "unknown Hessian form '" + s + "' (sigma2 | full | dirichlet)");
}

HessianReport hessian_homothety(const FieldIntegrals& I, const std::string& field, int n, double lambda,
                                double kappa, HomothetyForm form) {
    if (n < 2) fail(Errc::invalid_argument, "hessian_homothety: n must be >= 2");
    if (!(lambda > 0)) fail(Errc::invalid_argument, "hessian_homothety: lambda must be positive");
    if (!(kappa >= 0)) fail(Errc::invalid_argument, "hessian_homothety: kappa must be nonnegative");
    HessianReport r;
    r.field = field;
    r.params = {{"n", n}, {"lambda", lambda}, {"kappa", kappa}};
    const double il2 = 1 / (lambda * lambda);
    switch (form) {
        case HomothetyForm::sigma2: {
            r.form = "sigma2-homothety";
            r.terms = {{"grad_term", (n - 2) * I.grad2}, {"ric_term", -(n - 2) * I.ric}, {"div_term", I.div2}};
            double lie = 0.5 * (n - 2) * I.lie2, dv = -(n - 3) * I.div2;
            r.alt_value = lie + dv;
            break;
        }
        case HomothetyForm::full:
            r.form = "sigma12-full";
            r.terms = {{"lie_term", 0.5 * (il2 + (n - 2) * kappa) * I.lie2},
                       {"div_term", -(il2 + (n - 3) * kappa) * I.div2}};
            break;
        case HomothetyForm::dirichlet:
            r.form = "dirichlet-part";
            r.terms = {{"grad_term", il2 * I.grad2}, {"ric_term", -il2 * I.ric}};
            break;
    }
    std::vector<double> t;
    for (auto& kv : r.terms) t.push_back(kv.second);
    r.value = pairwise_sum(t);
    if (form == HomothetyForm::sigma2) {
        double scale = 0;
        for (double v : t) scale += std::abs(v);
        scale += std::abs(r.alt_value);
        r.yano_defect = scale > 0 ? std::abs(r.value - r.alt_value) / scale : 0.0;
    }
    return r;
}

HessianReport hessian_homothety(const VariationField& X, int n, double lambda, double kappa, HomothetyForm form) {
    if (!X.chart->ricci && !X.ambient)
        fail(Errc::domain, "hessian_homothety: Ricci unavailable for chart '" + X.chart->name + "'");
    return hessian_homothety(field_integrals(X), X.generator, n, lambda, kappa, form);
}

HessianReport hessian_hopf(const VariationField& X, bool horizontal, const SphereRuleOptions& o) {
    if (!X.ambient) fail(Errc::domain, "hessian_hopf: field must live on the unit S^3");
    const QuadratureRule rule = sphere_rule(o);
    const Mat4 J = reeb_matrix();
    const std::size_t N = rule.nodes.size();
    std::vector<double> dv(N), xi(N), tw(N);
    for (std::size_t q = 0; q < N; ++q) {
        FramePoint fp = frame_point(X, rule.nodes[q]);
        const Vec4& p = fp.j.p;
        Vec4 e = J * p;
        Mat4 K = J + p * e.transpose();  // V -> nabla_V xi on tangent vectors
        Eigen::Matrix3d N3 = fp.N;
        Mat4 M = fp.F * N3 * fp.F.transpose();
        Vec4 Xv = fp.X;
        if (horizontal) {
            double f = Xv.dot(e);
            Eigen::RowVector4d row = e.transpose() * M + Xv.transpose() * K;
            M = M - e * row - f * K;
            Xv = Xv - f * e;
        }
        double div = (fp.F.transpose() * M * fp.F).trace();
        const double w = rule.w_nu[q];
        dv[q] = w * div * div;
        xi[q] = w * (M * e).squaredNorm();
        tw[q] = -w * (K * Xv).squaredNorm();
    }
    HessianReport r;
    r.form = "hopf-2hh";
    r.field = X.generator;
    r.params = {{"n", 3}, {"horizontal", horizontal ? 1.0 : 0.0}};
    r.terms = {{"div_term", pairwise_sum(dv)}, {"xi_term", pairwise_sum(xi)}, {"twist_term", pairwise_sum(tw)}};
    r.value = pairwise_sum(std::vector<double>{r.terms[0].second, r.terms[1].second, r.terms[2].second});
    return r;
}

FieldSet make_field_set(const std::string& names, int n_random, std::uint64_t seed, int band) {
    FieldSet set;
    for (const std::string& raw : split_top_level(names, ',')) {
        std::string nm = trim(raw);
        if (nm == "killing") {
            for (auto& f : killing_fields()) set.fields.push_back(f);
        } else if (nm == "conformal") {
            for (auto& f : conformal_gradient_fields()) set.fields.push_back(f);
        } else if (nm == "random") {
            if (n_random < 0) fail(Errc::invalid_argument, "n_random must be >= 0");
            for (int i = 0; i < n_random; ++i) set.fields.push_back(fourier_random_field(seed + i, band));
        } else if (nm == "hopf-horizontal") {
            set.fields.push_back(hopf_horizontal_killing(0));
            set.fields.push_back(hopf_horizontal_killing(1));
        } else {
            fail(Errc::invalid_argument, "unknown field family '" + nm + "' (killing | conformal | random | hopf-horizontal)");
        }
    }
    if (set.fields.empty()) fail(Errc::invalid_argument, "empty field set");
    set.integrals.resize(set.fields.size());
    parallel_for(set.fields.size(), [&](std::size_t i) { set.integrals[i] = field_integrals(set.fields[i]); });
    return set;
}

ThresholdResult threshold_scan(const FieldSet& set, double kappa, double lambda_min, double lambda_max, int n_grid,
                               int n) {
    if (!(kappa > 0)) fail(Errc::invalid_argument, "threshold_scan: kappa must be positive");
    if (!(lambda_min > 0) || !(lambda_max > lambda_min) || n_grid < 2)
        fail(Errc::invalid_argument, "threshold_scan: need 0 < lambda_min < lambda_max and n_grid >= 2");
    std::vector<std::size_t> active;
    double mag = 0;
    for (std::size_t i = 0; i < set.integrals.size(); ++i) {
        const FieldIntegrals& I = set.integrals[i];
        if (I.lie2 > 1e-10 * std::max(1.0, I.norm2)) active.push_back(i);
        mag = std::max(mag, 0.5 * I.lie2 + I.div2);
    }
    if (active.empty()) fail(Errc::invalid_argument, "threshold_scan: field set is all Killing, the scan is degenerate");
    ThresholdResult r;
    r.kappa = kappa;
    r.n = n;
    r.predicted = 1 / std::sqrt(2 * kappa);
    auto min_value = [&](double lam, std::string* who) {
        double il2 = 1 / (lam * lam), m = std::numeric_limits<double>::infinity();
        for (std::size_t i : active) {
            const FieldIntegrals& I = set.integrals[i];
            double v = 0.5 * (il2 + (n - 2) * kappa) * I.lie2 - (il2 + (n - 3) * kappa) * I.div2;
            if (v < m) {
                m = v;
                if (who) *who = set.fields[i].generator;
            }
        }
        // Killing fields contribute exactly zero
        if (active.size() < set.fields.size()) m = std::min(m, 0.0);
        return m;
    };
    auto stable = [&](double lam) {
        double il2 = 1 / (lam * lam);
        return min_value(lam, nullptr) >= -1e-10 * mag * (il2 + kappa);
    };
    int first = -1;
    for (int i = 0; i < n_grid; ++i) {
        double lam = lambda_min + (lambda_max - lambda_min) * i / (n_grid - 1);
        r.scan.push_back({lam, min_value(lam, nullptr)});
        if (first < 0 && stable(lam)) first = i;
    }
    if (first < 0) {
        r.message = "no tested lambda gives a nonnegative form on the tested field family";
        return r;
    }
    if (first == 0) {
        r.lambda_star = lambda_min;
        r.message = "nonnegative on the tested field family across the whole grid";
        return r;
    }
    double lo = r.scan[first - 1].first, hi = r.scan[first].first;
    min_value(lo, &r.argmin_field);
    while (hi - lo > 1e-4) {
        double mid = 0.5 * (lo + hi);
        (stable(mid) ? hi : lo) = mid;
        ++r.bisection_steps;
    }
    r.lambda_star = 0.5 * (lo + hi);
    r.message = "smallest lambda with the form nonnegative on the tested field family";
    return r;
}

}  // namespace s2

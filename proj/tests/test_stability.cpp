#include "support.hpp"

using namespace s2;
using t::rel;
using t::v;

namespace {

// 10^3 interior grid of the unit suspension chart
std::vector<Vec> suspension_grid() {
    std::vector<Vec> g;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            for (int k = 0; k < 10; ++k)
                g.push_back(v({0.1 + 2.94 * i / 9, 0.1 + 2.94 * j / 9, 2 * pi * k / 10}));
    return g;
}

// Reeb field of s3_join(1), built from two rotations
VariationField reeb_field() {
    VariationField a = killing_field(0, 1), b = killing_field(2, 3);
    VariationField f = a;
    f.generator = "reeb";
    auto fa = a.ambient, fb = b.ambient;
    f.ambient = [fa, fb](const Vec& x) {
        AmbientJet p = fa(x), q = fb(x);
        p.X -= q.X;
        p.D -= q.D;
        return p;
    };
    auto ca = a.components, cb = b.components;
    f.components = [ca, cb](const Vec& x) { return Vec(ca(x) - cb(x)); };
    return f;
}

double sum_terms(const HessianReport& r) {
    double s = 0;
    for (auto& kv : r.terms) s += kv.second;
    return s;
}

// Hand integrals for X = grad(cos s) on the unit S^3: |X|^2 = sin^2 s, nabla X = -cos s I.
// With c = int cos^2 s = pi^2 / 2 and int sin^2 s = 3 pi^2 / 2.
constexpr double c_int = pi * pi / 2;
constexpr double grad2_oracle = 3 * c_int;
constexpr double div2_oracle = 9 * c_int;
constexpr double lie2_oracle = 12 * c_int;
constexpr double ric_oracle = 2 * 3 * c_int;

}  // namespace

TEST_CASE("Killing generators have vanishing Lie derivative of the metric") {
    auto grid = suspension_grid();
    for (const auto& X : killing_fields()) {
        double worst = 0, worst_div = 0;
        for (const Vec& x : grid) {
            VectorCalculus vc = vector_calculus(X, x);
            worst = std::max(worst, t::max_abs(vc.lie));
            worst_div = std::max(worst_div, std::abs(vc.div));
        }
        CAPTURE(X.generator);
        CHECK(worst < 1e-8);
        CHECK(worst_div < 1e-8);
    }
}

TEST_CASE("conformal-gradient generators satisfy L_X g = (2/3) div X g") {
    auto grid = suspension_grid();
    for (const auto& X : conformal_gradient_fields()) {
        double worst = 0;
        for (const Vec& x : grid) {
            VectorCalculus vc = vector_calculus(X, x);
            Mat g = X.chart->metric(x);
            worst = std::max(worst, t::max_abs(vc.lie - (2.0 / 3) * vc.div * g));
        }
        CAPTURE(X.generator);
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("vector calculus examples") {
    SUBCASE("d/dx1 on s3_join(1) is Killing") {
        ChartPtr c = make_chart("s3_join(1)");
        VariationField X = coordinate_field(c, 0);
        for (const Vec& x : t::points(*c, 30, 3)) {
            VectorCalculus vc = vector_calculus(X, x);
            CHECK(t::max_abs(vc.lie) < 1e-8);
            CHECK(std::abs(vc.div) < 1e-8);
        }
    }
    SUBCASE("-sin s d/ds on the unit suspension has divergence -3 cos s") {
        ChartPtr c = make_chart("s3_suspension(1)");
        VariationField X = custom_field(c, [](const Vec& x) { return v({-std::sin(x[0]), 0, 0}); });
        VariationField Y = conformal_gradient_field(0);
        for (const Vec& x : t::points(*c, 30, 4)) {
            CHECK(std::abs(vector_calculus(X, x).div + 3 * std::cos(x[0])) < 1e-8);
            CHECK(std::abs(vector_calculus(Y, x).div + 3 * std::cos(x[0])) < 1e-8);
            CHECK(t::max_abs(X.components(x) - Y.components(x)) < 1e-12);
        }
    }
    SUBCASE("coordinate fields on t3_flat are parallel") {
        ChartPtr c = make_chart("t3_flat");
        for (int a = 0; a < 3; ++a)
            for (const Vec& x : t::points(*c, 10, 5 + a)) CHECK(t::max_abs(vector_calculus(coordinate_field(c, a), x).nabla) == 0);
    }
    SUBCASE("exterior points are refused") {
        ChartPtr c = make_chart("s3_suspension(1)");
        CHECK_THROWS_AS(vector_calculus(conformal_gradient_field(0), v({0, 1, 1})), Error);
    }
}

TEST_CASE("field integrals of grad(cos s) match the hand values") {
    FieldIntegrals I = field_integrals(conformal_gradient_field(0));
    CHECK(rel(I.grad2, grad2_oracle) < 1e-10);
    CHECK(rel(I.div2, div2_oracle) < 1e-10);
    CHECK(rel(I.lie2, lie2_oracle) < 1e-10);
    CHECK(rel(I.ric, ric_oracle) < 1e-10);
    CHECK(rel(I.norm2, 3 * c_int) < 1e-10);
    // the same through chart Christoffels and the chart Ricci form
    ChartPtr c = make_chart("s3_suspension(1)");
    VariationField X = custom_field(c, [](const Vec& x) { return v({-std::sin(x[0]), 0, 0}); });
    FieldIntegrals J = field_integrals(X, product_gauss(*c, 24));
    CHECK(rel(J.grad2, grad2_oracle) < 1e-6);
    CHECK(rel(J.div2, div2_oracle) < 1e-6);
    CHECK(rel(J.lie2, lie2_oracle) < 1e-6);
    CHECK(rel(J.ric, ric_oracle) < 1e-6);
}

TEST_CASE("homothety Hessians") {
    SUBCASE("Killing fields give zero for every form and parameter") {
        for (const auto& X : killing_fields()) {
            FieldIntegrals I = field_integrals(X);
            for (double lam : {0.3, 1.0, 2.0})
                for (double kappa : {0.0, 1.0, 7.0}) {
                    HessianReport h = hessian_homothety(I, X.generator, 3, lam, kappa, HomothetyForm::full);
                    CHECK(std::abs(h.value) < 1e-9);
                }
        }
    }
    SUBCASE("conformal gradient at kappa = 1") {
        VariationField X = conformal_gradient_field(0);
        HessianReport h = hessian_homothety(X, 3, 1.0, 1.0, HomothetyForm::full);
        // (1/2)(1 + 1) 12c - 9c = 3c
        CHECK(rel(h.value, 3 * pi * pi / 2) < 1e-6);
        HessianReport z = hessian_homothety(X, 3, 1 / std::sqrt(2.0), 1.0, HomothetyForm::full);
        CHECK(std::abs(z.value) < 1e-9);
        HessianReport below = hessian_homothety(X, 3, 0.6, 1.0, HomothetyForm::full);
        CHECK(below.value < 0);
    }
    SUBCASE("Dirichlet part is negative, the sigma2 form is half the Lie term") {
        for (const auto& X : conformal_gradient_fields()) {
            HessianReport d = hessian_homothety(X, 3, 1.0, 0.0, HomothetyForm::dirichlet);
            CHECK(rel(d.value, grad2_oracle - ric_oracle) < 1e-8);
            CHECK(d.value < 0);
            HessianReport s = hessian_homothety(X, 3, 1.0, 0.0, HomothetyForm::sigma2);
            CHECK(rel(s.value, 0.5 * lie2_oracle) < 1e-8);
            CHECK(rel(s.alt_value, 0.5 * lie2_oracle) < 1e-8);
            CHECK(s.yano_defect < 1e-6);
        }
    }
    SUBCASE("value is the sum of its terms and the two sigma2 forms agree") {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            VariationField X = fourier_random_field(seed);
            FieldIntegrals I = field_integrals(X);
            for (auto form : {HomothetyForm::sigma2, HomothetyForm::full, HomothetyForm::dirichlet}) {
                HessianReport h = hessian_homothety(I, X.generator, 3, 0.8, 2.0, form);
                CHECK(std::abs(h.value - sum_terms(h)) <= 1e-12 * std::max(1.0, std::abs(h.value)));
                if (form == HomothetyForm::sigma2) CHECK(h.yano_defect < 1e-6);
            }
        }
    }
    SUBCASE("bad parameters") {
        FieldIntegrals I;
        CHECK_THROWS_AS(hessian_homothety(I, "x", 1, 1, 1, HomothetyForm::full), Error);
        CHECK_THROWS_AS(hessian_homothety(I, "x", 3, 0, 1, HomothetyForm::full), Error);
        CHECK_THROWS_AS(hessian_homothety(I, "x", 3, 1, -1, HomothetyForm::full), Error);
        CHECK_THROWS_AS(parse_homothety_form("second"), Error);
        CHECK(parse_homothety_form("dirichlet") == HomothetyForm::dirichlet);
    }
    SUBCASE("charts without a Ricci form are refused") {
        ChartPtr c = deform_metric(make_chart("s3_join(1)"), "squash(2)");
        CHECK_THROWS_AS(hessian_homothety(coordinate_field(c, 0), 3, 1, 1, HomothetyForm::full), Error);
    }
}

TEST_CASE("Hopf-type form") {
    SUBCASE("the Reeb field itself gives zero") {
        HessianReport h = hessian_hopf(reeb_field(), false);
        CHECK(std::abs(h.value) < 1e-10);
        CHECK(std::abs(h.terms[0].second) < 1e-10);
        CHECK(std::abs(h.terms[1].second + h.terms[2].second) < 1e-10);
    }
    SUBCASE("horizontal Killing fields are nonnegative") {
        for (int w : {0, 1}) {
            HessianReport h = hessian_hopf(hopf_horizontal_killing(w));
            CHECK(h.value >= -1e-10);
        }
        CHECK_THROWS_AS(hopf_horizontal_killing(2), Error);
    }
    SUBCASE("random fields are nonnegative within quadrature error") {
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            HessianReport h = hessian_hopf(fourier_random_field(seed));
            CAPTURE(seed);
            CHECK(h.value >= -1e-8);
            CHECK(std::abs(h.value - sum_terms(h)) <= 1e-12 * std::max(1.0, std::abs(h.value)));
        }
    }
    SUBCASE("the form needs a field on the unit sphere") {
        CHECK_THROWS_AS(hessian_hopf(coordinate_field(make_chart("t3_flat"), 0)), Error);
    }
}

TEST_CASE("scale equivariance of every form") {
    const double c = 2.5;
    for (std::uint64_t seed : {11u, 12u}) {
        VariationField X = fourier_random_field(seed), Y = scaled(X, c);
        for (auto form : {HomothetyForm::sigma2, HomothetyForm::full, HomothetyForm::dirichlet}) {
            double a = hessian_homothety(X, 3, 0.9, 1.5, form).value, b = hessian_homothety(Y, 3, 0.9, 1.5, form).value;
            CHECK(std::abs(b - c * c * a) <= 1e-10 * std::max(1.0, std::abs(b)));
        }
        double a = hessian_hopf(X).value, b = hessian_hopf(Y).value;
        CHECK(std::abs(b - c * c * a) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("Yano identity and the pointwise Newton inequality on random fields") {
    std::vector<VariationField> fields;
    for (std::uint64_t seed = 100; seed < 130; ++seed) fields.push_back(fourier_random_field(seed, 1 + seed % 3));
    for (auto& f : killing_fields()) fields.push_back(f);
    for (auto& f : conformal_gradient_fields()) fields.push_back(f);
    for (const auto& X : fields) {
        FieldIntegrals I = field_integrals(X);
        CAPTURE(X.generator);
        CHECK(std::abs(I.yano()) < 1e-6 * I.yano_scale());
        CHECK(I.newton_min >= -1e-10);
        if (X.kind == "conformal-gradient") CHECK(I.newton_max_abs < 1e-8);
    }
}

TEST_CASE("random fields are cut off near the chart singularities") {
    CHECK(cutoff(0.0) == 0);
    CHECK(cutoff(0.05) == 0);
    CHECK(cutoff(pi - 0.04) == 0);
    CHECK(cutoff(0.35) == 1);
    CHECK(cutoff(pi / 2) == 1);
    double prev = 0;
    for (int i = 0; i <= 100; ++i) {
        double u = 0.05 + 0.3 * i / 100, c = cutoff(u);
        CHECK(c >= prev);
        CHECK(std::abs(cutoff(pi - u) - c) < 1e-14);
        prev = c;
    }
    VariationField X = fourier_random_field(3);
    for (double s : {0.01, 0.04, pi - 0.03})
        CHECK(X.components(v({s, 1.0, 2.0})).norm() == doctest::Approx(0).epsilon(1e-14));
    CHECK_THROWS_AS(fourier_random_field(1, 0), Error);
}

TEST_CASE("sphere quadrature converges") {
    QuadratureRule r = sphere_rule();
    double vol = 0;
    for (double w : r.w_nu) vol += w;
    CHECK(rel(vol, 2 * pi * pi) < 1e-12);
    VariationField X = fourier_random_field(21, 3);
    FieldIntegrals a = field_integrals(X, sphere_rule());
    FieldIntegrals b = field_integrals(X, sphere_rule({8, 14, 32, 24}));
    CHECK(rel(a.grad2, b.grad2) < 1e-8);
    CHECK(rel(a.lie2, b.lie2) < 1e-8);
    CHECK(rel(a.div2, b.div2) < 1e-8);
}

TEST_CASE("threshold scan") {
    FieldSet set = make_field_set("killing,conformal,random", 4, 1);
    SUBCASE("kappa = 1") {
        ThresholdResult r = threshold_scan(set, 1.0);
        CHECK(std::abs(r.lambda_star - 1 / std::sqrt(2.0)) < 1e-3);
        CHECK(r.argmin_field.find("conformal-gradient") == 0);
        CHECK(r.scan.size() == 91);
    }
    SUBCASE("kappa = 4") {
        ThresholdResult r = threshold_scan(set, 4.0, 0.1, 2.0);
        CHECK(std::abs(r.lambda_star - 1 / (2 * std::sqrt(2.0))) < 1e-3);
    }
    SUBCASE("large kappa at lambda = 1 is nonnegative on the family") {
        for (std::size_t i = 0; i < set.fields.size(); ++i) {
            HessianReport h = hessian_homothety(set.integrals[i], set.fields[i].generator, 3, 1.0, 1e4, HomothetyForm::full);
            CHECK(h.value >= -1e-8 * 1e4);
        }
    }
    SUBCASE("degenerate and invalid scans") {
        CHECK_THROWS_AS(threshold_scan(make_field_set("killing", 0, 1), 1.0), Error);
        CHECK_THROWS_AS(threshold_scan(set, 0.0), Error);
        CHECK_THROWS_AS(threshold_scan(set, 1.0, 1.0, 0.5), Error);
        CHECK_THROWS_AS(make_field_set("rotations", 0, 1), Error);
        CHECK_THROWS_AS(make_field_set("random", -1, 1), Error);
    }
    SUBCASE("grid entirely above the threshold") {
        ThresholdResult r = threshold_scan(set, 1.0, 0.8, 2.0);
        CHECK(r.lambda_star == 0.8);
    }
}

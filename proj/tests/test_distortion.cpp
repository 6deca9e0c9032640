#include "support.hpp"

#include <algorithm>

using namespace s2;
using t::rel;
using t::v;

namespace {

std::vector<double> sorted_desc(std::vector<double> a) {
    std::sort(a.begin(), a.end(), std::greater<>());
    return a;
}

// elementary symmetric functions of A = g^-1 P via traces and determinant
struct Invariants {
    double s1, s2, s3;
};
Invariants trace_invariants(const Mat& g, const Mat& P) {
    Mat A = g.inverse() * P;
    double tr = A.trace();
    return {tr, 0.5 * (tr * tr - (A * A).trace()), A.rows() == 3 ? A.determinant() : 0.0};
}

// random full Jacobian (n x m) with entries of mixed scale
Mat random_jacobian(std::mt19937_64& rng, int n, int m) {
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<int> e(-2, 2);
    Mat J(n, m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) J(i, j) = u(rng) * std::pow(10.0, e(rng) / 2.0);
    return J;
}

}  // namespace

TEST_CASE("homothety spectrum") {
    for (double lam : {0.5, 1.0, 2.0}) {
        MapPtr m = make_map("identity(" + std::to_string(lam) + ")");
        for (const Vec& x : t::points(*m->domain, 10, 1)) {
            DistortionData d = analyze_point(*m, x);
            for (int i = 0; i < 3; ++i) CHECK(rel(d.lambda2[i], lam * lam) < 1e-13);
            CHECK(d.multiplicity(0) == 3);
        }
    }
}

TEST_CASE("alpha-join contact profile spectrum") {
    MapPtr m = make_map("alpha_join(arccos_cos2,2,1)");
    for (double s : {0.2, 0.6, 1.0, 1.4}) {
        DistortionData d = analyze_point(*m, v({0.3, 1.1, s}));
        double c2 = std::cos(s) * std::cos(s);
        auto want = sorted_desc({4 * c2 / (1 + c2), 1 + c2, 4 * c2});
        for (int i = 0; i < 3; ++i) CHECK(rel(d.lambda2[i], want[i]) < 1e-12);
        int p = product_eigen_index(d);
        REQUIRE(p >= 0);
        double others = 1;
        for (int i = 0; i < 3; ++i)
            if (i != p) others *= d.lambda2[i];
        CHECK(std::abs(d.lambda2[p] - others) < 1e-10 * d.scale());
    }
}

TEST_CASE("Faddeev minimizer spectrum is (k^2, 4, 0) in descending order") {
    for (int k : {2, 4, 6}) {
        MapPtr m = make_map("gamma_hopf(pi2_minus_2s," + std::to_string(k) + ")");
        for (const Vec& x : t::points(*m->domain, 10, 2)) {
            DistortionData d = analyze_point(*m, x);
            auto want = sorted_desc({0.0, 4.0, double(k * k)});
            for (int i = 0; i < 3; ++i) CHECK(std::abs(d.lambda2[i] - want[i]) < 1e-12 * want[0]);
        }
    }
}

TEST_CASE("Henon: lambda_1^2 lambda_2^2 = b^2") {
    for (auto [a, b] : {std::pair{1.4, 0.3}, {0.7, 1.0}, {-0.5, 0.3}}) {
        MapPtr m = make_map("henon(" + std::to_string(a) + "," + std::to_string(b) + ")");
        for (const Vec& x : t::points(*m->domain, 20, 3)) {
            DistortionData d = analyze_point(*m, x);
            CHECK(rel(d.lambda2[0] * d.lambda2[1], b * b) < 1e-11);
            CHECK(rel(d.volume_density, std::abs(b)) < 1e-11);
        }
    }
}

TEST_CASE("torus contactomorphism spectrum lambda_1^2 = lambda_2^2 lambda_3^2 = a^2") {
    for (const char* spec : {"torus_contacto(sin_series(0.3),2)", "torus_contacto(cos_series(0,0.2),1)"}) {
        MapPtr m = make_map(spec);
        double a = m->params.at("a");
        for (const Vec& x : t::points(*m->domain, 30, 4)) {
            DistortionData d = analyze_point(*m, x);
            int p = product_eigen_index(d);
            REQUIRE(p >= 0);
            double others = 1;
            for (int i = 0; i < 3; ++i)
                if (i != p) others *= d.lambda2[i];
            CHECK(std::abs(d.lambda2[p] - a * a) < 1e-8);
            CHECK(std::abs(others - a * a) < 1e-8);
        }
    }
}

TEST_CASE("property: invariants from eigenvalues agree with trace formulas") {
    std::mt19937_64 rng(20240601);
    ChartPtr dom = make_chart("s3_unit_tangent(1)");
    ChartPtr cod = make_chart("s3_join(1.5)");
    for (int trial = 0; trial < 300; ++trial) {
        Vec x = random_point(*dom, rng, 0.05);
        Vec y = random_point(*cod, rng, 0.05);
        Mat J = random_jacobian(rng, 3, 3);
        DistortionData d = analyze_jacobian(*dom, *cod, x, y, J);
        Mat P = J.transpose() * cod->metric(y) * J;
        Invariants I = trace_invariants(dom->metric(x), P);
        CHECK(rel(d.s1(), I.s1) < 1e-10);
        CHECK(std::abs(d.s2() - I.s2) < 1e-10 * d.s1() * d.s1());
        CHECK(std::abs(d.sigma(3) - I.s3) < 1e-10 * std::pow(d.s1(), 3));
        CHECK(d.sigma_check < 1e-10);
        CHECK(d.sigma(0) == 1.0);
        CHECK(d.energy_density == d.s1() / 2);
        // descending, nonnegative
        for (int i = 0; i < 3; ++i) CHECK(d.lambda2[i] >= 0);
        CHECK(d.lambda2[0] >= d.lambda2[1]);
        CHECK(d.lambda2[1] >= d.lambda2[2]);
        // eigenframe: g-orthonormal and diagonalising
        Mat E = d.frame;
        CHECK(t::max_abs(E.transpose() * dom->metric(x) * E - Mat::Identity(3, 3)) < 1e-10);
        Mat D = E.transpose() * P * E;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i != j) CHECK(std::abs(D(i, j)) < 1e-9 * d.s1());
        // volume density against det J
        double v2 = J.determinant() * J.determinant() * cod->metric(y).determinant() / dom->metric(x).determinant();
        CHECK(std::abs(d.volume_density * d.volume_density - v2) < 1e-9 * std::pow(d.s1(), 3));
    }
}

TEST_CASE("property: Newton inequality sigma_2 <= ((r-1)/r) sigma_1^2 / 2") {
    std::mt19937_64 rng(99);
    struct Shape {
        const char *dom, *cod;
    };
    for (Shape sh : {Shape{"s3_join(1)", "s3_suspension(1)"}, Shape{"s3_join(1)", "s2"}, Shape{"t4_flat", "t2_flat"},
                     Shape{"heisenberg", "heisenberg"}, Shape{"s2", "t3_flat"}}) {
        ChartPtr D = make_chart(sh.dom), N = make_chart(sh.cod);
        for (int trial = 0; trial < 200; ++trial) {
            Vec x = random_point(*D, rng, 0.05), y = random_point(*N, rng, 0.05);
            Mat J = random_jacobian(rng, N->dim, D->dim);
            if (trial % 10 == 0) J.col(0).setZero();  // rank deficient
            DistortionData d = analyze_jacobian(*D, *N, x, y, J);
            CHECK(newton_slack(d, N->dim) >= -1e-12 * d.s1() * d.s1());
        }
    }
    // equality exactly on homotheties
    MapPtr id = make_map("identity(0.7)");
    for (const Vec& x : t::points(*id->domain, 10, 5)) {
        DistortionData d = analyze_point(*id, x);
        CHECK(std::abs(newton_slack(d, 3)) < 1e-9 * d.s1() * d.s1());
    }
    // strict for a non-homothety
    DistortionData a = analyze_point(*make_map("alpha_join(arccos_cos2,2,1)"), v({0.1, 0.2, 0.7}));
    CHECK(newton_slack(a, 3) > 1e-3);
}

TEST_CASE("four-energy density") {
    DistortionData id = analyze_point(*make_map("identity(1)"), v({0.2, 0.4, 0.6}));
    CHECK(four_energy_density(id) == doctest::Approx(9.0 / 4).epsilon(1e-14));
    DistortionData h = analyze_point(*make_map("gamma_hopf(pi2_minus_2s,2)"), v({0.2, 0.4, 0.6}));
    CHECK(four_energy_density(h) == doctest::Approx(16.0).epsilon(1e-13));
    DistortionData c = analyze_point(*make_map("constant(s3)"), v({0.2, 0.4, 0.6}));
    CHECK(four_energy_density(c) == 0.0);
    CHECK(c.s2() == 0.0);
}

TEST_CASE("classification flags") {
    auto grid_of = [](const MapPtr& m) { return sample_grid(*m->domain, 5, 0.1); };
    MapPtr id = make_map("identity(2)");
    ClassFlags f = classify(*id, grid_of(id));
    CHECK(f.homothetic.flag);
    CHECK(f.hwc.flag);
    CHECK(f.homothetic.value == doctest::Approx(4.0));

    MapPtr h = make_map("gamma_hopf(pi2_minus_2s,2)");
    ClassFlags g = classify(*h, grid_of(h));
    CHECK(g.hwc.flag);
    CHECK(g.hwc.value == doctest::Approx(4.0));
    CHECK_FALSE(classify(*make_map("gamma_hopf(pi2_minus_2s,4)"), grid_of(h)).hwc.flag);

    MapPtr a = make_map("alpha_join(arccos_cos2,2,1)");
    ClassFlags c = classify(*a, grid_of(a));
    CHECK(c.contact_spectrum.flag);
    CHECK_FALSE(c.contact_constant.flag);
    CHECK_FALSE(c.hwc.flag);

    MapPtr tc = make_map("torus_contacto(sin_series(0.3),2)");
    ClassFlags tf = classify(*tc, grid_of(tc));
    CHECK(tf.contact_spectrum.flag);
    CHECK(tf.contact_constant.flag);
    CHECK(tf.contact_constant.value == doctest::Approx(4.0));

    MapPtr hd = make_map("heis_dilation(2)");
    CHECK(classify(*hd, grid_of(hd)).contact_constant.flag);

    MapPtr hn = make_map("henon(1.4,0.3)");
    ClassFlags hf = classify(*hn, grid_of(hn));
    CHECK(hf.area_preserving.flag);
    CHECK(hf.area_preserving.value == doctest::Approx(0.3));

    MapPtr p = make_map("alpha_hopf(2s,1,1)");
    CHECK(classify(*p, grid_of(p)).hwc.flag);
    MapPtr q = make_map("alpha_hopf(2s,2,1)");
    CHECK_FALSE(classify(*q, grid_of(q)).hwc.flag);
    MapPtr qd = with_domain(q, deform_metric(q->domain, "hopf_squash(2,1)"));
    CHECK(classify(*qd, grid_of(qd)).hwc.flag);
}

TEST_CASE("Reeb direction is found in the spectrum") {
    MapPtr h = make_map("heis_dilation(2)");
    for (const Vec& x : t::points(*h->domain, 10, 3)) {
        DistortionData d = analyze_point(*h, x);
        int r = reeb_eigen_index(*h->domain, d);
        REQUIRE(r >= 0);
        CHECK(rel(d.lambda2[r], 16.0) < 1e-12);
    }
    // the alpha-join pullback is diagonal in (d1, d2, ds), so xi = d1 - d2 is not an eigenvector
    MapPtr a = make_map("alpha_join(arccos_cos2,2,1)");
    CHECK(reeb_eigen_index(*a->domain, analyze_point(*a, v({0.3, 0.2, 0.5}))) == -1);
}

TEST_CASE("spectrum is invariant under isometries of the flat torus") {
    MapPtr m = make_map("torus_contacto(sin_series(0.3),2)");
    ChartPtr T = m->domain;
    // translation in x, y and a swap of the first two axes
    auto iso = [](const Vec& x) { return v({x[1] + 0.7, x[0] - 1.3, x[2]}); };
    Mat P = Mat::Zero(3, 3);
    P(0, 1) = P(1, 0) = P(2, 2) = 1;
    MapPtr c = make_custom_map(
        "composed", T, m->codomain, [m, iso](const Vec& x) { return m->eval(iso(x)); },
        [m, iso, P](const Vec& x) { return Mat(m->jac(iso(x)) * P); });
    for (const Vec& x : t::points(*T, 30, 6)) {
        DistortionData a = analyze_point(*c, x), b = analyze_point(*m, iso(x));
        for (int i = 0; i < 3; ++i) CHECK(std::abs(a.lambda2[i] - b.lambda2[i]) < 1e-10 * a.scale());
    }
}

TEST_CASE("eigenvalue branches stay continuous through crossings") {
    MapPtr m = make_map("alpha_join(arccos_cos2,2,1)");
    std::vector<Vec> sweep;
    for (int i = 0; i < 200; ++i) sweep.push_back(v({0.5, 0.5, 0.01 + (pi / 2 - 0.02) * i / 199.0}));
    auto br = eigenvalue_branches(*m, sweep);
    REQUIRE(br.size() == sweep.size());
    double jump = 0;
    for (std::size_t i = 1; i < br.size(); ++i) jump = std::max(jump, t::max_abs(br[i] - br[i - 1]));
    CHECK(jump < 0.1);
    // the 4cos^2 s branch (largest at s = 0) ends as the smallest
    int top = 0;
    for (int a = 0; a < 3; ++a)
        if (br.front()[a] > br.front()[top]) top = a;
    CHECK(br.back()[top] < 1e-3);
}

TEST_CASE("non-finite Jacobians are rejected") {
    ChartPtr D = make_chart("t3_flat");
    Mat J = Mat::Identity(3, 3);
    J(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(analyze_jacobian(*D, *D, v({1, 1, 1}), v({1, 1, 1}), J), Error);
}

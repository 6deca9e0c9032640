#include "support.hpp"

using namespace s2;
using t::rel;
using t::v;

namespace {

ResidualReport residual(const std::string& system, const std::string& spec, const std::string& deform = "") {
    MapPtr m = make_map(spec);
    if (!deform.empty()) m = with_domain(m, deform_metric(m->domain, deform));
    return residual_by_name(system, *m);
}

}  // namespace

TEST_CASE("families certified critical have vanishing residuals") {
    struct Case {
        const char *system, *map, *deform;
    };
    for (const Case& c : {Case{"fh", "henon(1.4,0.3)", ""}, Case{"fh", "henon(0.7,1)", ""}, Case{"fh", "henon(-2,0.3)", ""},
                          Case{"fh", "gamma_hopf(pi2_minus_2s,2)", ""}, Case{"fh", "gamma_hopf(pi2_plus_2s,2)", ""},
                          Case{"fh", "gamma_hopf(pi2_minus_2s,4)", ""}, Case{"fh", "degree_k_sphere_map(3)", ""},
                          Case{"fourharm", "gamma_hopf(pi2_minus_2s,2)", ""}, Case{"fourharm", "identity(2)", ""},
                          Case{"fourharm", "alpha_hopf(2s,1,1)", "hopf_squash(1,1)"},
                          Case{"fourharm", "alpha_hopf(2s,2,1)", "hopf_squash(2,1)"},
                          Case{"fourharm", "alpha_hopf(2s,2,3)", "hopf_squash(2,3)"}, Case{"sig3", "identity(1)", ""},
                          Case{"sig3", "identity(0.5, s3_suspension)", ""}, Case{"sig3", "identity(2, s3_unit_tangent)", ""},
                          Case{"contactsig3", "heis_dilation(0.5)", ""}, Case{"contactsig3", "heis_dilation(2)", ""},
                          Case{"contactsig3", "torus_contacto(zero,2)", ""}, Case{"contactsig3", "identity(1)", ""},
                          Case{"harmonic", "identity(1)", ""}}) {
        ResidualReport r = residual(c.system, c.map, c.deform);
        CAPTURE(std::string(c.system) + " " + c.map + " " + c.deform);
        CHECK(r.tol == 1e-6);
        CHECK(r.sup_all() < 1e-6);
        CHECK(r.critical);
        CHECK(r.grid.size() >= 64);
    }
}

TEST_CASE("non-critical controls") {
    // a linear profile that misses pi/2 - 2s: lambda_2^2 lambda_3^2 is not constant
    CHECK(residual("fh", "gamma_hopf(linear(1.5,-2),2)").sup_all() > 1e-2);
    ResidualReport a = residual("sig3", "alpha_join(arccos_cos2,2,1)");
    CHECK(a.sup_all() > 0.01);
    CHECK_FALSE(a.critical);
    CHECK(residual("fh", "henon(1.4,0.3)").critical);
}

TEST_CASE("alpha-join: the sigma_2 system reduces to the s-equation") {
    MapPtr m = make_map("alpha_join(arccos_cos2,2,1)");
    Profile a = Profile::parse("arccos_cos2");
    ResidualOptions o;
    for (double s : {0.15, 0.4, 0.75, 1.1, 1.4}) o.grid.push_back(v({0.4, 2.9, s}));
    ResidualReport r = residual_3target(*m, o);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        DistortionData d = analyze_point(*m, r.grid[i]);
        int js = -1;
        for (int j = 0; j < 3; ++j)
            if (std::abs(std::abs(d.frame(2, j)) - 1) < 1e-12) js = j;
        REQUIRE(js >= 0);
        double s = r.grid[i][2];
        for (int j = 0; j < 3; ++j) {
            if (j == js) CHECK(std::abs(std::abs(r.residuals[i][j]) - std::abs(alpha_join_s_equation(a, 2, 1, s))) < 1e-7);
            else CHECK(std::abs(r.residuals[i][j]) < 1e-9);
        }
        const ResidualReport* harm = nullptr;
        for (const auto& c : r.companions)
            if (c.system == "harmonic") harm = &c;
        REQUIRE(harm);
        CHECK(std::abs(std::abs(harm->residuals[i][js]) - std::abs(alpha_join_s_harmonic(a, 2, 1, s))) < 1e-7);
    }
    // alpha = s, k = l = 1 is the identity: both parts vanish
    Profile id = Profile::parse("s");
    for (double s : {0.2, 0.8, 1.3}) {
        CHECK(std::abs(alpha_join_s_equation(id, 1, 1, s)) < 1e-12);
        CHECK(std::abs(alpha_join_s_harmonic(id, 1, 1, s)) < 1e-12);
    }
}

TEST_CASE("Nomizu ODE") {
    ResidualReport r1 = nomizu_residual(Profile::parse("s"), 1, 64);
    CHECK(r1.sup_all() < 1e-6);
    CHECK(r1.critical);
    CHECK(r1.info.at("boundary_ok") == 1.0);
    ResidualReport r3 = nomizu_residual(Profile::parse("s"), 3, 64);
    CHECK(r3.sup_all() > 0.1);
    ResidualReport z = nomizu_residual(Profile::parse("zero"), 3, 64);
    CHECK(z.sup_all() == 0.0);
    CHECK(z.info.at("boundary_ok") == 0.0);
    CHECK_THROWS_AS(nomizu_residual(Profile::parse("s"), 2, 64), Error);
    for (const Vec& x : r1.grid) CHECK(x[0] < pi / 4 - 1e-3);
}

TEST_CASE("torus contactomorphisms are harmonic and sigma_2 critical together") {
    for (int k : {2, 3, 5}) {
        std::string spec = "torus_contacto(zero," + std::to_string(std::sqrt(double(k))) + ")";
        MapPtr m = make_map(spec);
        ResidualReport h = residual_harmonic(*m);
        ResidualReport s = residual_sigma2(*m);
        CHECK(std::max(h.sup_all(), s.sup_all()) < 1e-6);
    }
}

TEST_CASE("property: residual norms are invariant under eigenframe sign flips") {
    struct Case {
        const char *system, *map;
    };
    for (const Case& c : {Case{"sig3", "alpha_join(arccos_cos2,2,1)"}, Case{"fh", "gamma_hopf(linear(1.5,-2),2)"},
                          Case{"sig3", "suspension(s,2)"}, Case{"contactsig3", "torus_contacto(sin_series(0.3),2)"},
                          Case{"harmonic", "nomizu(s,3)"}}) {
        MapPtr m = make_map(c.map);
        ResidualOptions base;
        base.grid = t::points(*m->domain, 12, 41, 0.1);
        ResidualReport r0 = residual_by_name(c.system, *m, base);
        CAPTURE(std::string(c.map));
        for (unsigned mask = 1; mask < (1u << m->domain->dim); ++mask) {
            ResidualOptions o = base;
            o.flip_mask = mask;
            ResidualReport r = residual_by_name(c.system, *m, o);
            REQUIRE(r.sup.size() == r0.sup.size());
            for (std::size_t e = 0; e < r.sup.size(); ++e) {
                CHECK(std::abs(r.sup[e] - r0.sup[e]) < 1e-9 * std::max(1.0, r0.sup[e]));
                CHECK(std::abs(r.l2[e] - r0.l2[e]) < 1e-9 * std::max(1.0, r0.l2[e]));
            }
        }
    }
}

TEST_CASE("report norms and verdicts") {
    ResidualReport r = residual("sig3", "alpha_join(arccos_cos2,2,1)");
    auto sup = r.sup;
    auto l2 = r.l2;
    r.finalize();
    CHECK(sup == r.sup);
    CHECK(l2 == r.l2);
    // monotone in the tolerance
    bool prev = false;
    for (double tol : {1e-8, 1e-4, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
        r.tol = tol;
        r.finalize();
        if (prev) CHECK(r.critical);
        prev = r.critical;
    }
    CHECK(prev);
}

TEST_CASE("finite-difference Jacobians use the looser tolerance") {
    MapPtr m = finite_difference_version(make_map("henon(1.4,0.3)"));
    ResidualReport r = residual_2target(*m);
    CHECK(r.tol == 1e-4);
    CHECK(r.critical);
}

TEST_CASE("systems refuse maps outside their hypotheses") {
    auto code = [](const std::string& system, const std::string& spec) {
        try {
            residual(system, spec);
        } catch (const Error& e) {
            return e.code();
        }
        return Errc::internal;
    };
    CHECK(code("fh", "identity(1)") != Errc::internal);
    CHECK(code("sig3", "gamma_hopf(pi2_minus_2s,2)") != Errc::internal);
    CHECK(code("fourharm", "gamma_hopf(pi2_minus_2s,4)") != Errc::internal);  // not horizontally conformal
    CHECK(code("fourharm", "alpha_hopf(2s,2,1)") != Errc::internal);          // needs g_{k,l}
    CHECK(code("contactsig3", "alpha_join(s,2,1)") != Errc::internal);
    CHECK(code("no_such_system", "identity(1)") == Errc::invalid_argument);
}

TEST_CASE("biconformal invariance") {
    SUBCASE("sigma = rho = 1 reproduces the residuals bit for bit") {
        MapPtr m = make_map("t4_shear_projection(0.5,1)");
        ConformalReport c = conformal_invariance_check(m, [](const Vec&) { return 1.0; }, [](const Vec&) { return 1.0; });
        CHECK(c.identical);
        CHECK(c.max_mismatch == 0.0);
    }
    SUBCASE("m = 4 conformal changes") {
        MapPtr m = make_map("t4_shear_projection(0.5,1)");
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            ScalarFn s = random_conformal_factor(4, seed);
            ConformalReport c = conformal_invariance_check(m, s, s);
            CHECK(c.max_mismatch < 1e-5);
            CHECK(c.residual_before > 1e-3);  // the check is not vacuous
        }
    }
    SUBCASE("(3, 2) with rho = sigma^2 keeps the Hopf map critical") {
        MapPtr m = make_map("gamma_hopf(pi2_minus_2s,2)");
        auto check = [&](std::uint64_t seed, double tol, double res_tol) {
            ScalarFn s = random_conformal_factor(3, seed);
            ScalarFn r = [s](const Vec& x) { return s(x) * s(x); };
            ConformalReport c = conformal_invariance_check(m, s, r);
            CAPTURE(seed);
            CHECK(c.max_mismatch < tol);
            CHECK(c.residual_after < res_tol);
            return c;
        };
        for (std::uint64_t seed : {101u, 102u, 103u}) check(seed, 1e-6, 1e-5);
        // worst node sits next to the degenerate circle s = pi/4 of the chart
        check(5, 1e-5, 1e-4);
    }
    SUBCASE("random conformal factors are positive and seeded") {
        ScalarFn a = random_conformal_factor(3, 9), b = random_conformal_factor(3, 9), c = random_conformal_factor(3, 10);
        Vec x = v({0.3, 1.2, 2.0});
        CHECK(a(x) == b(x));
        CHECK(a(x) != c(x));
        CHECK(a(x) > 0);
    }
}

TEST_CASE("profile minimiser recovers the identity for k = l = 1") {
    ProfileOptions o;
    o.k = 1;
    o.l = 1;
    o.n_prof = 48;
    ProfileResult p = minimize_profile(o);
    CHECK(p.converged);
    CHECK(std::abs(p.radius.ratio - 1) < 1e-4);
    double err = 0;
    for (std::size_t i = 0; i < p.s.size(); ++i) err = std::max(err, std::abs(p.alpha[i] - p.s[i]));
    CHECK(err < 1e-3);
    // pinned boundary
    CHECK(p.alpha.front() == 0.0);
    CHECK(std::abs(p.alpha.back() - pi / 2) < 1e-15);
    // the logged objective never increases
    for (std::size_t i = 1; i < p.log.size(); ++i) CHECK(p.log[i].ratio <= p.log[i - 1].ratio + 1e-12);
}

TEST_CASE("profile minimiser validates its options") {
    ProfileOptions o;
    o.n_prof = 8;
    CHECK_THROWS_AS(minimize_profile(o), Error);
    ProfileOptions p;
    p.init = "no_profile";
    CHECK_THROWS_AS(minimize_profile(p), Error);
}

#include "sigma2/sigma2.h"

#include "sigma2/run.hpp"

#include <cstring>

struct s2_chart {
    s2::ChartPtr c;
};

struct s2_map {
    s2::MapPtr m;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_summary;

s2_status code(s2::Errc e) {
    switch (e) {
        case s2::Errc::invalid_argument: return S2_ERR_INVALID_ARGUMENT;
        case s2::Errc::domain: return S2_ERR_DOMAIN;
        case s2::Errc::numerical: return S2_ERR_NUMERICAL;
        case s2::Errc::io: return S2_ERR_IO;
        case s2::Errc::config: return S2_ERR_CONFIG;
        case s2::Errc::internal: return S2_ERR_INTERNAL;
    }
    return S2_ERR_INTERNAL;
}

template <class Fn>
s2_status guard(Fn fn) {
    try {
        fn();
        last_error.clear();
        return S2_OK;
    } catch (const s2::Error& e) {
        last_error = e.what();
        return code(e.code());
    } catch (const std::exception& e) {
        last_error = std::string("internal: ") + e.what();
        return S2_ERR_INTERNAL;
    } catch (...) {
        last_error = "internal: unknown exception";
        return S2_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) s2::fail(s2::Errc::invalid_argument, std::string(what) + " is NULL");
}

s2::Vec point(const double* x, int d) {
    s2::Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = x[i];
    return v;
}

}  // namespace

extern "C" {

const char* s2_last_error(void) { return last_error.c_str(); }
const char* s2_last_summary(void) { return last_summary.c_str(); }
const char* s2_version(void) { return "1.0.0"; }

const char* s2_default_config(void) {
    static const std::string text = [] {
        std::string t;
        for (const auto& k : s2::config_keys()) t += "# " + k.doc + "\n" + k.key + " = " + k.dflt + "\n";
        return t;
    }();
    return text.c_str();
}

s2_status s2_chart_create(const char* spec, s2_chart** out) {
    return guard([&] {
        need(spec, "spec");
        need(out, "out");
        *out = new s2_chart{s2::make_chart(spec)};
    });
}

s2_status s2_chart_dim(const s2_chart* c, int* dim) {
    return guard([&] {
        need(c, "chart");
        need(dim, "dim");
        *dim = c->c->dim;
    });
}

s2_status s2_chart_metric(const s2_chart* c, const double* x, double* g) {
    return guard([&] {
        need(c, "chart");
        need(x, "x");
        need(g, "g");
        const int d = c->c->dim;
        s2::Mat G = c->c->metric(point(x, d));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g[i * d + j] = G(i, j);
    });
}

void s2_chart_destroy(s2_chart* c) { delete c; }

s2_status s2_map_create(const char* spec, const char* deform, s2_map** out) {
    return guard([&] {
        need(spec, "spec");
        need(out, "out");
        s2::MapPtr m = s2::make_map(spec);
        if (deform && *deform) m = s2::with_domain(m, s2::deform_metric(m->domain, deform));
        *out = new s2_map{m};
    });
}

s2_status s2_map_dims(const s2_map* m, int* domain_dim, int* codomain_dim) {
    return guard([&] {
        need(m, "map");
        if (domain_dim) *domain_dim = m->m->domain->dim;
        if (codomain_dim) *codomain_dim = m->m->codomain->dim;
    });
}

s2_status s2_map_evaluate(const s2_map* m, const double* x, double* y) {
    return guard([&] {
        need(m, "map");
        need(x, "x");
        need(y, "y");
        s2::Vec v = m->m->eval(point(x, m->m->domain->dim));
        for (int i = 0; i < v.size(); ++i) y[i] = v[i];
    });
}

s2_status s2_map_jacobian(const s2_map* m, const double* x, double* J) {
    return guard([&] {
        need(m, "map");
        need(x, "x");
        need(J, "J");
        const int d = m->m->domain->dim, n = m->m->codomain->dim;
        s2::Mat A = s2::jacobian(*m->m, point(x, d));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) J[i * d + j] = A(i, j);
    });
}

void s2_map_destroy(s2_map* m) { delete m; }

s2_status s2_analyze_point(const s2_map* m, const double* x, double* lambda2, double* sigma) {
    return guard([&] {
        need(m, "map");
        need(x, "x");
        s2::DistortionData d = s2::analyze_point(*m->m, point(x, m->m->domain->dim));
        if (lambda2)
            for (int i = 0; i < d.lambda2.size(); ++i) lambda2[i] = d.lambda2[i];
        if (sigma)
            for (int i = 0; i < d.sigma.size(); ++i) sigma[i] = d.sigma(i);
    });
}

s2_status s2_energy(const s2_map* m, double kappa, s2_energy_result* out) {
    return guard([&] {
        need(m, "map");
        need(out, "out");
        s2::QuadratureRule rule = s2::default_rule(*m->m);
        s2::EnergyReport e = s2::integrate_energy(*m->m, rule, kappa);
        s2::bounds_report(*m->m, e, rule);
        *out = {e.e_sigma1,       e.e_sigma2,      e.e_4,           e.e_total,          e.volume,
                e.charge.raw,     e.charge.snapped, e.charge.snapped_ok, e.bound.value, e.bound.slack,
                e.bound.attained};
    });
}

s2_status s2_minimize_radius(const s2_map* m, double kappa, s2_radius_result* out) {
    return guard([&] {
        need(m, "map");
        need(out, "out");
        s2::RadiusOpt o = s2::minimize_over_radius(*m->m, kappa);
        *out = {o.r_star, o.e_min, o.ratio, o.ratio_total, o.gs_rel_err};
    });
}

s2_status s2_degree(const s2_map* m, double* raw, double* snapped) {
    return guard([&] {
        need(m, "map");
        s2::Charge c = s2::degree(*m->m, s2::default_rule(*m->m));
        if (!c.snapped_ok && !c.note.empty()) s2::fail(s2::Errc::domain, c.note);
        if (raw) *raw = c.raw;
        if (snapped) *snapped = c.snapped;
    });
}

s2_status s2_hopf_invariant(const s2_map* m, double* raw, double* snapped) {
    return guard([&] {
        need(m, "map");
        s2::Charge c = s2::hopf_invariant(*m->m, s2::default_rule(*m->m));
        if (!c.snapped_ok && !c.note.empty()) s2::fail(s2::Errc::domain, c.note);
        if (raw) *raw = c.raw;
        if (snapped) *snapped = c.snapped;
    });
}

s2_status s2_residual(const s2_map* m, const char* system, double* sup, int* critical) {
    return guard([&] {
        need(m, "map");
        need(system, "system");
        s2::ResidualReport r = s2::residual_by_name(system, *m->m);
        if (sup) *sup = r.sup_all();
        if (critical) *critical = r.critical;
    });
}

s2_status s2_run(const char* command, const char* config_text, const char* config_name, const char* out_dir,
                 uint64_t seed, int has_seed, int* exit_code) {
    if (exit_code) *exit_code = 1;
    return guard([&] {
        need(command, "command");
        s2::RunConfig cfg = s2::parse_config(config_text ? config_text : "", config_name ? config_name : "<config>");
        if (has_seed) cfg.set("seed", std::to_string(seed));
        if (out_dir) cfg.set("out", out_dir);
        s2::RunResult r = s2::execute(command, cfg);
        s2::write_outputs(cfg.str("out"), cfg, r);
        last_summary.clear();
        for (const auto& s : r.summary) last_summary += s + "\n";
        if (exit_code) *exit_code = r.exit_code;
    });
}

}  // extern "C"

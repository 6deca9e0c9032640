#include "sigma2/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

namespace s2 {

namespace {

MapPtr config_map(const RunConfig& cfg) {
    MapPtr m = make_map(cfg.str("map"));
    std::string d = cfg.str("domain.deform");
    if (d != "none") m = with_domain(m, deform_metric(m->domain, d));
    return m;
}

int positive(const RunConfig& cfg, const std::string& key) {
    long v = cfg.integer(key);
    if (v < 1) fail(Errc::config, "key '" + key + "' must be >= 1");
    return static_cast<int>(v);
}

QuadOrders config_orders(const RunConfig& cfg) {
    QuadOrders q;
    q.order_1d = positive(cfg, "quad.order_1d");
    q.order_3d = positive(cfg, "quad.order_3d");
    q.order_radial = positive(cfg, "quad.order_radial");
    q.order_4d = positive(cfg, "quad.order_4d");
    return q;
}

json config_json(const RunConfig& cfg) {
    json j;
    for (const auto& [k, v] : cfg.values) j[k] = v;
    return j;
}

bool is_s3_family(const Chart& c) { return c.family.rfind("s3_", 0) == 0; }

std::vector<Vec> analysis_grid(const RunConfig& cfg, const MapFamily& m) {
    long n = cfg.integer("grid.n");
    if (n < 0) fail(Errc::config, "key 'grid.n' must be >= 0");
    const Chart& c = *m.domain;
    if (n == 0) n = c.dim <= 2 ? 16 : c.dim == 3 ? 6 : 4;
    return sample_grid(c, static_cast<int>(n), 0.1);
}

// ordered sweep along the first active axis through the chart centre
std::vector<Vec> sweep(const MapFamily& m, int n) {
    const Chart& c = *m.domain;
    int a = 0;
    while (a < c.dim && std::find(m.passive_axes.begin(), m.passive_axes.end(), a) != m.passive_axes.end()) ++a;
    if (a == c.dim) a = 0;
    std::vector<Vec> out;
    for (int i = 0; i < n; ++i) {
        Vec x(c.dim);
        for (int b = 0; b < c.dim; ++b) x[b] = c.ranges[b].lo + 0.3719 * c.ranges[b].length();
        double mg = c.periodic[a] ? 0.0 : 0.05;
        x[a] = c.ranges[a].lo + c.ranges[a].length() * (mg + (1 - 2 * mg) * (i + 0.5) / n);
        out.push_back(x);
    }
    return out;
}

RunResult run_analyze(const RunConfig& cfg) {
    RunResult r;
    MapPtr m = config_map(cfg);
    auto grid = analysis_grid(cfg, *m);
    std::vector<DistortionData> pts(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { pts[i] = analyze_point(*m, grid[i]); });
    const int d = m->domain->dim;
    const int n = m->codomain->dim;
    Table t;
    t.name = "points";
    for (int a = 0; a < d; ++a) t.header.push_back("x" + std::to_string(a));
    for (int a = 0; a < d; ++a) t.header.push_back("lambda2_" + std::to_string(a));
    for (auto h : {"sigma1", "sigma2", "energy_density", "newton_slack"}) t.header.push_back(h);
    double worst_newton = 0, worst_check = 0;
    for (const auto& p : pts) {
        std::vector<std::string> row;
        for (int a = 0; a < d; ++a) row.push_back(fmt(p.x[a]));
        for (int a = 0; a < d; ++a) row.push_back(fmt(p.lambda2[a]));
        double sl = newton_slack(p, n);
        row.push_back(fmt(p.s1()));
        row.push_back(fmt(p.s2()));
        row.push_back(fmt(p.energy_density));
        row.push_back(fmt(sl));
        t.add(std::move(row));
        worst_newton = std::min(worst_newton, sl / (p.scale() * p.scale()));
        worst_check = std::max(worst_check, p.sigma_check);
    }
    ClassFlags f = classify(*m, grid);
    json res;
    res["map"] = m->spec;
    res["domain"] = m->domain->name;
    res["codomain"] = m->codomain->name;
    res["jacobian"] = m->analytic() ? "analytic" : "finite-difference";
    res["points"] = grid.size();
    res["classification"] = to_json(f);
    res["newton_min_relative_slack"] = worst_newton;
    res["sigma_check_max"] = worst_check;
    res["sample"] = to_json(pts.front());
    r.report = res;
    r.tables.push_back(std::move(t));

    auto sw = sweep(*m, 129);
    auto br = eigenvalue_branches(*m, sw);
    Table p;
    p.name = "eigen_branches";
    p.header = {"x"};
    for (int a = 0; a < d; ++a) p.header.push_back("lambda2_branch" + std::to_string(a));
    int ax = 0;
    for (int a = 0; a < d; ++a)
        if (sw.size() > 1 && sw[0][a] != sw[1][a]) ax = a;
    for (std::size_t i = 0; i < sw.size(); ++i) {
        std::vector<std::string> row{fmt(sw[i][ax])};
        for (int a = 0; a < d; ++a) row.push_back(fmt(br[i][a]));
        p.add(std::move(row));
    }
    r.plots.push_back(std::move(p));
    r.summary.push_back("analyzed " + std::to_string(grid.size()) + " points of " + m->spec);
    r.summary.push_back(std::string("homothetic: ") + (f.homothetic.flag ? "yes" : "no") +
                        ", horizontally weakly conformal: " + (f.hwc.flag ? "yes" : "no"));
    return r;
}

RunResult run_energy(const RunConfig& cfg) {
    RunResult r;
    MapPtr m = config_map(cfg);
    QuadOrders q = config_orders(cfg);
    double kappa = cfg.real("kappa");
    if (!(kappa >= 0)) fail(Errc::config, "key 'kappa' must be >= 0");
    QuadratureRule rule = default_rule(*m, q);
    EnergyReport e = integrate_energy(*m, rule, kappa);
    bounds_report(*m, e, rule);
    std::string note;
    if (is_s3_family(*m->domain) && e.e_sigma1 > 0 && e.e_sigma2 > 0 && kappa > 0) {
        e.radius_opt = minimize_over_radius(*m, kappa, q);
    } else {
        note = "radius minimisation skipped (needs a 3-sphere domain, kappa > 0 and both energies nonzero)";
    }
    json res = to_json(e);
    if (!note.empty()) res["note"] = note;
    r.report = res;
    Table t;
    t.name = "energy";
    t.header = {"quantity", "value"};
    t.add({"e_sigma1", fmt(e.e_sigma1)});
    t.add({"e_sigma2", fmt(e.e_sigma2)});
    t.add({"e_4", fmt(e.e_4)});
    t.add({"e_total", fmt(e.e_total)});
    t.add({"volume", fmt(e.volume)});
    t.add({"charge_raw", fmt(e.charge.raw)});
    t.add({"bound", fmt(e.bound.value)});
    if (e.radius_opt) {
        t.add({"r_star", fmt(e.radius_opt->r_star)});
        t.add({"e_min", fmt(e.radius_opt->e_min)});
        t.add({"ratio", fmt(e.radius_opt->ratio)});
        Table p;
        p.name = "energy_vs_radius";
        p.header = {"R", "E"};
        const RadiusOpt& o = *e.radius_opt;
        for (int i = 0; i <= 100; ++i) {
            double R = o.r_star * std::pow(8.0, (i - 50) / 50.0);
            p.add({fmt(R), fmt(o.a * R + kappa * o.b / R)});
        }
        r.plots.push_back(std::move(p));
    }
    r.tables.push_back(std::move(t));
    r.summary.push_back("E_sigma1 = " + fmt(e.e_sigma1) + ", E_sigma2 = " + fmt(e.e_sigma2));
    if (e.radius_opt) r.summary.push_back("radius-minimised ratio = " + fmt(e.radius_opt->ratio));
    return r;
}

RunResult run_critical(const RunConfig& cfg) {
    RunResult r;
    std::string system = cfg.str("system");
    ResidualReport rep;
    if (system == "nomizu") {
        Spec sp = parse_spec(cfg.str("map"));
        if (sp.name != "nomizu") fail(Errc::config, "system 'nomizu' needs a nomizu(alpha, k) map");
        Profile a = Profile::parse(sp.str("alpha", 0, "s"));
        int k = static_cast<int>(sp.integer("k", 1, 1));
        double tol = cfg.real("tol.crit");
        rep = nomizu_residual(a, k, 64, tol < 0 ? 1e-6 : tol);
    } else {
        MapPtr m = config_map(cfg);
        ResidualOptions o;
        o.tol = cfg.real("tol.crit");
        o.kappa = cfg.real("kappa");
        if (cfg.integer("grid.n") > 0) o.grid = analysis_grid(cfg, *m);
        rep = residual_by_name(system, *m, o);
    }
    r.report = to_json(rep);
    r.tables.push_back(residual_table(rep));
    for (const auto& c : rep.companions) r.tables.push_back(residual_table(c));
    r.summary.push_back(rep.system + " residual sup = " + fmt(rep.sup_all()) + " (tol " + fmt(rep.tol) +
                        "): " + (rep.critical ? "critical" : "not critical"));
    return r;
}

RunResult run_profile(const RunConfig& cfg) {
    RunResult r;
    ProfileOptions o;
    o.k = static_cast<int>(cfg.integer("profile.k"));
    o.l = static_cast<int>(cfg.integer("profile.l"));
    o.kappa = cfg.real("kappa");
    o.n_prof = positive(cfg, "profile.n");
    o.max_iter = positive(cfg, "profile.max_iter");
    o.log_every = positive(cfg, "profile.log_every");
    std::string init = cfg.str("profile.init");
    if (init != "auto") o.init = init;
    ProfileResult p = minimize_profile(o);
    r.report = to_json(p);
    Table prof;
    prof.name = "profile";
    prof.header = {"s", "alpha"};
    for (std::size_t i = 0; i < p.s.size(); ++i) prof.add({fmt(p.s[i]), fmt(p.alpha[i])});
    Table log;
    log.name = "iterations";
    log.header = {"iter", "ratio", "grad_norm", "step", "sigma2_residual", "coupled_residual"};
    for (const auto& l : p.log)
        log.add({fmt(l.iter), fmt(l.ratio), fmt(l.grad_norm), fmt(l.step), fmt(l.sigma2_residual),
                 fmt(l.coupled_residual)});
    Table plot;
    plot.name = "profile_vs_ansatz";
    plot.header = {"s", "alpha", "arccos_cos2"};
    for (std::size_t i = 0; i < p.s.size(); ++i)
        plot.add({fmt(p.s[i]), fmt(p.alpha[i]), fmt(std::acos(std::cos(p.s[i]) * std::cos(p.s[i])))});
    Table descent;
    descent.name = "descent";
    descent.header = {"iter", "ratio", "coupled_residual"};
    for (const auto& l : p.log) descent.add({fmt(l.iter), fmt(l.ratio), fmt(l.coupled_residual)});
    r.tables.push_back(std::move(prof));
    r.tables.push_back(std::move(log));
    r.plots.push_back(std::move(plot));
    r.plots.push_back(std::move(descent));
    r.summary.push_back("profile ratio = " + fmt(p.radius.ratio) + " after " + std::to_string(p.iterations) +
                        " iterations (" + p.message + ")");
    return r;
}

RunResult run_stability(const RunConfig& cfg) {
    RunResult r;
    int band = positive(cfg, "stability.band");
    long nr = cfg.integer("stability.n_random");
    if (nr < 0) fail(Errc::config, "key 'stability.n_random' must be >= 0");
    FieldSet set = make_field_set(cfg.str("stability.fields"), static_cast<int>(nr), cfg.u64("seed"), band);
    double kappa = cfg.real("stability.kappa"), lambda = cfg.real("stability.lambda");
    HomothetyForm form = parse_homothety_form(cfg.str("stability.form"));
    const int n = 3;
    Table t;
    t.name = "fields";
    t.header = {"field", "kind", "grad2", "ric", "div2", "lie2", "yano_rel", "newton_min",
                "sigma2", "sigma2_alt", "full", "dirichlet", "hopf"};
    json fields = json::array();
    double worst = std::numeric_limits<double>::infinity(), worst_hopf = worst;
    std::string worst_field, worst_hopf_field;
    std::vector<HessianReport> hopf(set.fields.size());
    parallel_for(set.fields.size(), [&](std::size_t i) { hopf[i] = hessian_hopf(set.fields[i]); });
    for (std::size_t i = 0; i < set.fields.size(); ++i) {
        const auto& F = set.fields[i];
        const auto& I = set.integrals[i];
        HessianReport hs = hessian_homothety(I, F.generator, n, lambda, kappa, HomothetyForm::sigma2);
        HessianReport hf = hessian_homothety(I, F.generator, n, lambda, kappa, HomothetyForm::full);
        HessianReport hd = hessian_homothety(I, F.generator, n, lambda, kappa, HomothetyForm::dirichlet);
        const HessianReport& sel = form == HomothetyForm::sigma2 ? hs : form == HomothetyForm::full ? hf : hd;
        double scale = I.grad2 + std::abs(I.ric) + I.div2 + I.lie2;
        if (sel.value < worst) {
            worst = sel.value;
            worst_field = F.generator;
        }
        if (hopf[i].value < worst_hopf) {
            worst_hopf = hopf[i].value;
            worst_hopf_field = F.generator;
        }
        double yr = I.yano_scale() > 0 ? std::abs(I.yano()) / I.yano_scale() : 0.0;
        t.add({F.generator, F.kind, fmt(I.grad2), fmt(I.ric), fmt(I.div2), fmt(I.lie2), fmt(yr), fmt(I.newton_min),
               fmt(hs.value), fmt(hs.alt_value), fmt(hf.value), fmt(hd.value), fmt(hopf[i].value)});
        json fj;
        fj["field"] = F.generator;
        fj["kind"] = F.kind;
        fj["integrals"] = to_json(I);
        fj["sigma2"] = to_json(hs);
        fj["full"] = to_json(hf);
        fj["dirichlet"] = to_json(hd);
        fj["hopf"] = to_json(hopf[i]);
        fj["scale"] = scale;
        fields.push_back(fj);
    }
    json res;
    res["n"] = n;
    res["kappa"] = kappa;
    res["lambda"] = lambda;
    res["form"] = cfg.str("stability.form");
    res["field_count"] = set.fields.size();
    auto verdict = [](double v, const std::string& who) {
        return v >= -1e-8 ? std::string("nonnegative on the tested field family")
                          : "negative on the tested field family (" + who + ")";
    };
    res["verdict"] = verdict(worst, worst_field);
    res["min_value"] = worst;
    res["hopf_verdict"] = verdict(worst_hopf, worst_hopf_field);
    res["hopf_min_value"] = worst_hopf;
    bool any_conformal = std::any_of(set.integrals.begin(), set.integrals.end(),
                                     [](const FieldIntegrals& I) { return I.lie2 > 1e-10 * std::max(1.0, I.norm2); });
    if (any_conformal && kappa > 0) {
        ThresholdResult th = threshold_scan(set, kappa, cfg.real("threshold.lambda_min"),
                                            cfg.real("threshold.lambda_max"),
                                            static_cast<int>(cfg.integer("threshold.n_grid")), n);
        res["threshold"] = to_json(th);
        Table p;
        p.name = "threshold";
        p.header = {"lambda", "min_hessian"};
        for (auto& [l, v] : th.scan) p.add({fmt(l), fmt(v)});
        r.plots.push_back(std::move(p));
        r.summary.push_back("threshold lambda* = " + fmt(th.lambda_star) + " (1/sqrt(2 kappa) = " +
                            fmt(th.predicted) + ")");
    } else {
        res["threshold"] = "skipped: no non-Killing field or kappa = 0";
    }
    res["fields"] = fields;
    r.report = res;
    r.tables.push_back(std::move(t));
    r.summary.push_back(std::string(res["verdict"]));
    return r;
}

RunResult run_reproduce(const RunConfig& cfg) {
    RunResult r;
    std::vector<std::string> names;
    std::string c = cfg.str("case");
    if (c == "all") {
        names = reproduce_case_names();
    } else {
        for (auto& p : split_top_level(c, ',')) {
            std::string nm = trim(p);
            const auto& all = reproduce_case_names();
            if (std::find(all.begin(), all.end(), nm) == all.end())
                fail(Errc::config, "unknown reproduce case '" + nm + "'");
            names.push_back(nm);
        }
    }
    json cases = json::array();
    bool ok = true;
    for (const auto& nm : names) {
        CaseResult cr = reproduce_case(nm, cfg);
        json j;
        j["case"] = cr.name;
        j["citation"] = cr.citation;
        j["passed"] = cr.passed();
        json checks = json::array();
        for (const auto& ch : cr.checks) checks.push_back(to_json(ch));
        j["checks"] = checks;
        j["data"] = cr.data;
        cases.push_back(j);
        for (auto t : cr.tables) {
            t.name = nm + "_" + t.name;
            r.tables.push_back(std::move(t));
        }
        for (auto t : cr.plots) {
            t.name = nm + "_" + t.name;
            r.plots.push_back(std::move(t));
        }
        ok = ok && cr.passed();
        r.summary.push_back((cr.passed() ? "PASS " : "FAIL ") + nm);
        for (const auto& ch : cr.checks)
            if (!ch.pass) r.summary.push_back("  failed: " + ch.name + " value " + fmt(ch.value));
    }
    json res;
    res["cases"] = cases;
    res["passed"] = ok;
    r.report = res;
    r.exit_code = ok ? 0 : 2;
    return r;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> c = {"analyze", "energy", "critical", "minimize-profile", "stability",
                                               "reproduce"};
    return c;
}

RunResult execute(const std::string& command, const RunConfig& cfg) {
    RunResult r;
    if (command == "analyze") r = run_analyze(cfg);
    else if (command == "energy") r = run_energy(cfg);
    else if (command == "critical") r = run_critical(cfg);
    else if (command == "minimize-profile") r = run_profile(cfg);
    else if (command == "stability") r = run_stability(cfg);
    else if (command == "reproduce") r = run_reproduce(cfg);
    else fail(Errc::invalid_argument, "unknown command '" + command + "'");
    json top;
    top["tool"] = "sigma2";
    top["command"] = command;
    top["config"] = config_json(cfg);
    top["result"] = r.report;
    top["summary"] = r.summary;
    top["exit_code"] = r.exit_code;
    r.report = top;
    return r;
}

json to_json(const Check& c) {
    json j;
    j["name"] = c.name;
    j["value"] = std::isfinite(c.value) ? json(c.value) : json(fmt(c.value));
    j["target"] = c.target;
    j["tol"] = c.tol;
    j["relation"] = c.relation;
    j["pass"] = c.pass;
    return j;
}

bool CaseResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void write_outputs(const std::string& dir, const RunConfig& cfg, const RunResult& r) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::path root(dir);
    fs::create_directories(root / "tables", ec);
    if (!ec) fs::create_directories(root / "plotdata", ec);
    if (ec) fail(Errc::io, "cannot create output directory '" + dir + "': " + ec.message());
    auto put = [](const fs::path& p, const std::string& text) {
        std::ofstream f(p, std::ios::binary);
        if (!f) fail(Errc::io, "cannot write '" + p.string() + "'");
        f << text;
        if (!f) fail(Errc::io, "write failed for '" + p.string() + "'");
    };
    put(root / "report.json", r.report.dump(2) + "\n");
    put(root / "effective_config.txt", cfg.echo());
    for (const auto& t : r.tables) put(root / "tables" / (t.name + ".csv"), t.csv());
    for (const auto& t : r.plots) put(root / "plotdata" / (t.name + ".csv"), t.csv());
}

}  // namespace s2

#include "sigma2/report.hpp"

#include <cmath>
#include <cstdio>

namespace s2 {

namespace {

// NaN and infinities are not JSON numbers; keep them visible as strings
json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(int v) { return std::to_string(v); }

std::string Table::csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_cell(header[i]);
    out += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_cell(r[i]);
        out += "\n";
    }
    return out;
}

json to_json(const Vec& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

json to_json(const Charge& c) {
    json j;
    j["kind"] = c.kind;
    j["raw"] = num(c.raw);
    j["snapped"] = num(c.snapped);
    j["snapped_ok"] = c.snapped_ok;
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

json to_json(const Bound& b) {
    json j;
    j["kind"] = b.kind;
    j["value"] = num(b.value);
    j["energy"] = num(b.energy);
    j["slack"] = num(b.slack);
    j["satisfied"] = b.satisfied;
    j["attained"] = b.attained;
    if (!b.vakulenko.empty()) j["vakulenko"] = b.vakulenko;
    return j;
}

json to_json(const RadiusOpt& r) {
    json j;
    j["r_star"] = num(r.r_star);
    j["e_min"] = num(r.e_min);
    j["ratio"] = num(r.ratio);
    j["ratio_total"] = num(r.ratio_total);
    j["a"] = num(r.a);
    j["b"] = num(r.b);
    j["golden_section_r"] = num(r.gs_r);
    j["golden_section_e"] = num(r.gs_e);
    j["golden_section_rel_err"] = num(r.gs_rel_err);
    return j;
}

json to_json(const EnergyReport& e) {
    json j;
    j["map"] = e.map;
    j["rule"] = e.rule;
    j["order"] = e.order;
    j["nodes"] = e.nodes;
    j["e_sigma1"] = num(e.e_sigma1);
    j["e_sigma2"] = num(e.e_sigma2);
    j["e_4"] = num(e.e_4);
    j["kappa"] = num(e.kappa);
    j["e_total"] = num(e.e_total);
    j["volume"] = num(e.volume);
    j["newton_gap"] = num(e.newton_gap);
    j["charge"] = to_json(e.charge);
    j["bound"] = to_json(e.bound);
    if (e.radius_opt) j["radius_opt"] = to_json(*e.radius_opt);
    return j;
}

json to_json(const Witness& w) {
    json j;
    j["flag"] = w.flag;
    j["deviation"] = num(w.deviation);
    if (w.where.size()) j["where"] = to_json(w.where);
    j["value"] = num(w.value);
    return j;
}

json to_json(const ClassFlags& f) {
    json j;
    j["horizontally_weakly_conformal"] = to_json(f.hwc);
    j["homothetic"] = to_json(f.homothetic);
    j["paired_spectrum"] = to_json(f.paired);
    j["contact_spectrum"] = to_json(f.contact_spectrum);
    j["contact_constant"] = to_json(f.contact_constant);
    j["area_preserving"] = to_json(f.area_preserving);
    j["reeb_index"] = f.reeb_index;
    return j;
}

json to_json(const DistortionData& d) {
    json j;
    j["x"] = to_json(d.x);
    j["lambda2"] = to_json(d.lambda2);
    json s = json::array();
    for (int i = 0; i < d.sigma.size(); ++i) s.push_back(num(d.sigma(i)));
    j["sigma"] = s;
    j["cluster"] = d.cluster;
    j["sigma_check"] = num(d.sigma_check);
    j["energy_density"] = num(d.energy_density);
    j["volume_density"] = num(d.volume_density);
    return j;
}

json to_json(const ResidualReport& r) {
    json j;
    j["system"] = r.system;
    j["map"] = r.map;
    j["equations"] = r.equations;
    j["points"] = r.grid.size();
    json sup = json::array(), l2 = json::array();
    for (double v : r.sup) sup.push_back(num(v));
    for (double v : r.l2) l2.push_back(num(v));
    j["sup"] = sup;
    j["l2"] = l2;
    j["sup_all"] = num(r.sup_all());
    j["tol"] = num(r.tol);
    j["critical"] = r.critical;
    if (!r.info.empty()) {
        json info;
        for (auto& [k, v] : r.info) info[k] = num(v);
        j["info"] = info;
    }
    if (!r.companions.empty()) {
        json c = json::array();
        for (auto& x : r.companions) c.push_back(to_json(x));
        j["companions"] = c;
    }
    return j;
}

json to_json(const HessianReport& h) {
    json j;
    j["form"] = h.form;
    j["field"] = h.field;
    j["value"] = num(h.value);
    json t;
    for (auto& [k, v] : h.terms) t[k] = num(v);
    j["terms"] = t;
    json p;
    for (auto& [k, v] : h.params) p[k] = num(v);
    j["params"] = p;
    if (!std::isnan(h.alt_value)) {
        j["alt_value"] = num(h.alt_value);
        j["yano_defect"] = num(h.yano_defect);
    }
    return j;
}

json to_json(const FieldIntegrals& I) {
    json j;
    j["grad2"] = num(I.grad2);
    j["ric"] = num(I.ric);
    j["div2"] = num(I.div2);
    j["lie2"] = num(I.lie2);
    j["norm2"] = num(I.norm2);
    j["newton_min"] = num(I.newton_min);
    j["yano"] = num(I.yano());
    j["yano_rel"] = num(I.yano_scale() > 0 ? std::abs(I.yano()) / I.yano_scale() : 0.0);
    return j;
}

json to_json(const ThresholdResult& t) {
    json j;
    j["kappa"] = num(t.kappa);
    j["n"] = t.n;
    j["lambda_star"] = num(t.lambda_star);
    j["predicted"] = num(t.predicted);
    j["abs_err"] = num(std::abs(t.lambda_star - t.predicted));
    j["bisection_steps"] = t.bisection_steps;
    j["argmin_field"] = t.argmin_field;
    j["message"] = t.message;
    return j;
}

json to_json(const ProfileResult& p) {
    json j;
    j["ratio_discrete"] = num(p.ratio_discrete);
    j["radius"] = to_json(p.radius);
    j["iterations"] = p.iterations;
    j["converged"] = p.converged;
    j["grad_norm"] = num(p.grad_norm);
    j["nodes"] = p.s.size();
    j["message"] = p.message;
    if (!p.log.empty()) {
        j["first_log"] = {{"iter", p.log.front().iter},
                          {"ratio", num(p.log.front().ratio)},
                          {"coupled_residual", num(p.log.front().coupled_residual)}};
        j["last_log"] = {{"iter", p.log.back().iter},
                         {"ratio", num(p.log.back().ratio)},
                         {"coupled_residual", num(p.log.back().coupled_residual)},
                         {"sigma2_residual", num(p.log.back().sigma2_residual)}};
    }
    return j;
}

json to_json(const ConformalReport& c) {
    json j;
    j["map"] = c.map;
    j["case"] = c.case_name;
    j["points"] = c.grid.size();
    j["max_mismatch"] = num(c.max_mismatch);
    j["residual_before"] = num(c.residual_before);
    j["residual_after"] = num(c.residual_after);
    j["identical"] = c.identical;
    return j;
}

Table residual_table(const ResidualReport& r) {
    Table t;
    t.name = "residuals_" + r.system;
    const int d = r.grid.empty() ? 0 : r.grid[0].size();
    for (int a = 0; a < d; ++a) t.header.push_back("x" + std::to_string(a));
    for (auto& e : r.equations) t.header.push_back(e);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        std::vector<std::string> row;
        for (int a = 0; a < d; ++a) row.push_back(fmt(r.grid[i][a]));
        for (double v : r.residuals[i]) row.push_back(fmt(v));
        t.add(std::move(row));
    }
    return t;
}

}  // namespace s2

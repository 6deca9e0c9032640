#pragma once

#include "sigma2/distortion.hpp"
#include "sigma2/quadrature.hpp"

namespace s2 {

// Coupling that makes the radius-minimised identity map of S^3 have ratio exactly 1.
constexpr double kappa_cal = 4.0;

struct QuadOrders {
    int order_1d = 64;
    int order_3d = 32;
    int order_radial = 128;
    int order_4d = 12;
};

// Reduced rule for equivariant families, full product rule otherwise.
QuadratureRule default_rule(const MapFamily& map, const QuadOrders& q = {});

struct Charge {
    std::string kind;  // "degree", "hopf" or "none"
    double raw = 0;
    double snapped = 0;
    bool snapped_ok = false;
    std::string note;  // reason when refused
};

struct Bound {
    std::string kind;  // "skyrme", "faddeev", "none"
    double value = 0;
    double energy = 0;
    double slack = 0;
    bool satisfied = true;
    bool attained = false;
    std::string vakulenko;  // symbolic c |Q|^{3/4}
};

struct RadiusOpt {
    double r_star = 0;
    double e_min = 0;
    double ratio = 0;        // per unit charge
    double ratio_total = 0;  // E_min / 12 pi^2
    double a = 0, b = 0;     // E(R) = a R + kappa b / R
    double gs_r = 0, gs_e = 0;  // golden-section cross-check
    double gs_rel_err = 0;
};

struct EnergyReport {
    std::string map;
    std::string rule;
    int order = 0;
    int nodes = 0;
    double e_sigma1 = 0, e_sigma2 = 0, e_4 = 0;
    double kappa = 0;
    double e_total = 0;
    double volume = 0;
    double newton_gap = 0;  // ((n-1)/n) e_4 - e_sigma2
    Charge charge;
    Bound bound;
    std::optional<RadiusOpt> radius_opt;
};

EnergyReport integrate_energy(const MapFamily& map, const QuadratureRule& rule, double kappa);

// Raw and snapped degree (refused for non-compact or non-equidimensional maps).
Charge degree(const MapFamily& map, const QuadratureRule& rule);

struct PotentialCheck {
    double max_defect = 0;
    Vec where;
    bool ok = false;
};
PotentialCheck verify_potential(const MapFamily& map, int n_grid = 6);
Charge hopf_invariant(const MapFamily& map, const QuadratureRule& rule);

// Fills charge and bound fields of the report.
void bounds_report(const MapFamily& map, EnergyReport& report, const QuadratureRule& rule);

RadiusOpt minimize_over_radius(const MapFamily& map, double kappa, const QuadOrders& q = {});

}  // namespace s2

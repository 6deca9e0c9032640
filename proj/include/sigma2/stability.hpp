#pragma once

#include "sigma2/quadrature.hpp"

#include <map>

namespace s2 {

// Value and derivatives of a field on the unit S^3 seen in R^4, parametrised by the
// suspension chart (s, t, x): X = pushforward of the chart field, D.col(b) = d_b X.
struct AmbientJet {
    Eigen::Vector4d X;
    Eigen::Matrix<double, 4, 3> D;
};

struct VariationField {
    ChartPtr chart;
    std::string generator;  // e.g. "killing(0,2)", "conformal-gradient(1)", "fourier-random(seed=7,band=2)"
    std::string kind;       // killing | conformal-gradient | fourier-random | coordinate | custom
    VectorFn components;
    MatrixFn jacobian;  // (a, b) = d_b X^a; empty: central differences
    std::function<AmbientJet(const Vec&)> ambient;  // only for fields on s3_suspension(1)
};

// Fields on s3_suspension(1).
VariationField killing_field(int i, int j);           // rotation in the (y_i, y_j) plane, i < j
std::vector<VariationField> killing_fields();          // the six rotations
VariationField hopf_horizontal_killing(int which);     // 0, 1: everywhere orthogonal to the Reeb field of s3_join
VariationField conformal_gradient_field(int i);       // gradient of y_i restricted to S^3
std::vector<VariationField> conformal_gradient_fields();
VariationField fourier_random_field(std::uint64_t seed, int band = 2);
// Coordinate field d/dx_axis on any chart.
VariationField coordinate_field(const ChartPtr& chart, int axis);
VariationField custom_field(const ChartPtr& chart, VectorFn components, const std::string& name = "custom");
VariationField scaled(const VariationField& X, double c);

// C^2 cutoff used by the random fields: 0 within 0.05 of {0, pi}, 1 on [0.35, pi - 0.35].
double cutoff(double u);

struct VectorCalculus {
    Mat nabla;  // (a, b) = nabla_b X^a
    double div = 0;
    Mat lie;    // (L_X g)_{ab}
};

VectorCalculus vector_calculus(const VariationField& X, const Vec& x);

// Quadrature on the unit S^3 in suspension coordinates: composite Gauss panels in s and t
// split at the cutoff breakpoints, trapezoid in x.
struct SphereRuleOptions {
    int edge = 6, ramp = 10, middle = 24, nx = 16;
};
QuadratureRule sphere_rule(const SphereRuleOptions& o = {});

// Integrals of the pointwise invariants of one field.
struct FieldIntegrals {
    double grad2 = 0;   // |nabla X|^2
    double ric = 0;     // Ric(X, X)
    double div2 = 0;    // (div X)^2
    double lie2 = 0;    // |L_X g|^2
    double norm2 = 0;   // |X|^2
    double newton_min = 0;  // min over nodes of 1/2 |L|^2 - (2/n)(div)^2
    double newton_max_abs = 0;
    double yano() const { return grad2 - ric + div2 - 0.5 * lie2; }
    double yano_scale() const { return grad2 + std::abs(ric) + div2 + 0.5 * lie2; }
};

FieldIntegrals field_integrals(const VariationField& X, const QuadratureRule& rule);
FieldIntegrals field_integrals(const VariationField& X);  // default rule for the chart

struct HessianReport {
    std::string form;  // sigma2-homothety | sigma12-full | dirichlet-part | hopf-2hh
    std::string field;
    double value = 0;
    std::vector<std::pair<std::string, double>> terms;
    std::map<std::string, double> params;
    // sigma2 form only: the same form written through |L_X g|^2, and the relative gap
    double alt_value = std::numeric_limits<double>::quiet_NaN();
    double yano_defect = std::numeric_limits<double>::quiet_NaN();
};

enum class HomothetyForm { sigma2, full, dirichlet };
HomothetyForm parse_homothety_form(const std::string& s);

HessianReport hessian_homothety(const FieldIntegrals& I, const std::string& field, int n, double lambda,
                                double kappa, HomothetyForm form);
HessianReport hessian_homothety(const VariationField& X, int n, double lambda, double kappa, HomothetyForm form);

// Hopf-type form on the unit S^3 with xi the Reeb field of s3_join(1); the field is first
// made horizontal (X - g(X, xi) xi) unless `horizontal` is false.
HessianReport hessian_hopf(const VariationField& X, bool horizontal = true, const SphereRuleOptions& o = {});

struct ThresholdResult {
    double kappa = 0;
    int n = 3;
    double lambda_star = std::numeric_limits<double>::quiet_NaN();
    double predicted = 0;  // 1 / sqrt(2 kappa)
    std::vector<std::pair<double, double>> scan;  // (lambda, min over fields)
    std::string argmin_field;  // field attaining the minimum just below lambda*
    int bisection_steps = 0;
    std::string message;
};

struct FieldSet {
    std::vector<VariationField> fields;
    std::vector<FieldIntegrals> integrals;
};
// "killing", "conformal", "random" in a comma list; random fields use seeds seed, seed+1, ...
FieldSet make_field_set(const std::string& names, int n_random, std::uint64_t seed, int band = 2);

ThresholdResult threshold_scan(const FieldSet& set, double kappa, double lambda_min = 0.2, double lambda_max = 2.0,
                               int n_grid = 91, int n = 3);

}  // namespace s2

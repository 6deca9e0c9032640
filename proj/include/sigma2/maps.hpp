#pragma once

#include "sigma2/geometry.hpp"
#include "sigma2/profile.hpp"

#include <map>

namespace s2 {

struct MapFamily {
    std::string name;  // family tag, e.g. "alpha_join"
    std::string spec;  // full specifier as given
    ChartPtr domain, codomain;
    VectorFn eval;  // unwrapped codomain coordinates
    MatrixFn jac;   // analytic Jacobian, empty in finite-difference mode
    // integrands built from the distortion spectrum do not depend on these coordinates
    std::vector<int> passive_axes;
    // family-supplied potential A with dA = phi^* Omega (S^2 targets only)
    VectorFn hopf_potential;
    std::map<std::string, double> params;
    bool analytic() const { return static_cast<bool>(jac); }
};

using MapPtr = std::shared_ptr<const MapFamily>;

MapPtr make_map(std::string_view spec);
MapPtr make_map(const Spec& spec);
// alpha_join with an explicit profile object (e.g. an optimised grid profile).
MapPtr make_alpha_join(const Profile& alpha, int k, int l, double R = 1.0, const std::string& spec = "");
// Generic constructor; runs the Jacobian self-test when `jac` is given.
MapPtr make_custom_map(std::string name, ChartPtr domain, ChartPtr codomain, VectorFn eval, MatrixFn jac,
                       std::vector<int> passive_axes = {});
// suspension(f, q, r) with user-supplied transversal functions (no holomorphy check);
// dq/dr return gradients (d/dt, d/dx).
MapPtr make_suspension_map(const Profile& f, std::function<double(double, double)> q,
                           std::function<double(double, double)> r,
                           std::function<Eigen::Vector2d(double, double)> dq,
                           std::function<Eigen::Vector2d(double, double)> dr);

// Same component formulas on a different (deformed) domain chart of the same dimension.
MapPtr with_domain(const MapPtr& map, ChartPtr domain);
MapPtr with_codomain(const MapPtr& map, ChartPtr codomain);
// Drop the analytic Jacobian (forces finite differences).
MapPtr finite_difference_version(const MapPtr& map);

Mat jacobian(const MapFamily& map, const Vec& x);
Mat fd_jacobian(const MapFamily& map, const Vec& x);

struct SelfTest {
    double max_rel_error = 0;
    Vec worst_point;
    int points = 0;
};
// Compares analytic and central-difference Jacobians at `n` seeded random interior points.
SelfTest jacobian_self_test(const MapFamily& map, int n = 100, std::uint64_t seed = 0x5eed);

Vec pullback_oneform(const MapFamily& map, const VectorFn& omega, const Vec& x);
// phi^* Omega with Omega = -1/2 sin u du ^ dv on s2; out(a, b) antisymmetric
Mat pullback_area_form(const MapFamily& map, const Vec& x);

// Kernel of d phi (columns), for biconformal splittings.
MatrixFn vertical_distribution(const MapPtr& map);

}  // namespace s2

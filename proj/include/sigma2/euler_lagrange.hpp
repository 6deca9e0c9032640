#pragma once

#include "sigma2/energy.hpp"

#include <map>

namespace s2 {

// Eigenframe quantities at one point: Gamma(i, j, k) = g(nabla_{E_i} E_j, E_k) in the
// Cauchy-Green eigenframe, dl(k, i) = E_k(lambda_i^2), rank = number of nonzero eigenvalues.
struct PointGeometry {
    DistortionData d;
    int rank = 0;
    FrameConnection G;
    Mat dl;
    double gamma(int i, int j, int k) const { return G(i, j, k); }
    // sum over vertical directions of Gamma(g, g, k) = (m - rank) mu^V_k
    double vertical_trace(int k) const;
};

// flip_mask: bit i negates eigenvector i (frame-sign invariance tests).
PointGeometry point_geometry(const MapFamily& map, const Vec& x, unsigned flip_mask = 0);

// Projected residuals h(tau, d phi E_k) and h(tau_sigma2, d phi E_k) for horizontal k, from the
// eigenframe identities; e_k below is E_k of the scalar e.
double harmonic_component(const PointGeometry& p, int k);
double sigma2_component(const PointGeometry& p, int k);

struct ResidualOptions {
    double tol = -1;          // < 0: 1e-6 analytic, 1e-4 finite differences
    std::vector<Vec> grid;    // empty: default grid
    unsigned flip_mask = 0;
    double kappa = kappa_cal;  // for the coupled system
};

struct ResidualReport {
    std::string system;
    std::string map;
    std::vector<std::string> equations;
    std::vector<Vec> grid;
    std::vector<std::vector<double>> residuals;  // [point][equation]
    std::vector<double> sup, l2;                  // per equation; l2 is the RMS over the grid
    double tol = 0;
    bool critical = false;
    std::map<std::string, double> info;
    std::vector<ResidualReport> companions;
    void finalize();  // recompute norms and verdict
    double sup_all() const;
};

std::vector<Vec> default_residual_grid(const MapFamily& map);

ResidualReport residual_2target(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_3target(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_contact(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_4harmonic(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_harmonic(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_area2d(const MapFamily& map, const ResidualOptions& o = {});
// Generic projected sigma_2 (and coupled sigma_{1,2}) residual for any rank.
ResidualReport residual_sigma2(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_coupled(const MapFamily& map, const ResidualOptions& o = {});
ResidualReport residual_by_name(const std::string& system, const MapFamily& map, const ResidualOptions& o = {});

// Reduced ODE for nomizu(alpha, k); k odd.
double nomizu_ode(const Profile& a, int k, double s);
ResidualReport nomizu_residual(const Profile& a, int k, int n_points = 64, double tol = 1e-6);

// The s-equation of the sigma_2 system for alpha_join(alpha, k, l) in closed form.
double alpha_join_s_equation(const Profile& a, int k, int l, double s);
// Same direction, harmonic (sigma_1) part.
double alpha_join_s_harmonic(const Profile& a, int k, int l, double s);

struct IterationLog {
    int iter;
    double ratio;
    double grad_norm;
    double step;
    double sigma2_residual;   // sup of the sigma_2 s-equation on interior midpoints
    double coupled_residual;  // sup of harmonic + (A/B) sigma_2 part
};

struct ProfileOptions {
    int k = 2, l = 1;
    double kappa = kappa_cal;
    int n_prof = 96;
    int max_iter = 50000;
    int log_every = 10;
    std::string init;  // empty: per-k default
};

struct ProfileResult {
    std::vector<double> s, alpha;
    Profile profile;     // cubic interpolant of the nodal values
    double ratio_discrete = 0;  // objective of the P1 problem
    RadiusOpt radius;           // radius minimisation of the interpolated profile
    int iterations = 0;
    bool converged = false;
    double grad_norm = 0;
    std::vector<IterationLog> log;
    std::string message;
};

ProfileResult minimize_profile(const ProfileOptions& o);

struct ConformalReport {
    std::string map, case_name;
    std::vector<Vec> grid;
    std::vector<double> mismatch;
    double max_mismatch = 0;
    double residual_before = 0, residual_after = 0;  // sup |tau^H|_h
    bool identical = false;  // bitwise equality of the residual vectors
};

// sigma, rho define gbar = sigma^-2 g^H + rho^-2 g^V with V = ker d phi.
ConformalReport conformal_invariance_check(const MapPtr& map, ScalarFn sigma, ScalarFn rho,
                                           const std::vector<Vec>& grid = {});

// Seeded smooth positive function exp(amp * sum c_j sin(k_j . x + p_j)) with integer wave vectors.
ScalarFn random_conformal_factor(int dim, std::uint64_t seed, double amp = 0.2, int terms = 4);

}  // namespace s2

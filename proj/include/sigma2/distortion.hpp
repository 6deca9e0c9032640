#pragma once

#include "sigma2/maps.hpp"

namespace s2 {

struct DistortionData {
    Vec x;
    Mat pullback;   // phi^* h in domain coordinates
    Vec lambda2;    // descending
    Mat frame;      // columns: g-orthonormal eigenvectors, same order as lambda2
    std::vector<int> cluster;  // cluster id per eigenvalue (equal ids = degenerate)
    Eigen::VectorXd sigma;  // sigma(p) for p = 0..m, sigma(0) = 1
    double sigma_check = 0;  // max relative gap between the eigenvalue and trace formulas
    double energy_density = 0;  // sigma_1 / 2
    double volume_density = std::numeric_limits<double>::quiet_NaN();  // sqrt(sigma_m), m == n only
    double scale() const { return std::max(sigma(1), 1e-300); }
    double s1() const { return sigma(1); }
    double s2() const { return sigma.size() > 2 ? sigma(2) : 0.0; }
    int multiplicity(int i) const;
};

// Generalised eigenproblem P v = lambda^2 g v at x given the Jacobian J (n x m).
DistortionData analyze_jacobian(const Chart& domain, const Chart& codomain, const Vec& x, const Vec& y, const Mat& J);
DistortionData analyze_point(const MapFamily& map, const Vec& x);

double four_energy_density(const DistortionData& d);
// ((r-1)/r) sigma_1^2 / 2 - sigma_2, r = min(m, n); nonnegative by the Newton inequality
double newton_slack(const DistortionData& d, int n);

struct Witness {
    bool flag = false;
    double deviation = 0;  // worst relative deviation over the grid
    Vec where;
    double value = std::numeric_limits<double>::quiet_NaN();  // representative value (dilation, constant, ...)
};

struct ClassFlags {
    Witness hwc;            // nonzero eigenvalues equal
    Witness homothetic;     // hwc, full rank, constant dilation
    Witness paired;         // a repeated nonzero eigenvalue at every point
    Witness contact_spectrum;  // lambda_i^2 = product of the other two (m = n = 3)
    Witness contact_constant;  // ... with that value constant over the grid
    Witness area_preserving;   // lambda_1 lambda_2 constant, m = n = 2
    int reeb_index = -1;       // sorted index carrying the Reeb-type eigenvalue, -1 if undetermined
};

ClassFlags classify(const MapFamily& map, const std::vector<Vec>& grid, double tol = 1e-8);

// Index (in descending order) of the eigenvalue whose eigenspace contains the Reeb field, if any.
int reeb_eigen_index(const Chart& domain, const DistortionData& d);
// Index i with lambda_i^2 = product of the others, chosen by best fit; -1 if m != 3.
int product_eigen_index(const DistortionData& d);

// Eigenvalue branches along an ordered 1D sweep, matched to the previous sample by
// nearest value so branches do not swap at crossings.
std::vector<Vec> eigenvalue_branches(const MapFamily& map, const std::vector<Vec>& sweep);

}  // namespace s2

#pragma once

#include "sigma2/common.hpp"

#include <array>
#include <limits>
#include <memory>
#include <random>

namespace s2 {

struct Interval {
    double lo, hi;
    double length() const { return hi - lo; }
};

struct SingularPlane {
    int axis;
    double value;
};

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;
using MatrixFn = std::function<Mat(const Vec&)>;

struct ContactData {
    VectorFn eta;   // covector components
    VectorFn reeb;  // vector components
};

struct Chart {
    std::string name;  // full specifier, e.g. "s3_join(2)"
    std::string family;  // base model, e.g. "s3_join"
    int dim = 0;
    std::vector<Interval> ranges;  // sampling box for non-compact charts
    std::vector<bool> periodic;
    std::vector<SingularPlane> singular;
    int orientation = 1;
    MatrixFn metric;
    ScalarFn density;  // sqrt det g
    std::optional<ContactData> contact;
    MatrixFn ricci;  // empty when not catalogued
    bool compact = true;
    double volume = std::numeric_limits<double>::quiet_NaN();
    double radius = 1.0;  // curvature radius for spheres, metric scale otherwise
    // Unit-radius embedding into R^4 for the S^3 charts (empty otherwise).
    std::function<Eigen::Vector4d(const Vec&)> embed;
    std::function<Vec(const Eigen::Vector4d&)> chart_of;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::string_view spec);
ChartPtr make_chart(const Spec& spec);

ChartPtr deform_metric(const ChartPtr& chart, std::string_view deform);
ChartPtr radius_scale(const ChartPtr& chart, double c);
ChartPtr squash(const ChartPtr& chart, double R);
ChartPtr hopf_squash(const ChartPtr& chart, int k, int l);
// gbar = sigma^-2 g^H + rho^-2 g^V; `vertical` returns a basis of V in its columns
// (zero columns means a purely conformal change).
ChartPtr biconformal(const ChartPtr& chart, ScalarFn sigma, ScalarFn rho, MatrixFn vertical);

struct FrameField {
    ChartPtr chart;
    MatrixFn vectors;  // columns are the frame vectors
};

FrameField coordinate_frame(const ChartPtr& chart);
FrameField orthonormalize(const FrameField& frame);

// gamma(i, j, k) = g(nabla_{E_i} E_j, E_k)
struct FrameConnection {
    int dim = 0;
    double v[4][4][4] = {};
    double operator()(int i, int j, int k) const { return v[i][j][k]; }
};

FrameConnection connection_coeffs(const Chart& chart, const FrameField& frame, const Vec& x);

// Second-kind Christoffel symbols of the coordinate frame: out[a](b, c) = Gamma^a_{bc}.
std::array<Mat, 4> christoffel(const Chart& chart, const Vec& x);

MatrixFn ricci_form(const ChartPtr& chart);

double distance_to_singular(const Chart& chart, const Vec& x);
bool is_interior(const Chart& chart, const Vec& x);
Vec wrap(const Chart& chart, const Vec& x);
Vec gram_schmidt_columns(const Mat& g, Mat& vectors);  // returns norms before normalisation

// Open tensor grid, n nodes per axis, keeping `margin` (fraction of the range) off
// non-periodic ends.
std::vector<Vec> sample_grid(const Chart& chart, int n, double margin = 0.1);
Vec random_point(const Chart& chart, std::mt19937_64& rng, double margin = 0.05);

struct ContactDefect {
    double eta_xi;     // |eta(xi) - 1|
    double kernel;     // max |(iota_xi d eta)_a|
};
ContactDefect contact_defect(const Chart& chart, const Vec& x);

// d(omega) for a 1-form field by central differences: out(a, b) = d_a w_b - d_b w_a
Mat exterior_derivative(const VectorFn& omega, const Vec& x, int dim);

}  // namespace s2

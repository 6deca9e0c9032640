#pragma once

#include "sigma2/common.hpp"

#include <memory>

namespace s2 {

// Scalar function of one variable with first and second derivatives.
// Closed forms are exact; grid data goes through a natural cubic spline.
class Profile {
public:
    Profile() = default;

    static Profile parse(std::string_view text);
    static Profile from_grid(std::vector<double> s, std::vector<double> v, std::string name = "grid");
    static Profile from_csv(const std::string& path);
    static Profile closed(std::string name, std::function<double(double)> f, std::function<double(double)> d1,
                          std::function<double(double)> d2);

    double operator()(double s) const { return f_(s); }
    double d1(double s) const { return d1_(s); }
    double d2(double s) const { return d2_(s); }
    const std::string& name() const { return name_; }
    bool is_grid() const { return grid_ != nullptr; }
    // grid knots (empty for closed forms)
    std::vector<double> knots() const;
    std::vector<double> values() const;

private:
    struct Grid;
    std::string name_;
    std::function<double(double)> f_, d1_, d2_;
    std::shared_ptr<const Grid> grid_;
};

// Boundary check: |p(a) - va| and |p(b) - vb| within tol; throws on violation.
void require_boundary(const Profile& p, double a, double va, double b, double vb, const std::string& who,
                      double tol = 1e-10);

}  // namespace s2

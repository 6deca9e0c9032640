#include "sigma2/distortion.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace s2 {

int DistortionData::multiplicity(int i) const {
    int c = 0;
    for (int id : cluster) c += id == cluster[i];
    return c;
}

namespace {

Eigen::VectorXd elementary_symmetric(const Vec& l) {
    const int m = l.size();
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m + 1);
    e[0] = 1;
    for (int i = 0; i < m; ++i)
        for (int p = i + 1; p >= 1; --p) e[p] += l[i] * e[p - 1];
    return e;
}

// Newton identities on the power sums of M = g^-1 P
Eigen::VectorXd trace_symmetric(const Mat& M) {
    const int m = M.rows();
    Eigen::VectorXd p(m + 1), e = Eigen::VectorXd::Zero(m + 1);
    Mat Mk = Mat::Identity(m, m);
    for (int k = 1; k <= m; ++k) {
        Mk = Mk * M;
        p[k] = Mk.trace();
    }
    e[0] = 1;
    for (int k = 1; k <= m; ++k) {
        double s = 0;
        for (int i = 1; i <= k; ++i) s += ((i % 2) ? 1.0 : -1.0) * e[k - i] * p[i];
        e[k] = s / k;
    }
    return e;
}

}  // namespace

DistortionData analyze_jacobian(const Chart& domain, const Chart& codomain, const Vec& x, const Vec& y, const Mat& J) {
    const int m = domain.dim;
    if (!J.allFinite()) {
        std::ostringstream os;
        os << "analyze_point: non-finite Jacobian at x = (" << x.transpose() << ")";
        fail(Errc::numerical, os.str());
    }
    DistortionData d;
    d.x = x;
    Mat h = codomain.metric(y);
    d.pullback = J.transpose() * h * J;
    d.pullback = 0.5 * (d.pullback + d.pullback.transpose()).eval();
    Mat g = domain.metric(x);
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) fail(Errc::domain, "analyze_point: domain metric not positive definite");
    Mat L = llt.matrixL();
    Mat Li = L.inverse();
    Mat A = Li * d.pullback * Li.transpose();
    A = 0.5 * (A + A.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(A);
    if (es.info() != Eigen::Success) fail(Errc::numerical, "analyze_point: eigen solver failed");
    Vec ev = es.eigenvalues();
    Mat W = es.eigenvectors();
    d.lambda2.resize(m);
    d.frame.resize(m, m);
    for (int i = 0; i < m; ++i) {
        d.lambda2[i] = ev[m - 1 - i];
        d.frame.col(i) = Li.transpose() * W.col(m - 1 - i);
    }
    double scale = std::max(std::abs(d.lambda2[0]), 1e-300);
    for (int i = 0; i < m; ++i)
        if (d.lambda2[i] < 0) {
            if (d.lambda2[i] < -1e-9 * scale) fail(Errc::numerical, "analyze_point: pullback metric not semidefinite");
            d.lambda2[i] = 0;
        }
    d.sigma = elementary_symmetric(d.lambda2);
    Eigen::VectorXd tr = trace_symmetric(g.llt().solve(d.pullback));
    double s1 = std::max(d.sigma[1], 1e-300);
    for (int p = 1; p <= m; ++p) d.sigma_check = std::max(d.sigma_check, std::abs(tr[p] - d.sigma[p]) / std::pow(s1, p));
    d.cluster.assign(m, 0);
    for (int i = 1; i < m; ++i)
        d.cluster[i] = d.cluster[i - 1] + (d.lambda2[i - 1] - d.lambda2[i] > 1e-8 * d.sigma[1] ? 1 : 0);
    d.energy_density = 0.5 * d.sigma[1];
    if (m == codomain.dim) d.volume_density = std::sqrt(d.sigma[m]);
    return d;
}

DistortionData analyze_point(const MapFamily& map, const Vec& x) {
    Mat J = jacobian(map, x);
    return analyze_jacobian(*map.domain, *map.codomain, x, map.eval(x), J);
}

double four_energy_density(const DistortionData& d) { return 0.25 * d.s1() * d.s1(); }

double newton_slack(const DistortionData& d, int n) {
    int r = std::min(static_cast<int>(d.lambda2.size()), n);
    if (r < 2) return -d.s2();
    return (r - 1.0) / r * 0.5 * d.s1() * d.s1() - d.s2();
}

int reeb_eigen_index(const Chart& domain, const DistortionData& d) {
    if (!domain.contact) return -1;
    Vec xi = domain.contact->reeb(d.x);
    Mat g = domain.metric(d.x);
    double nx = xi.dot(g * xi);
    const int m = d.lambda2.size();
    for (int i = 0; i < m; ++i) {
        // squared length of the projection of xi onto the cluster of i
        double p = 0;
        for (int j = 0; j < m; ++j)
            if (d.cluster[j] == d.cluster[i]) {
                double c = d.frame.col(j).dot(g * xi);
                p += c * c;
            }
        if (p > (1 - 1e-8) * nx && d.multiplicity(i) == 1) return i;
    }
    return -1;
}

int product_eigen_index(const DistortionData& d) {
    if (d.lambda2.size() != 3) return -1;
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i) {
        double dev = std::abs(d.lambda2[i] - d.lambda2[(i + 1) % 3] * d.lambda2[(i + 2) % 3]);
        if (dev < bd) {
            bd = dev;
            best = i;
        }
    }
    return best;
}

ClassFlags classify(const MapFamily& map, const std::vector<Vec>& grid, double tol) {
    ClassFlags f;
    const int m = map.domain->dim, n = map.codomain->dim;
    auto upd = [](Witness& w, double dev, const Vec& x) {
        if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
        if (w.where.size() == 0 || dev > w.deviation) {
            w.deviation = std::max(w.deviation, dev);
            w.where = x;
        }
    };
    double dil_lo = std::numeric_limits<double>::infinity(), dil_hi = -dil_lo;
    double c_lo = dil_lo, c_hi = -dil_lo, a_lo = dil_lo, a_hi = -dil_lo;
    Vec c_lo_x, c_hi_x, d_lo_x, d_hi_x, a_lo_x, a_hi_x;
    bool full_rank = true;
    int reeb_idx = -2;
    for (const Vec& x : grid) {
        DistortionData d = analyze_point(map, x);
        double sc = d.scale();
        // nonzero eigenvalues
        std::vector<double> nz;
        for (int i = 0; i < m; ++i)
            if (d.lambda2[i] > 1e-8 * sc) nz.push_back(d.lambda2[i]);
        if (static_cast<int>(nz.size()) < std::min(m, n)) full_rank = false;
        double dev = nz.empty() ? 0.0 : (nz.front() - nz.back()) / sc;
        upd(f.hwc, dev, x);
        double dil = nz.empty() ? 0.0 : nz.front();
        if (dil < dil_lo) { dil_lo = dil; d_lo_x = x; }
        if (dil > dil_hi) { dil_hi = dil; d_hi_x = x; }
        double pair = 1.0;
        for (std::size_t i = 0; i + 1 < nz.size(); ++i) pair = std::min(pair, (nz[i] - nz[i + 1]) / sc);
        upd(f.paired, pair, x);
        if (m == 3 && n == 3) {
            int r = map.domain->contact ? reeb_eigen_index(*map.domain, d) : -1;
            if (r < 0) r = product_eigen_index(d);
            if (reeb_idx == -2) reeb_idx = r;
            else if (reeb_idx != r) reeb_idx = -1;
            double v = d.lambda2[r];
            double p = d.lambda2[(r + 1) % 3] * d.lambda2[(r + 2) % 3];
            upd(f.contact_spectrum, std::abs(v - p) / std::max({v, p, 1e-300}), x);
            if (v < c_lo) { c_lo = v; c_lo_x = x; }
            if (v > c_hi) { c_hi = v; c_hi_x = x; }
        }
        if (m == 2 && n == 2) {
            double a = std::sqrt(d.lambda2[0] * d.lambda2[1]);
            if (a < a_lo) { a_lo = a; a_lo_x = x; }
            if (a > a_hi) { a_hi = a; a_hi_x = x; }
        }
    }
    f.hwc.flag = f.hwc.deviation <= tol;
    f.hwc.value = dil_hi;
    double ddev = dil_hi > 0 ? (dil_hi - dil_lo) / dil_hi : 0.0;
    f.homothetic.deviation = std::max(f.hwc.deviation, ddev);
    f.homothetic.where = ddev >= f.hwc.deviation ? d_lo_x : f.hwc.where;
    f.homothetic.flag = f.hwc.flag && full_rank && dil_hi > 0 && ddev <= tol;
    f.homothetic.value = dil_hi;
    f.paired.flag = f.paired.deviation <= tol;
    if (m == 3 && n == 3) {
        f.reeb_index = reeb_idx < 0 ? -1 : reeb_idx;
        f.contact_spectrum.flag = f.contact_spectrum.deviation <= tol;
        f.contact_spectrum.value = c_hi;
        f.contact_constant.deviation = c_hi > 0 ? (c_hi - c_lo) / c_hi : 0.0;
        f.contact_constant.where = c_lo_x;
        f.contact_constant.flag = f.contact_spectrum.flag && f.contact_constant.deviation <= tol;
        f.contact_constant.value = c_hi;
    } else {
        f.contact_spectrum.deviation = f.contact_constant.deviation = std::numeric_limits<double>::infinity();
    }
    if (m == 2 && n == 2) {
        f.area_preserving.deviation = a_hi > 0 ? (a_hi - a_lo) / a_hi : 0.0;
        f.area_preserving.where = a_lo_x;
        f.area_preserving.value = a_hi;
        f.area_preserving.flag = f.area_preserving.deviation <= tol;
    } else {
        f.area_preserving.deviation = std::numeric_limits<double>::infinity();
    }
    return f;
}

std::vector<Vec> eigenvalue_branches(const MapFamily& map, const std::vector<Vec>& sweep) {
    std::vector<Vec> out;
    for (const Vec& x : sweep) {
        Vec l = analyze_point(map, x).lambda2;
        if (!out.empty()) {
            // linear prediction from the last two samples, then the best permutation
            Vec pred = out.size() > 1 ? Vec(2 * out.back() - out[out.size() - 2]) : out.back();
            std::vector<int> perm(l.size()), best;
            std::iota(perm.begin(), perm.end(), 0);
            double best_cost = std::numeric_limits<double>::infinity();
            do {
                double c = 0;
                for (int i = 0; i < l.size(); ++i) c += std::abs(l[perm[i]] - pred[i]);
                if (c < best_cost) {
                    best_cost = c;
                    best = perm;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            Vec matched(l.size());
            for (int i = 0; i < l.size(); ++i) matched[i] = l[best[i]];
            l = matched;
        }
        out.push_back(l);
    }
    return out;
}

}  // namespace s2

#include "maslov_lab/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace msl {

int intersection_dimension(const LagrangianFrame& F, const LagrangianFrame& G, double tol) {
    if (F.n() != G.n())
        throw std::invalid_argument("intersection_dimension: dimension mismatch");
    if (tol <= 0) tol = tols().rank;
    Mat A = F.orthonormalized().columns();
    Mat B = G.orthonormalized().columns();
    Mat stacked(A.rows(), A.cols() + B.cols());
    stacked << A, B;
    Eigen::JacobiSVD<Mat> svd(stacked);
    int dim = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) < tol) ++dim;
    return dim;
}

namespace {

// Internal machinery: everything works on the path conjugated so that the
// reference is the vertical (0) x R^n. Crossings are then rank drops of the
// orthonormal frame's q-block.

constexpr double kSigmaCross = 1e-7;      // sigma_min below this => crossing
constexpr double kSigmaSuspicion = 0.5;   // local minima above this cannot dip to 0
constexpr int kMaxRefinements = 7;

struct GridPoint {
    double t;
    Mat frame;      // orthonormal, gauge-aligned
    double sigma;   // smallest singular value of q-block
    double det;     // det of q-block (continuous in the aligned gauge)
    int dim;        // count of q-block singular values below kSigmaCross
};

struct Crossing {
    double t;
    int dim;
    int signature;
    bool endpoint;
    bool degenerate;
};

class Engine {
public:
    Engine(const LagrangianPath& path, const LagrangianFrame& lambda0)
        : n_(path.n()), PsiT_(vertical_to(lambda0).transpose()), path_(path) {
        span_ = path.b() - path.a();
    }

    IndexResult run();

    Mat form_at(double tstar, double h);  // crossing form on the intersection basis

private:
    GridPoint make_point(double t, const Mat* prev) const;
    std::vector<GridPoint> make_grid(int level) const;
    std::vector<Crossing> analyze(const std::vector<GridPoint>& grid, bool* plateau) const;
    double locate_sign_change(const GridPoint& lo, const GridPoint& hi) const;
    double locate_dip(double tlo, double tmid, double thi) const;
    Mat intersection_basis(const Mat& frame, int* dim) const;
    Mat form_matrix(double tstar, double h, int* dim, double offset = 0.0) const;
    int stable_signature(double tstar, double h, int* dim, bool* degenerate) const;

    int n_;
    Mat PsiT_;
    const LagrangianPath& path_;
    double span_;
};

Mat q_block(const Mat& frame) {
    return frame.topRows(frame.cols());
}

GridPoint Engine::make_point(double t, const Mat* prev) const {
    GridPoint g;
    g.t = t;
    Mat f = PsiT_ * path_.at(t);
    f = orthonormal_columns(f);
    if (prev) f = gauge_align(f, *prev);
    g.frame = std::move(f);
    Eigen::JacobiSVD<Mat> svd(q_block(g.frame));
    g.sigma = svd.singularValues().minCoeff();
    g.dim = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) < kSigmaCross) ++g.dim;
    g.det = q_block(g.frame).determinant();
    return g;
}

std::vector<GridPoint> Engine::make_grid(int level) const {
    // Level 0 uses the path's own samples; each level doubles the density.
    const auto& base = path_.times();
    std::vector<double> ts;
    ts.reserve(base.size() << level);
    for (size_t i = 0; i + 1 < base.size(); ++i) {
        const int pieces = 1 << level;
        for (int k = 0; k < pieces; ++k)
            ts.push_back(base[i] + (base[i + 1] - base[i]) * k / pieces);
    }
    ts.push_back(base.back());
    std::vector<GridPoint> grid;
    grid.reserve(ts.size());
    for (size_t i = 0; i < ts.size(); ++i)
        grid.push_back(make_point(ts[i], grid.empty() ? nullptr : &grid.back().frame));
    return grid;
}

double Engine::locate_sign_change(const GridPoint& lo, const GridPoint& hi) const {
    double ta = lo.t, tb = hi.t;
    Mat fa = lo.frame;
    double da = lo.det;
    const double ttol = std::max(1e-13 * span_, 1e-15);
    while (tb - ta > ttol) {
        const double tm = 0.5 * (ta + tb);
        Mat fm = gauge_align(orthonormal_columns(PsiT_ * path_.at(tm)), fa);
        const double dm = q_block(fm).determinant();
        if ((dm < 0) == (da < 0)) {
            ta = tm;
            fa = std::move(fm);
            da = dm;
        } else {
            tb = tm;
        }
    }
    return 0.5 * (ta + tb);
}

double Engine::locate_dip(double tlo, double tmid, double thi) const {
    // Golden-section minimization of sigma_min of the q-block.
    auto sig = [&](double t) {
        Mat f = orthonormal_columns(PsiT_ * path_.at(t));
        Eigen::JacobiSVD<Mat> svd(q_block(f));
        return svd.singularValues().minCoeff();
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = tlo, b = thi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = sig(c), fd = sig(d);
    (void)tmid;
    const double ttol = std::max(1e-13 * span_, 1e-15);
    while (b - a > ttol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sig(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sig(d);
        }
    }
    return 0.5 * (a + b);
}

Mat Engine::intersection_basis(const Mat& frame, int* dim) const {
    Eigen::JacobiSVD<Mat> svd(q_block(frame), Eigen::ComputeFullV);
    int d = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) < kSigmaCross) ++d;
    *dim = d;
    if (d == 0) return Mat();
    // Right singular vectors with the smallest singular values span the
    // kernel directions; singular values are sorted descending in Eigen.
    return frame * svd.matrixV().rightCols(d);
}

Mat Engine::form_matrix(double tstar, double h, int* dim, double offset) const {
    Mat Fstar = orthonormal_columns(PsiT_ * path_.at(tstar));
    Mat W = intersection_basis(Fstar, dim);
    const int d = *dim;
    if (d == 0) return Mat();
    const double a = path_.a(), b = path_.b();
    auto section = [&](double t) {
        Mat F = orthonormal_columns(PsiT_ * path_.at(t));
        return Mat(F * (F.transpose() * W));  // columns track W inside lambda(t)
    };
    auto pairwise = [&](const Mat& C) {
        Mat f(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) f(i, j) = omega(W.col(i), C.col(j));
        return f;
    };
    Mat Q(d, d);
    if (tstar - a < 2 * h) {  // left endpoint: one-sided, f(tstar) = 0 exactly
        Mat f1 = pairwise(section(tstar + h + offset));
        Mat f2 = pairwise(section(tstar + 2 * (h + offset)));
        Q = (4.0 * f1 - f2) / (2.0 * (h + offset));
    } else if (b - tstar < 2 * h) {
        Mat f1 = pairwise(section(tstar - h - offset));
        Mat f2 = pairwise(section(tstar - 2 * (h + offset)));
        Q = -(4.0 * f1 - f2) / (2.0 * (h + offset));
    } else {
        // Possibly asymmetric stencil around t*; the mean value theorem still
        // reads off the first derivative of f(t) = omega(v, w(t)).
        Mat fp = pairwise(section(tstar + offset + h));
        Mat fm = pairwise(section(tstar + offset - h));
        Q = (fp - fm) / (2.0 * h);
    }
    return 0.5 * (Q + Q.transpose());
}

// Eigenvalues below both the relative threshold and an absolute floor (the
// finite-difference resolution of the form) count as zero.
int signature_of(const Mat& Q, double tol, double floor_abs, int* zeros) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Q);
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    int pos = 0, neg = 0, zero = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()(i);
        if (std::abs(ev) < std::max(tol * scale, floor_abs))
            ++zero;
        else if (ev > 0)
            ++pos;
        else
            ++neg;
    }
    *zeros = zero;
    return pos - neg;
}

int Engine::stable_signature(double tstar, double h0, int* dim, bool* degenerate) const {
    // Attempt 0: centered stencil with a Richardson check (halving h must not
    // change the signature). If the form looks degenerate, retry with the
    // stencil shifted by +-eps; if the shifted signatures disagree, the
    // crossing is non-regular and we refuse.
    *degenerate = false;
    const double floor_abs = 1e-6;
    auto attempt = [&](double offset, int* d_out, bool* clean) -> int {
        int d1 = 0, d2 = 0, z1 = 0, z2 = 0;
        Mat Q1 = form_matrix(tstar, h0, &d1, offset);
        Mat Q2 = form_matrix(tstar, 0.5 * h0, &d2, offset);
        *clean = false;
        *d_out = d1;
        if (d1 == 0 || d1 != d2) return 0;
        const int s1 = signature_of(Q1, tols().cross, floor_abs, &z1);
        const int s2 = signature_of(Q2, tols().cross, floor_abs, &z2);
        if (z1 == 0 && z2 == 0 && s1 == s2) {
            *clean = true;
            return s1;
        }
        return 0;
    };
    int d0 = 0;
    bool clean0 = false;
    const int s0 = attempt(0.0, &d0, &clean0);
    if (clean0) {
        *dim = d0;
        return s0;
    }
    const double eps = 1e-6 * span_;
    int dp = 0, dm = 0;
    bool cp = false, cm = false;
    const int sp = attempt(+eps, &dp, &cp);
    const int sm = attempt(-eps, &dm, &cm);
    if (cp && cm && dp == dm && sp == sm) {
        *dim = dp;
        return sp;
    }
    *degenerate = true;
    *dim = 0;
    return 0;
}

std::vector<Crossing> Engine::analyze(const std::vector<GridPoint>& grid, bool* plateau) const {
    *plateau = false;
    const int m = static_cast<int>(grid.size());
    // Zero-axiom branch: constant positive intersection dimension everywhere.
    {
        int dmin = grid[0].dim, dmax = grid[0].dim;
        for (const auto& g : grid) {
            dmin = std::min(dmin, g.dim);
            dmax = std::max(dmax, g.dim);
        }
        if (dmin == dmax && dmin > 0) {
            *plateau = true;
            return {};
        }
        // Partial plateaus (a run of >= 2 interior samples pinned to the
        // crossing set) are not resolvable by isolated-crossing analysis.
        int run = 0;
        for (const auto& g : grid) {
            run = (g.dim > 0) ? run + 1 : 0;
            if (run >= 3)
                throw DegeneratePathError(
                    "maslov_index: intersection dimension constant on a strict "
                    "subinterval; non-regular path");
        }
    }

    std::vector<double> candidates;
    if (grid.front().dim > 0) candidates.push_back(grid.front().t);
    if (grid.back().dim > 0) candidates.push_back(grid.back().t);
    for (int i = 0; i + 1 < m; ++i) {
        const auto& lo = grid[i];
        const auto& hi = grid[i + 1];
        if (lo.dim > 0 && i > 0) candidates.push_back(lo.t);
        const bool lo_clean = lo.dim == 0, hi_clean = hi.dim == 0;
        if (lo_clean && hi_clean && (lo.det < 0) != (hi.det < 0))
            candidates.push_back(locate_sign_change(lo, hi));
    }
    // Dips of sigma_min that do not flip the determinant (even-dimensional
    // crossings): inspect strict local minima below the suspicion level.
    for (int i = 1; i + 1 < m; ++i) {
        if (grid[i].dim > 0) continue;
        if (grid[i].sigma <= grid[i - 1].sigma && grid[i].sigma <= grid[i + 1].sigma &&
            grid[i].sigma < kSigmaSuspicion) {
            const double t = locate_dip(grid[i - 1].t, grid[i].t, grid[i + 1].t);
            Mat f = orthonormal_columns(PsiT_ * path_.at(t));
            Eigen::JacobiSVD<Mat> svd(q_block(f));
            if (svd.singularValues().minCoeff() < kSigmaCross) candidates.push_back(t);
        }
    }

    std::sort(candidates.begin(), candidates.end());
    const double cluster = std::max(1e-7 * span_, 1e-10);
    std::vector<double> merged;
    for (double t : candidates) {
        if (merged.empty() || t - merged.back() > cluster)
            merged.push_back(t);
    }

    std::vector<Crossing> out;
    const double base_dt = span_ / static_cast<double>(m - 1);
    const double h0 = std::max(1e-6 * std::max(span_, 1.0), 1e-4 * base_dt);
    for (double t : merged) {
        Crossing c;
        const bool at_a = (t - path_.a()) < cluster;
        const bool at_b = (path_.b() - t) < cluster;
        c.t = at_a ? path_.a() : (at_b ? path_.b() : t);
        c.endpoint = at_a || at_b;
        c.signature = stable_signature(c.t, h0, &c.dim, &c.degenerate);
        out.push_back(c);
    }
    return out;
}

IndexResult Engine::run() {
    std::optional<std::vector<Crossing>> prev;
    int stable_levels = 0;
    std::vector<Crossing> accepted;
    int level = 0;
    for (; level <= kMaxRefinements; ++level) {
        auto grid = make_grid(level);
        bool plateau = false;
        auto cur = analyze(grid, &plateau);
        if (plateau) {
            // Constant intersection dimension: index 0 by the zero property.
            IndexResult r;
            r.value = HalfInt(0);
            r.refinements_used = level;
            r.degenerate_flag = true;
            return r;
        }
        bool any_degenerate = false;
        for (const auto& c : cur)
            if (c.degenerate) any_degenerate = true;
        if (any_degenerate && level >= 1)
            throw DegeneratePathError(
                "maslov_index: non-regular crossing persists after perturbation fallback");
        bool same = false;
        if (prev && !any_degenerate && prev->size() == cur.size()) {
            same = true;
            const double ttol = std::max(1e-6 * span_, 1e-9);
            for (size_t i = 0; i < cur.size(); ++i) {
                const auto& p = (*prev)[i];
                const auto& c = cur[i];
                if (std::abs(p.t - c.t) > ttol || p.dim != c.dim ||
                    p.signature != c.signature || p.endpoint != c.endpoint)
                    same = false;
            }
        }
        if (same) {
            ++stable_levels;
            if (stable_levels >= 1) {  // stable on two consecutive refinements
                accepted = cur;
                break;
            }
        } else {
            stable_levels = 0;
        }
        prev = std::move(cur);
        if (level == kMaxRefinements)
            throw DegeneratePathError(
                "maslov_index: crossing structure failed to stabilize under refinement "
                "(non-regular path)");
    }

    IndexResult result;
    long long doubled = 0;
    for (const auto& c : accepted) {
        if (c.degenerate)
            throw DegeneratePathError("maslov_index: unresolved degenerate crossing at t = " +
                                      std::to_string(c.t));
        doubled += c.endpoint ? c.signature : 2 * c.signature;
        result.crossings.push_back({c.t, c.dim, c.signature, c.endpoint});
    }
    result.value = HalfInt::from_doubled(doubled);
    result.refinements_used = level;
    return result;
}

Mat Engine::form_at(double tstar, double h) {
    int dim = 0;
    Mat Q = form_matrix(tstar, h, &dim);
    if (dim == 0)
        throw std::invalid_argument("crossing_form: no intersection at t*");
    return Q;
}

} // namespace

Mat crossing_form(const LagrangianPath& path, const LagrangianFrame& lambda0,
                  double tstar, double h) {
    Engine eng(path, lambda0);
    if (h <= 0) {
        double dt = path.b() - path.a();
        for (int i = 0; i + 1 < path.samples(); ++i)
            dt = std::min(dt, path.times()[i + 1] - path.times()[i]);
        h = std::max(1e-6 * std::max(path.b() - path.a(), 1.0), 1e-4 * dt);
    }
    return eng.form_at(tstar, h);
}

IndexResult maslov_index(const LagrangianPath& path, const LagrangianFrame& lambda0) {
    if (path.n() != lambda0.n())
        throw std::invalid_argument("maslov_index: dimension mismatch");
    Engine eng(path, lambda0);
    return eng.run();
}

IndexResult conley_zehnder(const SymplecticPath& path) {
    const int n = path.n();
    IndexResult r = maslov_index(path.graph_path(), SymplecticPath::diagonal_std(n));
    const Mat I = Mat::Identity(2 * n, 2 * n);
    const bool starts_at_id = inf_norm(path.matrix(0) - I) < 1e-9;
    // With Phi(a) = I and det(Phi(b) - I) != 0 the index is an integer: the
    // engine then sees no crossing at b, and the full crossing at a has even
    // signature. Half-integers are legitimate exactly when b is a crossing.
    bool crossing_at_b = false;
    for (const auto& c : r.crossings)
        if (c.is_endpoint && c.time > path.a()) crossing_at_b = true;
    if (starts_at_id && !crossing_at_b && !r.value.is_integer())
        throw DegeneratePathError("conley_zehnder: non-integer index on a nondegenerate path");
    return r;
}

HalfInt hormander_defect(const SymplecticPath& path, const LagrangianFrame& lambda0,
                         IndexResult* cz_out, IndexResult* mas_out) {
    IndexResult cz = conley_zehnder(path);
    IndexResult mas = maslov_index(path.apply(lambda0), lambda0);
    if (cz_out) *cz_out = cz;
    if (mas_out) *mas_out = mas;
    return cz.value - mas.value;
}

} // namespace msl

#include "arz/stability.hpp"

#include "arz/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace arz {

namespace {

Eigen::Matrix4d to_eigen(const CouplingMatrix& H) {
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            m(i, j) = H(i, j);
        }
    }
    return m;
}

using Point = std::array<double, 3>;

// Nelder-Mead on a 3-dimensional objective; returns the best vertex.
Point nelder_mead(const std::function<double(const Point&)>& f, Point start, double step, double tol,
                  int max_evals, double& best_value) {
    std::array<Point, 4> simplex;
    std::array<double, 4> values;
    simplex[0] = start;
    for (int k = 0; k < 3; ++k) {
        simplex[k + 1] = start;
        simplex[k + 1][k] += step;
    }
    int evals = 0;
    for (int k = 0; k < 4; ++k) {
        values[k] = f(simplex[k]);
        ++evals;
    }
    auto combine = [](const Point& a, const Point& b, double t) {
        Point p;
        for (int k = 0; k < 3; ++k) {
            p[k] = a[k] + t * (b[k] - a[k]);
        }
        return p;
    };
    while (evals < max_evals) {
        std::array<int, 4> order{0, 1, 2, 3};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return values[a] < values[b]; });
        std::array<Point, 4> s;
        std::array<double, 4> v;
        for (int k = 0; k < 4; ++k) {
            s[k] = simplex[order[k]];
            v[k] = values[order[k]];
        }
        simplex = s;
        values = v;
        double spread = 0.0;
        for (int k = 1; k < 4; ++k) {
            for (int d = 0; d < 3; ++d) {
                spread = std::max(spread, std::abs(simplex[k][d] - simplex[0][d]));
            }
        }
        if (values[3] - values[0] <= tol && spread <= 1e-9) {
            break;
        }
        Point centroid{0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k) {
            for (int d = 0; d < 3; ++d) {
                centroid[d] += simplex[k][d] / 3.0;
            }
        }
        const Point reflected = combine(centroid, simplex[3], -1.0);
        const double fr = f(reflected);
        ++evals;
        if (fr < values[0]) {
            const Point expanded = combine(centroid, simplex[3], -2.0);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) {
                simplex[3] = expanded;
                values[3] = fe;
            } else {
                simplex[3] = reflected;
                values[3] = fr;
            }
            continue;
        }
        if (fr < values[2]) {
            simplex[3] = reflected;
            values[3] = fr;
            continue;
        }
        const bool outside = fr < values[3];
        const Point contracted = combine(centroid, outside ? reflected : simplex[3], 0.5);
        const double fc = f(contracted);
        ++evals;
        if (fc < std::min(fr, values[3])) {
            simplex[3] = contracted;
            values[3] = fc;
            continue;
        }
        for (int k = 1; k < 4; ++k) {
            simplex[k] = combine(simplex[0], simplex[k], 0.5);
            values[k] = f(simplex[k]);
            ++evals;
        }
    }
    const auto best = std::min_element(values.begin(), values.end()) - values.begin();
    best_value = values[best];
    return simplex[best];
}

}  // namespace

CouplingMatrix coupling_matrix(const NetworkParams& net) {
    const double L = net.length();
    const double r1 = net.ss1.r;
    const double r2 = net.ss2.r;
    const double e1 = std::exp(-L / (net.seg1.tau * net.ss1.v_star));
    const double e2 = std::exp(-L / (net.seg2.tau * net.ss2.v_star));
    CouplingMatrix H;
    H(0, 3) = 1.0;
    H(1, 2) = r2 / r1;
    H(1, 3) = (r1 - r2) / (1.0 - r1);
    H(2, 0) = e1 / r2;
    H(3, 1) = r1 * e2;
    return H;
}

CouplingMatrix row_coupling_matrix(const BoundaryRows& rows) {
    CouplingMatrix H;
    H(0, 1) = rows.junction_w;
    H(1, 3) = rows.inlet;
    H(2, 0) = rows.outlet;
    H(3, 2) = rows.junction_v1;
    H(3, 1) = rows.junction_w2;
    return H;
}

double scaled_norm(const CouplingMatrix& H, const std::array<double, 3>& log_scales) {
    Eigen::Vector4d d(1.0, std::exp(log_scales[0]), std::exp(log_scales[1]), std::exp(log_scales[2]));
    Eigen::Matrix4d m = to_eigen(H);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            m(i, j) *= d(i) / d(j);
        }
    }
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(m);
    return svd.singularValues()(0);
}

double spectral_radius(const CouplingMatrix& H) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(to_eigen(H), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double abs_spectral_radius(const CouplingMatrix& H) {
    Eigen::Matrix4d m = to_eigen(H).cwiseAbs();
    Eigen::EigenSolver<Eigen::Matrix4d> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

double sp1(const CouplingMatrix& H, const Sp1Options& opts) {
    for (const auto& row : H.entries) {
        for (double e : row) {
            if (!std::isfinite(e)) {
                throw ValidationError("sp1: non-finite matrix entry");
            }
        }
    }
    auto objective = [&](const Point& p) {
        for (double t : p) {
            if (std::abs(t) > 200.0) {
                return std::numeric_limits<double>::infinity();
            }
        }
        return scaled_norm(H, p);
    };
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> uni(-3.0, 3.0);
    Point best{0.0, 0.0, 0.0};
    double best_value = objective(best);
    for (int r = 0; r < opts.restarts; ++r) {
        Point start = r == 0 ? Point{0.0, 0.0, 0.0} : Point{uni(rng), uni(rng), uni(rng)};
        double value = 0.0;
        Point p = nelder_mead(objective, start, 1.0, opts.tol, 4000, value);
        // Polish from the current optimum with shrinking simplices; the objective has kinks.
        for (double step : {0.1, 1e-2, 1e-3, 1e-4}) {
            double polished = 0.0;
            Point q = nelder_mead(objective, p, step, opts.tol * 1e-3, 4000, polished);
            if (polished <= value) {
                p = q;
                value = polished;
            }
        }
        if (value < best_value) {
            best_value = value;
            best = p;
        }
    }
    return best_value;
}

ClosedForm closed_form_condition(const NetworkParams& net) {
    const double L = net.length();
    const double r1 = net.ss1.r;
    const double r2 = net.ss2.r;
    const double e1 = std::exp(-L / (net.seg1.tau * net.ss1.v_star));
    const double e2 = std::exp(-L / (net.seg2.tau * net.ss2.v_star));
    ClosedForm cf;
    cf.applicable = r1 >= r2;
    cf.a = ((r1 - r2) / (1.0 - r1)) * r1 * e2;
    cf.b = e1 * e2;
    cf.value = std::sqrt((cf.a + std::sqrt(cf.a * cf.a + 4.0 * cf.b)) / 2.0);
    return cf;
}

DifferenceModel difference_model_from_rows(const BoundaryRows& rows, const NetworkParams& net) {
    DifferenceModel m;
    m.coef_short = rows.junction_w2 * rows.inlet;
    m.coef_long = rows.outlet * rows.junction_v1 * rows.inlet * rows.junction_w;
    m.kappa1 = net.ss1.kappa;
    m.kappa2 = net.ss2.kappa;
    return m;
}

DifferenceModel build_difference_model(const NetworkParams& net, RowModel model) {
    if (net.ss1.r == 1.0 || net.ss2.r == 0.0) {
        throw ValidationError("difference model undefined for r_1 = 1 or r_2 = 0");
    }
    return difference_model_from_rows(boundary_rows(net, model), net);
}

DifferenceSeries simulate_difference(const DifferenceModel& model,
                                     const std::function<double(double)>& history, double horizon,
                                     double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0)) {
        throw ValidationError("simulate_difference: horizon and dt must be positive");
    }
    if (!(model.kappa1 > 0.0 && model.kappa2 > 0.0)) {
        throw ValidationError("simulate_difference: delays must be positive");
    }
    const long n1 = std::max(1L, std::lround(model.kappa1 / dt));
    const long n2 = std::max(1L, std::lround(model.kappa2 / dt));
    const long nT = n1 + n2;
    const long nh = static_cast<long>(std::ceil(horizon / dt - 1e-9));
    std::vector<double> buf(static_cast<std::size_t>(nT + nh + 1));
    for (long k = -nT; k < 0; ++k) {
        buf[k + nT] = history(k * dt);
    }
    DifferenceSeries out;
    out.dt = dt;
    out.delay_error = std::max(std::abs(n2 * dt - model.kappa2), std::abs(nT * dt - model.period()));
    bool finite = true;
    for (long k = 0; k <= nh; ++k) {
        const double x = model.coef_short * buf[k - n2 + nT] + model.coef_long * buf[k];
        buf[k + nT] = x;
        finite = finite && std::isfinite(x);
        out.t.push_back(k * dt);
        out.x.push_back(x);
    }
    double peak = 0.0;
    for (double x : out.x) {
        peak = std::max(peak, std::abs(x));
    }
    out.rate = fit_envelope_rate(out.t, out.x, model.period(), 1e-12 * peak);
    const bool small_gain = std::abs(model.coef_short) + std::abs(model.coef_long) < 1.0;
    out.diverged = !finite || (!small_gain && out.rate < 0.0);
    return out;
}

double fit_envelope_rate(const std::vector<double>& t, const std::vector<double>& x, double window,
                         double floor) {
    if (t.size() != x.size() || t.empty() || !(window > 0.0)) {
        throw ValidationError("fit_envelope_rate: bad series");
    }
    std::vector<double> pt;
    std::vector<double> px;
    const double t0 = t.front();
    std::size_t i = 0;
    for (int w = 0;; ++w) {
        const double lo = t0 + w * window;
        const double hi = lo + window;
        if (hi > t.back() + 1e-9 * window) {
            break;
        }
        double peak = -1.0;
        double tpeak = lo;
        for (; i < t.size() && t[i] < hi; ++i) {
            if (std::abs(x[i]) > peak) {
                peak = std::abs(x[i]);
                tpeak = t[i];
            }
        }
        if (peak > floor && peak > 0.0) {
            pt.push_back(tpeak);
            px.push_back(std::log(peak));
        }
    }
    if (pt.size() < 2) {
        return 0.0;
    }
    const double n = static_cast<double>(pt.size());
    double st = 0.0, sx = 0.0, stt = 0.0, stx = 0.0;
    for (std::size_t k = 0; k < pt.size(); ++k) {
        st += pt[k];
        sx += px[k];
        stt += pt[k] * pt[k];
        stx += pt[k] * px[k];
    }
    const double denom = n * stt - st * st;
    if (denom <= 0.0) {
        return 0.0;
    }
    return -(n * stx - st * sx) / denom;
}

}  // namespace arz

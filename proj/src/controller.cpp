#include "arz/controller.hpp"

#include "arz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace arz {

namespace {

void check_pair(const FieldState& s, const KernelTable& k, int segment_id) {
    s.validate();
    if (s.rep != Representation::scaled) {
        throw ValidationError("controller expects scaled states");
    }
    if (s.segment_id != segment_id || k.segment_id() != segment_id) {
        throw ValidationError("controller: segment id mismatch");
    }
    if (static_cast<int>(s.size()) != k.M() + 1) {
        throw ValidationError("grid mismatch between state (N = " + std::to_string(s.size() - 1) +
                              ") and kernel table (M = " + std::to_string(k.M()) + ")");
    }
}

// Trapezoid of K(i, j) a_j + Kvv(i, j) b_j over the in-domain j of row i.
double row_integral(const KernelTable& k, int i, const std::vector<double>& a, const std::vector<double>& b) {
    const int M = k.M();
    const int jlo = k.segment_id() == 1 ? i : 0;
    const int jhi = k.segment_id() == 1 ? M : i;
    if (jhi <= jlo) {
        return 0.0;
    }
    double sum = 0.0;
    for (int j = jlo; j <= jhi; ++j) {
        const double w = (j == jlo || j == jhi) ? 0.5 : 1.0;
        sum += w * (k.kvw(i, j) * a[j] + k.kvv(i, j) * b[j]);
    }
    return sum * k.step();
}

}  // namespace

double trapezoid(const std::vector<double>& y, double h) {
    if (y.size() < 2) {
        return 0.0;
    }
    double sum = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        sum += y[i];
    }
    return sum * h;
}

TargetState backstepping_transform(const FieldState& seg1, const FieldState& seg2,
                                   const KernelTable& k1, const KernelTable& k2) {
    check_pair(seg1, k1, 1);
    check_pair(seg2, k2, 2);
    const int n = static_cast<int>(seg1.size());
    TargetState t;
    t.alpha1 = seg1.a;
    t.alpha2 = seg2.a;
    t.beta1.resize(n);
    t.beta2.resize(n);
    for (int i = 0; i < n; ++i) {
        t.beta1[i] = seg1.b[i] - row_integral(k1, i, seg1.a, seg1.b);
        t.beta2[i] = seg2.b[i] - row_integral(k2, i, seg2.a, seg2.b);
    }
    return t;
}

std::pair<FieldState, FieldState> inverse_transform(const TargetState& target, const KernelTable& k1,
                                                    const KernelTable& k2) {
    const int M = k1.M();
    if (k2.M() != M || static_cast<int>(target.beta1.size()) != M + 1 ||
        static_cast<int>(target.beta2.size()) != M + 1 || target.alpha1.size() != target.beta1.size() ||
        target.alpha2.size() != target.beta2.size()) {
        throw ValidationError("inverse_transform: grid mismatch");
    }
    const double h = k1.step();
    FieldState s1 = make_field(1, k1.length(), M, Representation::scaled);
    FieldState s2 = make_field(2, k2.length(), M, Representation::scaled);
    s1.a = target.alpha1;
    s2.a = target.alpha2;
    // Segment 1 integrates over [x, L]: solve from the outlet inward.
    for (int i = M; i >= 0; --i) {
        double known = 0.0;
        for (int j = i; j <= M; ++j) {
            const double w = (i == M) ? 0.0 : ((j == i || j == M) ? 0.5 : 1.0);
            known += w * k1.kvw(i, j) * s1.a[j];
            if (j > i) {
                known += w * k1.kvv(i, j) * s1.b[j];
            }
        }
        const double diag = (i == M) ? 0.0 : 0.5 * h * k1.kvv(i, i);
        s1.b[i] = (target.beta1[i] + h * known) / (1.0 - diag);
    }
    // Segment 2 integrates over [-L, x]: solve from the inlet forward.
    for (int i = 0; i <= M; ++i) {
        double known = 0.0;
        for (int j = 0; j <= i; ++j) {
            const double w = (i == 0) ? 0.0 : ((j == 0 || j == i) ? 0.5 : 1.0);
            known += w * k2.kvw(i, j) * s2.a[j];
            if (j < i) {
                known += w * k2.kvv(i, j) * s2.b[j];
            }
        }
        const double diag = (i == 0) ? 0.0 : 0.5 * h * k2.kvv(i, i);
        s2.b[i] = (target.beta2[i] + h * known) / (1.0 - diag);
    }
    return {s1, s2};
}

JunctionIntegrals junction_integrals(const FieldState& seg1, const FieldState& seg2,
                                     const KernelTable& k1, const KernelTable& k2) {
    check_pair(seg1, k1, 1);
    check_pair(seg2, k2, 2);
    return {row_integral(k1, 0, seg1.a, seg1.b), row_integral(k2, k2.M(), seg2.a, seg2.b)};
}

double control_input(const FieldState& seg1, const FieldState& seg2, const KernelTable& k1,
                     const KernelTable& k2, const BoundaryRows& rows) {
    if (rows.control_gain == 0.0) {
        throw ValidationError("control gain singular (r_2 = 1)");
    }
    const JunctionIntegrals I = junction_integrals(seg1, seg2, k1, k2);
    return (I.seg2 - rows.junction_v1 * I.seg1) / rows.control_gain;
}

double control_input(const FieldState& seg1, const FieldState& seg2, const KernelTable& k1,
                     const KernelTable& k2, const NetworkParams& net, RowModel model) {
    return control_input(seg1, seg2, k1, k2, boundary_rows(net, model));
}

TargetResidual target_residual(const std::vector<double>& times, const std::vector<TargetState>& states,
                               const NetworkParams& net, const BoundaryRows& rows) {
    if (times.size() < 3 || states.size() != times.size()) {
        throw ValidationError("target_residual needs at least 3 time samples");
    }
    const int n = static_cast<int>(states.front().alpha1.size());
    const double h = net.length() / (n - 1);
    const double v1 = net.ss1.lambda_w, v2 = net.ss2.lambda_w;
    const double l1 = net.ss1.lambda_v, l2 = net.ss2.lambda_v;
    TargetResidual res;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const TargetState& s = states[k];
        const double defects[4] = {
            s.alpha1.front() - rows.junction_w * s.alpha2.back(),
            s.alpha2.front() - rows.inlet * s.beta2.front(),
            s.beta1.back() - rows.outlet * s.alpha1.back(),
            s.beta2.back() - rows.junction_v1 * s.beta1.front() - rows.junction_w2 * s.alpha2.back()};
        for (double d : defects) {
            res.boundary = std::max(res.boundary, std::abs(d));
        }
        if (k + 1 == states.size()) {
            break;
        }
        const TargetState& nx = states[k + 1];
        const double dt = times[k + 1] - times[k];
        if (!(dt > 0.0)) {
            throw ValidationError("target_residual: times must increase");
        }
        for (int i = 1; i < n; ++i) {
            const double ra1 = (nx.alpha1[i] - s.alpha1[i]) / dt + v1 * (s.alpha1[i] - s.alpha1[i - 1]) / h;
            const double ra2 = (nx.alpha2[i] - s.alpha2[i]) / dt + v2 * (s.alpha2[i] - s.alpha2[i - 1]) / h;
            res.transport = std::max({res.transport, std::abs(ra1), std::abs(ra2)});
        }
        for (int i = 0; i + 1 < n; ++i) {
            const double rb1 = (nx.beta1[i] - s.beta1[i]) / dt - l1 * (s.beta1[i + 1] - s.beta1[i]) / h;
            const double rb2 = (nx.beta2[i] - s.beta2[i]) / dt - l2 * (s.beta2[i + 1] - s.beta2[i]) / h;
            res.transport = std::max({res.transport, std::abs(rb1), std::abs(rb2)});
        }
    }
    return res;
}

void make_compatible(const FieldState& seg1, FieldState& seg2, const KernelTable& k1,
                     const KernelTable& k2, const BoundaryRows& rows) {
    const JunctionIntegrals I = junction_integrals(seg1, seg2, k1, k2);
    const double L = k2.length();
    std::vector<double> psi(seg2.size());
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double s = std::sin(std::numbers::pi * (seg2.grid[j] + L) / (2.0 * L));
        psi[j] = s * s;
    }
    const std::vector<double> zero(psi.size(), 0.0);
    const double psi_integral = row_integral(k2, k2.M(), zero, psi);
    const double want = rows.junction_v1 * (seg1.b.front() - I.seg1) + rows.junction_w2 * seg2.a.back() + I.seg2;
    const double mu = (want - seg2.b.back()) / (1.0 - psi_integral);
    for (std::size_t j = 0; j < psi.size(); ++j) {
        seg2.b[j] += mu * psi[j];
    }
}

}  // namespace arz

#include "arz/kernels.hpp"

#include "arz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace arz {

namespace {

// Linear interpolation of uniformly sampled values on [0, length].
double interp_uniform(const std::vector<double>& values, double h, double s) {
    const int M = static_cast<int>(values.size()) - 1;
    double u = s / h;
    if (u <= 0.0) {
        return values.front();
    }
    if (u >= M) {
        return values.back();
    }
    const int k = std::min(static_cast<int>(u), M - 1);
    const double t = u - k;
    return (1.0 - t) * values[k] + t * values[k + 1];
}

// One sweep: given the current edge row K(x_p, L), rebuild both reference tables.
void sweep(const KernelProblem& pb, const std::vector<double>& edge, std::vector<double>& kvw,
           std::vector<double>& kvv, int M) {
    const double h = pb.length / M;
    const double L = pb.length;
    const double cspeed = pb.lambda + pb.speed;
    const double fastest = std::max(pb.lambda, pb.speed);
    for (int p = 0; p <= M; ++p) {
        const double x = p * h;
        for (int q = p; q <= M; ++q) {
            const double xi = (q == M) ? L : q * h;
            // Kvv is constant along xi - x and equals edge_gain K(., L) where it meets xi = L.
            kvv[p * (M + 1) + q] = pb.edge_gain * edge[p + M - q];
            // Kvw: integrate back along (x + lambda s, xi - speed s) to the diagonal.
            const double s_end = (xi - x) / cspeed;
            const double x_diag = x + pb.lambda * s_end;
            double acc = 0.0;
            if (s_end > 0.0) {
                const int n = std::max(1, static_cast<int>(std::ceil(s_end * fastest / h - 1e-12)));
                const double ds = s_end / n;
                for (int k = 0; k < n; ++k) {
                    const double s = (k + 0.5) * ds;
                    acc += pb.source(xi - pb.speed * s) *
                           interp_uniform(edge, h, x + L - xi + cspeed * s);
                }
                acc *= pb.edge_gain * ds;
            }
            kvw[p * (M + 1) + q] = pb.source(x_diag) / cspeed - acc;
        }
    }
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

KernelProblem kernel_problem(int segment_id, const NetworkParams& net, const BoundaryRows& rows) {
    const SegmentParams& seg = net.seg(segment_id);
    const SteadyState& ss = net.ss(segment_id);
    KernelProblem pb;
    pb.length = net.length();
    pb.speed = ss.lambda_w;
    pb.lambda = ss.lambda_v;
    const double tau = seg.tau;
    const double v = ss.v_star;
    if (segment_id == 1) {
        if (rows.outlet == 0.0) {
            throw ValidationError("outlet reflection gain must be nonzero");
        }
        pb.edge_gain = ss.lambda_w / (ss.lambda_v * rows.outlet);
        pb.source = [tau, v](double s) { return -std::exp(-s / (tau * v)) / tau; };
    } else {
        pb.edge_gain = ss.lambda_w * rows.inlet / ss.lambda_v;
        pb.source = [tau, v](double s) { return std::exp(s / (tau * v)) / tau; };
    }
    return pb;
}

KernelTable::KernelTable(int segment_id, int M, double length)
    : segment_id_(segment_id), M_(M), length_(length) {
    if (segment_id != 1 && segment_id != 2) {
        throw ValidationError("kernel table segment id must be 1 or 2");
    }
    if (M < 1 || !(length > 0.0)) {
        throw ValidationError("kernel table needs M >= 1 and positive length");
    }
    const std::size_t n = static_cast<std::size_t>(M + 1) * (M + 1);
    ref_kvw_.assign(n, 0.0);
    ref_kvv_.assign(n, 0.0);
}

double KernelTable::node(int i) const {
    if (i == M_) {
        return segment_id_ == 1 ? length_ : 0.0;
    }
    return (segment_id_ == 1 ? 0.0 : -length_) + i * step();
}

bool KernelTable::in_domain(int i, int j) const {
    if (i < 0 || j < 0 || i > M_ || j > M_) {
        return false;
    }
    return segment_id_ == 1 ? i <= j : j <= i;
}

std::size_t KernelTable::ref_index(int i, int j) const {
    if (segment_id_ == 2) {
        i = M_ - i;
        j = M_ - j;
    }
    return static_cast<std::size_t>(i) * (M_ + 1) + j;
}

void KernelTable::set(int i, int j, double kvw, double kvv) {
    ref_kvw_[ref_index(i, j)] = kvw;
    ref_kvv_[ref_index(i, j)] = kvv;
}

double KernelTable::max_abs() const {
    double m = 0.0;
    for (int p = 0; p <= M_; ++p) {
        for (int q = p; q <= M_; ++q) {
            m = std::max({m, std::abs(ref_kvw(p, q)), std::abs(ref_kvv(p, q))});
        }
    }
    return m;
}

KernelTable solve_kernels(const KernelProblem& problem, int segment_id, const KernelOptions& opts) {
    if (opts.M < 16) {
        throw ValidationError("kernel resolution M must be at least 16");
    }
    if (!(opts.tol > 0.0)) {
        throw ValidationError("kernel tolerance must be positive");
    }
    const int M = opts.M;
    KernelTable table(segment_id, M, problem.length);
    std::vector<double> edge(M + 1, 0.0);
    if (!opts.initial_edge.empty()) {
        if (static_cast<int>(opts.initial_edge.size()) != M + 1) {
            throw ValidationError("initial edge guess must have M + 1 samples");
        }
        edge = opts.initial_edge;
    }
    const std::size_t n = static_cast<std::size_t>(M + 1) * (M + 1);
    std::vector<double> kvw(n, 0.0), kvv(n, 0.0), next_vw(n, 0.0), next_vv(n, 0.0);
    for (int p = 0; p <= M; ++p) {
        kvw[p * (M + 1) + M] = edge[p];
    }
    double change = 0.0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        sweep(problem, edge, next_vw, next_vv, M);
        change = 0.0;
        for (int p = 0; p <= M; ++p) {
            for (int q = p; q <= M; ++q) {
                const std::size_t k = static_cast<std::size_t>(p) * (M + 1) + q;
                change = std::max({change, std::abs(next_vw[k] - kvw[k]), std::abs(next_vv[k] - kvv[k])});
            }
        }
        std::swap(kvw, next_vw);
        std::swap(kvv, next_vv);
        for (int p = 0; p <= M; ++p) {
            edge[p] = kvw[p * (M + 1) + M];
        }
        table.change_history.push_back(change);
        if (!std::isfinite(change)) {
            throw NumericalError("kernel iteration produced non-finite values");
        }
        if (change < opts.tol) {
            table.iterations = it;
            for (int p = 0; p <= M; ++p) {
                for (int q = p; q <= M; ++q) {
                    table.ref_kvw(p, q) = kvw[p * (M + 1) + q];
                    table.ref_kvv(p, q) = problem.edge_gain * edge[p + M - q];
                }
            }
            return table;
        }
    }
    std::ostringstream msg;
    msg << "kernel iteration did not converge in " << opts.max_iterations
        << " iterations; last change " << change;
    throw NumericalError(msg.str());
}

KernelTable solve_kernels(int segment_id, const NetworkParams& net, const BoundaryRows& rows,
                          const KernelOptions& opts) {
    return solve_kernels(kernel_problem(segment_id, net, rows), segment_id, opts);
}

KernelResidual kernel_residual(const KernelTable& table, const KernelProblem& problem) {
    const int M = table.M();
    if (M < 8) {
        throw ValidationError("kernel residual needs M >= 8");
    }
    const double h = table.step();
    const double cspeed = problem.lambda + problem.speed;
    KernelResidual res;
    for (int p = 1; p <= M - 1; ++p) {
        for (int q = p + 1; q <= M - 1; ++q) {
            const double dx_vw = (table.ref_kvw(p + 1, q) - table.ref_kvw(p - 1, q)) / (2.0 * h);
            const double dxi_vw = (table.ref_kvw(p, q + 1) - table.ref_kvw(p, q - 1)) / (2.0 * h);
            const double dx_vv = (table.ref_kvv(p + 1, q) - table.ref_kvv(p - 1, q)) / (2.0 * h);
            const double dxi_vv = (table.ref_kvv(p, q + 1) - table.ref_kvv(p, q - 1)) / (2.0 * h);
            const double r1 = problem.lambda * dx_vw - problem.speed * dxi_vw -
                              problem.source(q * h) * table.ref_kvv(p, q);
            const double r2 = dx_vv + dxi_vv;
            res.pde = std::max({res.pde, std::abs(r1), std::abs(r2)});
        }
    }
    for (int p = 0; p <= M; ++p) {
        const double x = p == M ? problem.length : p * h;
        res.bc = std::max(res.bc, std::abs(table.ref_kvw(p, p) - problem.source(x) / cspeed));
        res.bc = std::max(res.bc, std::abs(table.ref_kvv(p, M) - problem.edge_gain * table.ref_kvw(p, M)));
    }
    return res;
}

double table_difference(const KernelTable& coarse, const KernelTable& fine) {
    if (fine.M() != 2 * coarse.M()) {
        throw ValidationError("table_difference expects the fine table at twice the resolution");
    }
    double d = 0.0;
    for (int p = 0; p <= coarse.M(); ++p) {
        for (int q = p; q <= coarse.M(); ++q) {
            d = std::max({d, std::abs(coarse.ref_kvw(p, q) - fine.ref_kvw(2 * p, 2 * q)),
                          std::abs(coarse.ref_kvv(p, q) - fine.ref_kvv(2 * p, 2 * q))});
        }
    }
    return d;
}

KernelRow interpolate_kernel_row(const KernelTable& table, double x) {
    const int M = table.M();
    const double h = table.step();
    const double x0 = table.node(0);
    const double u = (x - x0) / h;
    if (!(u >= -1e-9 && u <= M + 1e-9)) {
        throw ValidationError("interpolate_kernel_row: x outside the segment interval");
    }
    int i = static_cast<int>(std::floor(u + 1e-9));
    double t = u - i;
    if (i >= M) {
        i = M;
        t = 0.0;
    }
    if (std::abs(t) < 1e-9) {
        t = 0.0;
    }
    KernelRow row;
    for (int j = 0; j <= M; ++j) {
        double vw = 0.0, vv = 0.0;
        if (t == 0.0) {
            if (!table.in_domain(i, j)) {
                continue;
            }
            vw = table.kvw(i, j);
            vv = table.kvv(i, j);
        } else {
            if (!table.in_domain(i, j) || !table.in_domain(i + 1, j)) {
                continue;
            }
            vw = (1.0 - t) * table.kvw(i, j) + t * table.kvw(i + 1, j);
            vv = (1.0 - t) * table.kvv(i, j) + t * table.kvv(i + 1, j);
        }
        row.xi.push_back(table.node(j));
        row.kvw.push_back(vw);
        row.kvv.push_back(vv);
    }
    return row;
}

void write_kernel_csv(const KernelTable& table, std::ostream& out) {
    out << "segment_id,M\n" << table.segment_id() << ',' << table.M() << '\n';
    out << "x,xi,Kvw,Kvv\n";
    for (int i = 0; i <= table.M(); ++i) {
        for (int j = 0; j <= table.M(); ++j) {
            if (!table.in_domain(i, j)) {
                continue;
            }
            out << fmt(table.node(i)) << ',' << fmt(table.node(j)) << ',' << fmt(table.kvw(i, j)) << ','
                << fmt(table.kvv(i, j)) << '\n';
        }
    }
}

void write_kernel_csv(const KernelTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError("cannot open " + path + " for writing");
    }
    write_kernel_csv(table, out);
}

KernelTable read_kernel_csv(std::istream& in) {
    std::string line;
    auto fail = [](const std::string& why) { throw ValidationError("kernel CSV: " + why); };
    if (!std::getline(in, line) || line != "segment_id,M") {
        fail("missing 'segment_id,M' header");
    }
    int seg = 0, M = 0;
    char comma = 0;
    if (!std::getline(in, line)) {
        fail("missing header values");
    }
    std::istringstream hs(line);
    if (!(hs >> seg >> comma >> M) || comma != ',') {
        fail("bad header values");
    }
    if (!std::getline(in, line) || line != "x,xi,Kvw,Kvv") {
        fail("missing 'x,xi,Kvw,Kvv' column header");
    }
    struct Row {
        double x, xi, kvw, kvv;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        Row r{};
        char* end = nullptr;
        const char* s = line.c_str();
        double* fields[4] = {&r.x, &r.xi, &r.kvw, &r.kvv};
        for (int k = 0; k < 4; ++k) {
            *fields[k] = std::strtod(s, &end);
            if (end == s) {
                fail("bad number in line '" + line + "'");
            }
            s = end;
            if (k < 3) {
                if (*s != ',') {
                    fail("expected ',' in line '" + line + "'");
                }
                ++s;
            }
        }
        rows.push_back(r);
    }
    const std::size_t expected = static_cast<std::size_t>(M + 1) * (M + 2) / 2;
    if (rows.size() != expected) {
        fail("expected " + std::to_string(expected) + " rows, found " + std::to_string(rows.size()));
    }
    double length = 0.0;
    for (const Row& r : rows) {
        length = std::max(length, seg == 1 ? r.x : -r.x);
    }
    KernelTable table(seg, M, length);
    std::size_t k = 0;
    for (int i = 0; i <= M; ++i) {
        for (int j = 0; j <= M; ++j) {
            if (!table.in_domain(i, j)) {
                continue;
            }
            table.set(i, j, rows[k].kvw, rows[k].kvv);
            ++k;
        }
    }
    return table;
}

KernelTable read_kernel_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open " + path);
    }
    return read_kernel_csv(in);
}

}  // namespace arz

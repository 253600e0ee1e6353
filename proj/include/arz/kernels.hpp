#pragma once

#include "arz/core_model.hpp"
#include "arz/linearize.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace arz {

// Kernel problem mapped to the reference triangle 0 <= x <= xi <= L:
//   lambda dK/dx - speed dK/dxi = source(xi) Kvv,   dKvv/dx + dKvv/dxi = 0,
//   K(x, x) = source(x) / (lambda + speed),          Kvv(x, L) = edge_gain K(x, L).
// Segment 2 maps onto it with x -> -x, xi -> -xi and source(s) = -c2(-s).
struct KernelProblem {
    double length = 0.0;
    double speed = 0.0;      // v*
    double lambda = 0.0;     // gamma p* - v*
    double edge_gain = 0.0;
    std::function<double(double)> source;
};

KernelProblem kernel_problem(int segment_id, const NetworkParams& net, const BoundaryRows& rows);

// Sampled kernels on a uniform triangular grid. Values are stored in reference
// coordinates; the accessors take original segment grid indices (i for x, j for xi).
class KernelTable {
public:
    KernelTable() = default;
    KernelTable(int segment_id, int M, double length);

    int segment_id() const { return segment_id_; }
    int M() const { return M_; }
    double length() const { return length_; }
    double step() const { return length_ / M_; }
    double node(int i) const;  // original coordinate of grid index i
    bool in_domain(int i, int j) const;

    double kvw(int i, int j) const { return ref_kvw_[ref_index(i, j)]; }
    double kvv(int i, int j) const { return ref_kvv_[ref_index(i, j)]; }
    void set(int i, int j, double kvw, double kvv);

    // Reference-coordinate access, 0 <= p <= q <= M.
    double ref_kvw(int p, int q) const { return ref_kvw_[p * (M_ + 1) + q]; }
    double ref_kvv(int p, int q) const { return ref_kvv_[p * (M_ + 1) + q]; }
    double& ref_kvw(int p, int q) { return ref_kvw_[p * (M_ + 1) + q]; }
    double& ref_kvv(int p, int q) { return ref_kvv_[p * (M_ + 1) + q]; }

    double max_abs() const;

    int iterations = 0;
    std::vector<double> change_history;

private:
    std::size_t ref_index(int i, int j) const;

    int segment_id_ = 1;
    int M_ = 0;
    double length_ = 0.0;
    std::vector<double> ref_kvw_;
    std::vector<double> ref_kvv_;
};

struct KernelOptions {
    int M = 128;
    double tol = 1e-10;
    int max_iterations = 500;
    // Optional starting guess for the edge row K(x, L) in reference order (size M + 1).
    std::vector<double> initial_edge;
};

KernelTable solve_kernels(const KernelProblem& problem, int segment_id, const KernelOptions& opts);
KernelTable solve_kernels(int segment_id, const NetworkParams& net, const BoundaryRows& rows,
                          const KernelOptions& opts);

struct KernelResidual {
    double pde = 0.0;
    double bc = 0.0;
};

KernelResidual kernel_residual(const KernelTable& table, const KernelProblem& problem);

// Largest difference between two tables on the coarse table's nodes (fine.M = 2 coarse.M).
double table_difference(const KernelTable& coarse, const KernelTable& fine);

struct KernelRow {
    std::vector<double> xi;
    std::vector<double> kvw;
    std::vector<double> kvv;
};

// Row K(x, .) at the grid nodes xi_j inside the triangle, linear in x between grid rows.
KernelRow interpolate_kernel_row(const KernelTable& table, double x);

// CSV layout: "segment_id,M" header with one value row, then "x,xi,Kvw,Kvv" rows.
void write_kernel_csv(const KernelTable& table, std::ostream& out);
void write_kernel_csv(const KernelTable& table, const std::string& path);
KernelTable read_kernel_csv(std::istream& in);
KernelTable read_kernel_csv(const std::string& path);

}  // namespace arz

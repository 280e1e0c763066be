#pragma once

#include <vector>

namespace lrex {

struct Panel {
    double a, b;
};

/// Panels on [a, b] refined toward a: widths double from `width0` up to b and
/// halve `depth` times below it; one final panel reaches a.
std::vector<Panel> graded_panels(double a, double b, double width0, int depth);
/// Mirror image: refined toward b.
std::vector<Panel> graded_panels_toward_b(double a, double b, double width0, int depth);

/// Two Gauss-Legendre rules on the same panels. Node arrays are the union of
/// both rules; w_hi is zero on low-order nodes and vice versa.
struct Nodes {
    std::vector<double> x, x2;  // x2 used by two-dimensional meshes
    std::vector<double> w_hi, w_lo;
    std::size_t size() const { return x.size(); }
};

int low_order(int order);

void append_nodes(Nodes& out, const std::vector<Panel>& panels, int order, double weight_scale = 1.0);

/// Fundamental domain [0, 1/2]^d of the torus, graded toward the origin; weights
/// carry the 2^d multiplicity, so sums approximate integrals over T^d.
/// d = 2 uses square panels outside [0, width0]^2 and L-shaped dyadic shells inside.
Nodes torus_mesh(int dim, double width0, int depth, int order);

}  // namespace lrex

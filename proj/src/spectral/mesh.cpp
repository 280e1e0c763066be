#include "lrex/spectral/mesh.hpp"

#include "lrex/kernel/special.hpp"

#include <algorithm>
#include <cmath>

namespace lrex {

std::vector<Panel> graded_panels(double a, double b, double width0, int depth) {
    std::vector<Panel> out;
    if (!(b > a)) return out;
    width0 = std::min(width0, b - a);
    double edge = a + width0 * std::ldexp(1.0, -depth);
    out.push_back({a, edge});
    for (int k = depth; k > 0; --k) {
        double next = a + width0 * std::ldexp(1.0, -k + 1);
        out.push_back({edge, next});
        edge = next;
    }
    for (double w = width0; edge < b; w *= 2.0) {
        double next = std::min(b, edge + w);
        if (b - next < 0.25 * w) next = b;
        out.push_back({edge, next});
        edge = next;
    }
    return out;
}

std::vector<Panel> graded_panels_toward_b(double a, double b, double width0, int depth) {
    std::vector<Panel> out;
    for (const Panel& p : graded_panels(0.0, b - a, width0, depth)) out.push_back({b - p.b, b - p.a});
    std::reverse(out.begin(), out.end());
    return out;
}

int low_order(int order) { return std::max(4, (2 * order) / 3); }

void append_nodes(Nodes& out, const std::vector<Panel>& panels, int order, double weight_scale) {
    const auto& hi = special::gauss_legendre(order);
    const auto& lo = special::gauss_legendre(low_order(order));
    for (const Panel& p : panels) {
        const double m = 0.5 * (p.a + p.b), h = 0.5 * (p.b - p.a) * weight_scale;
        const double hw = 0.5 * (p.b - p.a);
        for (std::size_t i = 0; i < hi.x.size(); ++i) {
            out.x.push_back(m + hw * hi.x[i]);
            out.w_hi.push_back(h * hi.w[i]);
            out.w_lo.push_back(0.0);
        }
        for (std::size_t i = 0; i < lo.x.size(); ++i) {
            out.x.push_back(m + hw * lo.x[i]);
            out.w_hi.push_back(0.0);
            out.w_lo.push_back(h * lo.w[i]);
        }
    }
}

namespace {

void append_square(Nodes& out, double x0, double x1, double y0, double y1, int order, double scale) {
    const auto& hi = special::gauss_legendre(order);
    const auto& lo = special::gauss_legendre(low_order(order));
    const double mx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0), my = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
    for (std::size_t i = 0; i < hi.x.size(); ++i)
        for (std::size_t j = 0; j < hi.x.size(); ++j) {
            out.x.push_back(mx + hx * hi.x[i]);
            out.x2.push_back(my + hy * hi.x[j]);
            out.w_hi.push_back(scale * hx * hy * hi.w[i] * hi.w[j]);
            out.w_lo.push_back(0.0);
        }
    for (std::size_t i = 0; i < lo.x.size(); ++i)
        for (std::size_t j = 0; j < lo.x.size(); ++j) {
            out.x.push_back(mx + hx * lo.x[i]);
            out.x2.push_back(my + hy * lo.x[j]);
            out.w_hi.push_back(0.0);
            out.w_lo.push_back(scale * hx * hy * lo.w[i] * lo.w[j]);
        }
}

}  // namespace

Nodes torus_mesh(int dim, double width0, int depth, int order) {
    Nodes out;
    if (dim == 1) {
        append_nodes(out, graded_panels(0.0, 0.5, width0, depth), order, 2.0);
        return out;
    }
    // Outer squares of side width0 (last row/column stretched to reach 1/2).
    const int n = std::max(1, static_cast<int>(std::floor(0.5 / width0 + 1e-9)));
    const double side = 0.5 / n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i > 0 || j > 0) append_square(out, i * side, (i + 1) * side, j * side, (j + 1) * side, order, 4.0);
    // Dyadic L-shells inside [0, side]^2.
    double h = side;
    for (int k = 0; k < depth; ++k) {
        const double g = 0.5 * h;
        append_square(out, g, h, 0.0, g, order, 4.0);
        append_square(out, 0.0, g, g, h, order, 4.0);
        append_square(out, g, h, g, h, order, 4.0);
        h = g;
    }
    append_square(out, 0.0, h, 0.0, h, order, 4.0);
    return out;
}

}  // namespace lrex

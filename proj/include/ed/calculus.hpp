#pragma once

#include "ed/fields.hpp"

namespace ed {

/// Forward difference (f[i+e_d] - f[i]) / dx_d, stored on the link leaving
/// cell i in +d. On reflecting grids the boundary link does not exist and the
/// entry is zero; callers consult grid.has_link().
VectorField link_diff(const ScalarField& f);

/// Central-difference gradient, second-order; one-sided second-order stencils
/// at reflecting boundaries. Equals the average of the two adjacent link
/// differences in the interior.
VectorField gradient(const ScalarField& f);

/// Central-difference divergence, adjoint-consistent with gradient on
/// periodic grids: integrate(f * divergence(v)) = -integrate(v . gradient(f)).
ScalarField divergence(const VectorField& v);

/// Compact Laplacian sum_d (f[i+e] - 2 f[i] + f[i-e]) / dx_d^2; zero-flux
/// (mirror) closure at reflecting boundaries. Plane-wave eigenvalue is
/// -k_eff^2 with k_eff = (2/dx) sin(k dx / 2).
ScalarField laplacian(const ScalarField& f);

/// Divergence of a link-valued flux: sum_d (F_d[i] - F_d[i-e_d]) / dx_d with
/// absent boundary links treated as zero flux. Exactly conservative:
/// integrate(link_divergence(F)) == 0.
ScalarField link_divergence(const VectorField& flux);

/// Site values from a link-valued field: the average of the two adjacent
/// links (= central difference when the links are forward differences);
/// one-sided second order at reflecting walls.
VectorField site_average_links(const VectorField& links);

/// Cell-volume-weighted sum, fixed (serial) reduction order.
double integrate(const ScalarField& f);

double l1_distance(const ScalarField& a, const ScalarField& b);
double linf_distance(const ScalarField& a, const ScalarField& b);

/// Variance of the density f along dimension d (f need not be normalized;
/// moments are taken of f / integrate(f)).
double density_variance(const ScalarField& f, int d);

}  // namespace ed

#pragma once

#include <complex>
#include <string>
#include <vector>

#include "ed/constants.hpp"
#include "ed/gauge.hpp"

namespace ed {

/// Closed loop of grid cells: a full ring along one periodic axis.
/// `covering_cut` marks a covering-space field: the phase step across the
/// loop closure is then taken by smooth extrapolation of the last interior
/// step (the recorded branch mismatch lives at the cut), instead of
/// re-wrapping the stored values.
struct Loop {
    std::vector<std::int64_t> cells;
    bool covering_cut = false;
};

Loop make_axis_loop(const Grid& g, int axis, std::array<int, 3> base = {0, 0, 0},
                    bool covering_cut = false);

struct WindingResult {
    int winding = 0;              // nearest integer of raw / 2 pi
    double raw_phase_change = 0;  // sum of branch-corrected steps
    double residual = 0;          // |raw - 2 pi winding|, reported, never hidden
    bool under_resolved = false;  // some step was >= pi - 0.1
};

/// Winding of a phase field (already divided by hbar) around the loop.
WindingResult winding_number(const ScalarField& phase_over_hbar, const Loop& loop);

/// arg psi as a scalar field (principal value).
ScalarField arg_field(const ComplexField& psi);

struct SuperpositionReport {
    double delta1 = 0.0;  // loop phase change of branch 1
    double delta2 = 0.0;
    bool single_valued = false;
    double mismatch_closure = 0.0;  // |Psi3'|^2 - |Psi3|^2 at the loop start
    double mismatch_max = 0.0;      // max over the loop of the interference mismatch
};

/// Single-valuedness of a superposition a1 psi1 + a2 psi2: the branches' loop
/// phase changes delta_1, delta_2 must both vanish mod 2 pi; otherwise the
/// squared modulus picks up 2 Re[a1 a2* (e^{i(d1-d2)} - 1) psi1 psi2*] at the
/// closure and cannot be a probability.
SuperpositionReport superposition_single_valuedness(const ComplexField& psi1,
                                                    const ComplexField& psi2,
                                                    std::complex<double> a1,
                                                    std::complex<double> a2, const Loop& loop,
                                                    const Constants& k);

struct ChargeResult {
    double charge = 0.0;
    bool quantized = false;
};

/// q = beta hbar c; quantized when beta is an integer (within 1e-9).
ChargeResult charge_from_beta(double beta, const Constants& k);

/// Plain-text table: loop id, raw phase, winding, residual, verdict.
std::string format_winding_report(const std::vector<std::pair<std::string, WindingResult>>& rows);

}  // namespace ed

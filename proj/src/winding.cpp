#include "ed/winding.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ed {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

Loop make_axis_loop(const Grid& g, int axis, std::array<int, 3> base, bool covering_cut) {
    if (axis < 0 || axis >= g.dim) throw ValidationError("loop: axis out of range");
    if (g.boundary != Boundary::Periodic) {
        throw ValidationError("loop: a ring loop needs a periodic axis");
    }
    Loop loop;
    loop.covering_cut = covering_cut;
    std::array<int, 3> mi = base;
    mi[axis] = 0;
    for (int i = 0; i < g.n[axis]; ++i) {
        mi[axis] = i;
        loop.cells.push_back(g.index(mi));
    }
    return loop;
}

WindingResult winding_number(const ScalarField& phase_over_hbar, const Loop& loop) {
    const std::size_t m = loop.cells.size();
    if (m < 3) throw ValidationError("winding_number: loop too short");
    WindingResult res;
    double total = 0.0;
    double last_step = 0.0;
    for (std::size_t s = 0; s + 1 < m; ++s) {
        const double step =
            wrap_angle(phase_over_hbar[loop.cells[s + 1]] - phase_over_hbar[loop.cells[s]]);
        if (std::abs(step) >= M_PI - 0.1) res.under_resolved = true;
        total += step;
        last_step = step;
    }
    double closure;
    if (loop.covering_cut) {
        // smooth continuation across the marked cut
        closure = last_step;
    } else {
        closure = wrap_angle(phase_over_hbar[loop.cells[0]] - phase_over_hbar[loop.cells[m - 1]]);
        if (std::abs(closure) >= M_PI - 0.1) res.under_resolved = true;
    }
    total += closure;
    res.raw_phase_change = total;
    res.winding = static_cast<int>(std::lround(total / kTwoPi));
    res.residual = std::abs(total - kTwoPi * res.winding);
    return res;
}

ScalarField arg_field(const ComplexField& psi) {
    ScalarField out(psi.grid);
    for (std::int64_t i = 0; i < psi.size(); ++i) {
        out[i] = std::atan2(psi[i].imag(), psi[i].real());
    }
    return out;
}

SuperpositionReport superposition_single_valuedness(const ComplexField& psi1,
                                                    const ComplexField& psi2,
                                                    std::complex<double> a1,
                                                    std::complex<double> a2, const Loop& loop,
                                                    const Constants& k) {
    (void)k;
    for (const std::int64_t c : loop.cells) {
        if (std::abs(psi1[c]) == 0.0 || std::abs(psi2[c]) == 0.0) {
            throw NumericalError("superposition check: zero modulus on the loop at cell " +
                                 std::to_string(c));
        }
    }
    SuperpositionReport rep;
    const WindingResult w1 = winding_number(arg_field(psi1), loop);
    const WindingResult w2 = winding_number(arg_field(psi2), loop);
    rep.delta1 = w1.raw_phase_change;
    rep.delta2 = w2.raw_phase_change;
    rep.single_valued = std::abs(wrap_angle(rep.delta1)) < 1e-6 &&
                        std::abs(wrap_angle(rep.delta2)) < 1e-6;

    const std::complex<double> e1{std::cos(rep.delta1), std::sin(rep.delta1)};
    const std::complex<double> e2{std::cos(rep.delta2), std::sin(rep.delta2)};
    const std::complex<double> cross{std::cos(rep.delta1 - rep.delta2),
                                     std::sin(rep.delta1 - rep.delta2)};

    // direct continuity check at the loop start
    const std::int64_t c0 = loop.cells.front();
    const double before = std::norm(a1 * psi1[c0] + a2 * psi2[c0]);
    const double after = std::norm(a1 * e1 * psi1[c0] + a2 * e2 * psi2[c0]);
    rep.mismatch_closure = after - before;

    for (const std::int64_t c : loop.cells) {
        const double m =
            2.0 * (a1 * std::conj(a2) * (cross - 1.0) * psi1[c] * std::conj(psi2[c])).real();
        rep.mismatch_max = std::max(rep.mismatch_max, std::abs(m));
    }
    return rep;
}

ChargeResult charge_from_beta(double beta, const Constants& k) {
    ChargeResult r;
    r.charge = beta * k.hbar * k.c;
    r.quantized = std::abs(beta - std::round(beta)) < 1e-9;
    return r;
}

std::string format_winding_report(const std::vector<std::pair<std::string, WindingResult>>& rows) {
    std::ostringstream os;
    os << "loop_id      raw_phase          nu    residual      verdict\n";
    for (const auto& [id, w] : rows) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-12s %-18.10g %-5d %-13.6g %s\n", id.c_str(),
                      w.raw_phase_change, w.winding, w.residual,
                      w.residual < 1e-6 ? "integer" : (w.under_resolved ? "under-resolved" : "non-integer"));
        os << buf;
    }
    return os.str();
}

}  // namespace ed

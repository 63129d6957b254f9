"""Global numeric policy: tolerances and capacity caps used by validation."""

from dataclasses import dataclass, replace


@dataclass
class NumericPolicy:
    # construction-time validation
    hermiticity_rtol: float = 1e-12      # max|A - A^dag| <= rtol * max|A|
    trace_atol: float = 1e-10            # |Tr(rho) - 1|
    psd_atol: float = 1e-10              # eigenvalues of rho >= -psd_atol
    unitarity_atol: float = 1e-10        # |U^dag U - 1|
    reconstruct_rtol: float = 1e-9       # |U diag(E) U^dag - A| relative

    # operation tolerances
    commute_atol: float = 1e-10          # "commutes" test for term selection
    selection_atol: float = 1e-10        # selected terms reproduce [H, Q]
    purify_atol: float = 1e-10           # partial trace of purification
    degeneracy_rtol: float = 1e-9        # eigenvalue gap, relative to spectral range
    zero_denominator: float = 1e-12      # degenerate-denominator guard

    # capacity
    dim_cap: int = 4096                  # largest dense dimension
    exp_overflow: float = 700.0          # max |beta * spectral range| before shift-only mode

    # bound verdicts: tolerance = violation_rtol * max(|lhs|, |rhs|, 1)
    violation_rtol: float = 1e-9

    def with_overrides(self, **kw):
        return replace(self, **kw)


#: Single process-wide policy record.  Tests and callers may swap it out.
policy = NumericPolicy()

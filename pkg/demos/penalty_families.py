"""Tour of the penalty families and their scaling behavior.

Shows how each family shrinks with the sample size, how the SWIC scale
is calibrated against the BIC, and how the gap diagnostics classify the
families under root-n and n scalings.
"""

from riskselect.penalty import (
    GapScaling,
    PenaltyKind,
    PenaltySpec,
    alpha_calibrate,
    diagnose_gap,
    penalty_value,
)

constants = tuple(float(k) for k in range(1, 6))
sizes = [10**2, 10**3, 10**4, 10**5, 10**6]

families = {
    "aic": PenaltySpec(PenaltyKind.AIC, constants),
    "bic": PenaltySpec(PenaltyKind.BIC, constants),
    "hq": PenaltySpec(PenaltyKind.HANNAN_QUINN, constants),
    "swic(b=1, a=1)": PenaltySpec(PenaltyKind.SWIC, constants, alpha=1.0, beta=1),
    "glp(b=1, a=1)": PenaltySpec(PenaltyKind.GENERALIZED_LOG_PLUS, constants, alpha=1.0, beta=1),
}

print("penalty at k = 3 as the sample grows")
print(f"{'family':>16} " + " ".join(f"{n:>10}" for n in sizes))
for name, spec in families.items():
    row = [penalty_value(spec, 3, n) for n in sizes]
    print(f"{name:>16} " + " ".join(f"{v:10.2e}" for v in row))

print()
print("calibrating the SWIC scale against the BIC")
for beta in (1, 2):
    for nu in (1000, 10_000):
        alpha = alpha_calibrate(beta, nu)
        swic = PenaltySpec(PenaltyKind.SWIC, constants, alpha=alpha, beta=beta)
        bic = PenaltySpec(PenaltyKind.BIC, constants)
        at_nu = penalty_value(swic, 3, nu) - penalty_value(bic, 3, nu)
        print(f"  beta={beta} nu={nu:>6}: alpha={alpha:.6f}, "
              f"swic - bic at n=nu: {at_nu:+.2e}")

print()
print("gap diagnostics for the pair (k, l) = (1, 2)")
grid = (10.0, 1e2, 1e4, 1e8)
for name, spec in families.items():
    for scaling in (GapScaling.SQRT_N, GapScaling.N):
        diag = diagnose_gap(spec, 1, 2, grid, scaling)
        gaps = ", ".join(f"{g:.3g}" for _, g in diag.samples)
        print(f"  {name:>16} under {scaling.value:>7}: {diag.verdict.value:<13} [{gaps}]")

print()
print("a root-n-diverging gap is what separates consistent criteria from")
print("the AIC, whose scaled gap vanishes: the AIC keeps over-selecting")
print("no matter how much data arrives.")

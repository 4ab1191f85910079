"""Set-symmetric matrices and their spectra.

Builds D_l matrices on r-subsets, reads their eigenvalues off the closed form,
and compares with a dense eigensolve.  Then looks at the expectation matrix E
and the complete-graph moment matrix.
"""
from __future__ import annotations

import numpy as np

from sosclique.johnson import (
    SchemeVector,
    assemble_d,
    e_min_eigenvalue,
    grigoriev_coefficients,
    knapsack_p_coefficients,
    scheme_spectrum,
)
from sosclique.spectra import eigenvalues_symmetric

n, r = 8, 2
print(f"D_l on {r}-subsets of {n} points")
for ell in range(r + 1):
    spectrum = scheme_spectrum(SchemeVector.unit(n, r, "D", ell))
    dense = eigenvalues_symmetric(assemble_d(n, r, ell).astype(float)).true_eigenvalues()
    err = np.abs(np.sort(dense) - spectrum.multiset()).max()
    pairs = ", ".join(f"{lam} (x{m})" for lam, m in zip(spectrum.eigenvalues, spectrum.multiplicities))
    print(f"  l={ell}: {pairs}   max |dense - exact| = {err:.1e}")

print()
for n, r, k in [(10, 1, 2), (60, 2, 4), (20, 2, 8)]:
    report = e_min_eigenvalue(n, r, k)
    print(f"E at (n={n}, r={r}, k={k}): alphas {[str(a) for a in report.alphas]}, "
          f"min eigenvalue {report.value}, condition {report.condition_holds}")

n, r, k = 20, 2, 8
alphas = knapsack_p_coefficients(n, r, k).coeffs
print(f"\ncomplete graph at (n={n}, r={r}, k={k}): closed-form alphas {[str(a) for a in alphas]}, "
      f"change of basis gives {[str(a) for a in grigoriev_coefficients(n, r, k).in_p().coeffs]}")

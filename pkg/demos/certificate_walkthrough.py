"""One random graph, one certificate.

Samples G(30, 1/2), builds the moment matrices for r=2, k=4, runs the exact
checks, splits M' into E + L + Delta and factors the full matrix into Gram
vectors.
"""
from __future__ import annotations

from sosclique.certificate import (
    CertificateParams,
    MomentFunctional,
    build_full_moment_matrix,
    build_m,
    check_axioms,
    check_kernel_vectors,
    decompose,
    gram_feasibility,
)
from sosclique.graphs import count_cliques, sample_gnp_half
from sosclique.spectra import clique_principal_submatrix, is_psd, numerical_rank

n, r, k, seed = 30, 2, 4, 12
g = sample_gnp_half(n, seed)
params = CertificateParams(n, r, k)
print(f"G(n={n}, 1/2), seed {seed}: {g.num_edges} edges, {count_cliques(g, 2 * r)} {2 * r}-cliques")

functional = MomentFunctional(g, params)
axioms = check_axioms(functional)
print(f"axioms: ok={axioms.ok} over {axioms.checked} subsets")

full = build_full_moment_matrix(g, params, functional.degrees)
kernel = check_kernel_vectors(full, g, params)
rank = numerical_rank(full)
print(f"full moment matrix: dim {kernel.dimension}, kernel >= {kernel.kernel_lower_bound}, "
      f"numerical rank {rank}")

dec = decompose(g, params)
print(f"M' = E + L + Delta exactly: {dec.identity_holds()}")
for name in ("m_prime", "e", "l", "delta"):
    report = is_psd(getattr(dec, name))
    print(f"  {name:8s} min eigenvalue {report.true_min:12.4f}  max {report.true_max:12.4f}")

block = clique_principal_submatrix(build_m(g, params), g, r)
print(f"clique block of M: PSD={is_psd(block).psd}")

gram = gram_feasibility(full, g, params)
print(f"Gram vectors: feasible={gram.feasible}, objective {gram.objective:.12f} (k={k}), "
      f"largest non-edge inner product {gram.max_non_edge:.1e}")

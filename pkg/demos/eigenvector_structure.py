"""Splitting an operator into rotation-like and dissipative parts.

A normal matrix with some unimodular and some contractive eigenvalues is
split into the invariant subspace where powers act like rotations and the
complement where they decay. The rotation part must coincide with the span
of unimodular eigenvectors; a linearly growing Jordan block must be turned
away at the gate. Finally an eigenvector is extracted from a power relation
T^n x = alpha x without ever calling an eigensolver, by the chain
y_j = (alpha_j - T) y_{j-1} over the n-th roots of alpha.
"""

import argparse

import numpy as np

from recurlab import (
    DenseMatrix,
    JordanBlock,
    eigenvector_from_power_relation,
    jdg_split,
    principal_angle,
    realize,
    unimodular_eigenpairs,
)
from recurlab.errors import NotPowerBoundedError


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dim", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    d = args.dim

    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, _ = np.linalg.qr(g)
    j = d // 2
    radii = np.concatenate([np.ones(j), rng.uniform(0.2, 0.9, size=d - j)])
    lam = np.exp(2j * np.pi * rng.uniform(size=d)) * radii
    M = (q * lam) @ q.conj().T
    T = realize(DenseMatrix(tuple(map(tuple, M))))

    rev, fl = jdg_split(T)
    data = unimodular_eigenpairs(T)
    print(f"normal matrix, dim {d}: {j} unimodular and {d - j} contractive "
          f"eigenvalues")
    print(f"  rotation part dim {rev.shape[1]}, dissipative part dim "
          f"{fl.shape[1]}")
    print(f"  angle(rotation part, unimodular eigenvector span) = "
          f"{principal_angle(rev, data.espan_basis):.2e}")
    print(f"  worst eigenpair residual {max(data.residuals):.2e} "
          f"(budget {data.residual_budget:.2e})")

    print("\nunimodular Jordan block of size 2: ||T^n|| grows linearly, so "
          "the split refuses it")
    try:
        jdg_split(realize(JordanBlock(1j, 2)))
        print("  unexpectedly accepted")
    except NotPowerBoundedError as exc:
        print(f"  rejected: {exc}")

    print("\neigenvector from a power relation, no eigensolver involved")
    n = 4
    phase = np.exp(2j * np.pi * 0.15)
    perm = np.zeros((n, n), dtype=complex)
    for i in range(n):
        perm[(i + 1) % n, i] = 1.0
    T = realize(DenseMatrix(tuple(map(tuple, phase * perm))))
    alpha = phase**n
    x = rng.uniform(0.5, 1.5, size=n) * np.exp(2j * np.pi * rng.uniform(size=n))
    y, eigval = eigenvector_from_power_relation(T, x, n, complex(alpha))
    rel = np.linalg.norm(T.apply(y) - eigval * y) / np.linalg.norm(y)
    print(f"  T = phase * cyclic shift on C^{n}, T^{n} x = alpha x with "
          f"alpha = phase^{n}")
    print(f"  extracted eigenvalue {eigval:.6f}, relative residual {rel:.2e}")
    print(f"  eigval^{n} - alpha = {abs(eigval ** n - alpha):.2e}")


if __name__ == "__main__":
    main()

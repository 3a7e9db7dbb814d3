"""Small exact linear algebra over F_p: row reduction and kernels."""

from __future__ import annotations

from itertools import product


def kernel_basis(rows: list[list[int]], width: int, p: int) -> list[tuple[int, ...]]:
    """Basis of the right kernel of a matrix over F_p, by Gauss-Jordan
    elimination.  ``rows`` may be empty (kernel = everything)."""
    mat = [[v % p for v in r] for r in rows]
    pivots: list[int] = []
    rank = 0
    for col in range(width):
        piv = next((i for i in range(rank, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [v * inv % p for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[rank])]
        pivots.append(col)
        rank += 1
    basis = []
    free = [c for c in range(width) if c not in pivots]
    for fc in free:
        vec = [0] * width
        vec[fc] = 1
        for r, pc in enumerate(pivots):
            vec[pc] = (-mat[r][fc]) % p
        basis.append(tuple(vec))
    return basis


def kernel_vectors(rows: list[list[int]], width: int, p: int, cap: int = 200_000):
    """All right-kernel vectors, sorted lexicographically.

    Raises ValueError when the kernel has more than ``cap`` elements.
    """
    basis = kernel_basis(rows, width, p)
    if p ** len(basis) > cap:
        raise ValueError(f"kernel has p^{len(basis)} elements, above cap {cap}")
    out = []
    for combo in product(range(p), repeat=len(basis)):
        vec = [0] * width
        for c, b in zip(combo, basis):
            for i in range(width):
                vec[i] = (vec[i] + c * b[i]) % p
        out.append(tuple(vec))
    out.sort()
    return out

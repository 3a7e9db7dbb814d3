"""Exact arithmetic in unipotent upper-triangular matrix groups over Z/p^r.

A :class:`UniMatrix` is an (n+1) x (n+1) matrix with unit diagonal, zeros
below the diagonal and entries in Z/p^r above it.  The module provides the
group law, inverses (division-free, via the Neumann series of the nilpotent
part), element orders, the central filtration by distance from the diagonal
together with its congruence refinement for r > 1, canonical quotient
representatives, and constructors for tame local decomposition data
("local plans"): Scholz-Reichardt, trivial, abelian and block plans.

All values are immutable after construction; every operation is a pure
function, so everything here is safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class DimensionMismatch(ValueError):
    """Raised when two matrices disagree in size or modulus."""


class PlanInvalid(ValueError):
    """Raised when local-plan data fails its defining relation."""


class Unsupported(ValueError):
    """Raised for requests outside the supported parameter range."""


#: Filtration depth of the identity matrix (deeper than every proper level).
INFINITE_DEPTH = math.inf


@lru_cache(maxsize=None)
def _positions(size: int) -> tuple[tuple[int, int], ...]:
    """Row-major list of above-diagonal positions (i, j), 1-based."""
    return tuple((i, j) for i in range(1, size) for j in range(i + 1, size + 1))


@lru_cache(maxsize=None)
def _index_of(size: int) -> dict[tuple[int, int], int]:
    return {pos: k for k, pos in enumerate(_positions(size))}


@lru_cache(maxsize=None)
def _product_terms(size: int) -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
    """Precomputed index plan for the group law.

    Entry (i,j) of A*B is A[i,j] + B[i,j] + sum_{i<t<j} A[i,t]*B[t,j]; the
    plan stores, per output slot, the flat indices of those middle terms.
    """
    idx = _index_of(size)
    plan = []
    for k, (i, j) in enumerate(_positions(size)):
        middle = tuple((idx[(i, t)], idx[(t, j)]) for t in range(i + 1, j))
        plan.append((k, middle))
    return tuple(plan)


class UniMatrix:
    """Upper-triangular unipotent matrix over Z/p^r.

    ``size`` is the matrix dimension n+1 (so the near-diagonal has n slots),
    ``entries`` holds the above-diagonal values in row-major order, each
    reduced modulo p^r.  Instances are immutable and hashable.
    """

    __slots__ = ("size", "p", "r", "entries", "_mod", "_hash")

    def __init__(self, size: int, p: int, r: int, entries: Iterable[int] = ()):
        if size < 2:
            raise ValueError(f"size must be >= 2, got {size}")
        if p < 2:
            raise ValueError(f"p must be a prime >= 2, got {p}")
        if r < 1:
            raise ValueError(f"r must be >= 1, got {r}")
        mod = p**r
        ent = tuple(entries)
        count = size * (size - 1) // 2
        if not ent:
            ent = (0,) * count
        elif len(ent) != count:
            raise ValueError(f"expected {count} entries for size {size}, got {len(ent)}")
        else:
            ent = tuple(e % mod for e in ent)
        self.size = size
        self.p = p
        self.r = r
        self.entries = ent
        self._mod = mod
        self._hash = hash((size, p, r, ent))

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, size: int, p: int, r: int = 1) -> "UniMatrix":
        return cls(size, p, r)

    @classmethod
    def elementary(cls, size: int, p: int, r: int, i: int, j: int, c: int = 1) -> "UniMatrix":
        """I + c * E_{i,j} (1-based, i < j)."""
        if not 1 <= i < j <= size:
            raise ValueError(f"need 1 <= i < j <= {size}, got ({i}, {j})")
        ent = [0] * (size * (size - 1) // 2)
        ent[_index_of(size)[(i, j)]] = c
        return cls(size, p, r, ent)

    @classmethod
    def regular(cls, size: int, p: int, r: int = 1) -> "UniMatrix":
        """Regular unipotent: all near-diagonal entries 1."""
        ent = [0] * (size * (size - 1) // 2)
        idx = _index_of(size)
        for i in range(1, size):
            ent[idx[(i, i + 1)]] = 1
        return cls(size, p, r, ent)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], p: int, r: int = 1) -> "UniMatrix":
        """Build from a full square row list; validates unipotent shape."""
        size = len(rows)
        mod = p**r
        for i, row in enumerate(rows):
            if len(row) != size:
                raise ValueError(f"row {i + 1} has length {len(row)}, expected {size}")
            if row[i] % mod != 1:
                raise ValueError(f"diagonal entry ({i + 1},{i + 1}) must be 1 mod {mod}")
            for j in range(i):
                if row[j] % mod != 0:
                    raise ValueError(f"below-diagonal entry ({i + 1},{j + 1}) must be 0")
        ent = [rows[i - 1][j - 1] for (i, j) in _positions(size)]
        return cls(size, p, r, ent)

    # -- basic access ------------------------------------------------------

    @property
    def modulus(self) -> int:
        return self._mod

    def entry(self, i: int, j: int) -> int:
        """Matrix entry at 1-based (i, j)."""
        if i == j:
            return 1
        if i > j:
            return 0
        return self.entries[_index_of(self.size)[(i, j)]]

    def rows(self) -> list[list[int]]:
        n1 = self.size
        return [[self.entry(i, j) for j in range(1, n1 + 1)] for i in range(1, n1 + 1)]

    def is_identity(self) -> bool:
        return not any(self.entries)

    def to_json_dict(self) -> dict:
        return {"n": self.size - 1, "p": self.p, "r": self.r, "rows": self.rows()}

    @classmethod
    def from_json_dict(cls, data: dict) -> "UniMatrix":
        return cls.from_rows(data["rows"], data["p"], data.get("r", 1))

    # -- group structure ---------------------------------------------------

    def __mul__(self, other: "UniMatrix") -> "UniMatrix":
        return compose(self, other)

    def inverse(self) -> "UniMatrix":
        """Group inverse via I - N + N^2 - ... (N the nilpotent part)."""
        size, mod = self.size, self._mod
        count = len(self.entries)
        n_pow = self.entries
        acc = [0] * count
        sign = -1
        for _ in range(1, size):
            if not any(n_pow):
                break
            for k in range(count):
                acc[k] = (acc[k] + sign * n_pow[k]) % mod
            n_pow = _strict_mul(size, mod, self.entries, n_pow)
            sign = -sign
        return UniMatrix(size, self.p, self.r, acc)

    def __pow__(self, e: int) -> "UniMatrix":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = UniMatrix.identity(self.size, self.p, self.r)
        while e:
            if e & 1:
                result = compose(result, base)
            base = compose(base, base)
            e >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UniMatrix):
            return NotImplemented
        return (
            self.size == other.size
            and self.p == other.p
            and self.r == other.r
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"UniMatrix(size={self.size}, p={self.p}, r={self.r}, rows={self.rows()})"

    def __setattr__(self, name, value):
        if hasattr(self, "_hash"):
            raise AttributeError("UniMatrix is immutable")
        object.__setattr__(self, name, value)


def _strict_mul(size: int, mod: int, a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of two strictly upper-triangular entry vectors."""
    out = [0] * len(a)
    for k, middle in _product_terms(size):
        s = 0
        for ka, kb in middle:
            s += a[ka] * b[kb]
        out[k] = s % mod
    return out


def _check_compatible(a: UniMatrix, b: UniMatrix) -> None:
    if a.size != b.size or a.p != b.p or a.r != b.r:
        raise DimensionMismatch(
            f"incompatible matrices: size/p/r = ({a.size},{a.p},{a.r}) vs ({b.size},{b.p},{b.r})"
        )


def compose(a: UniMatrix, b: UniMatrix) -> UniMatrix:
    """Matrix product a*b; the group law of U_{n+1}(Z/p^r)."""
    _check_compatible(a, b)
    mod = a._mod
    ae, be = a.entries, b.entries
    out = []
    for k, middle in _product_terms(a.size):
        s = ae[k] + be[k]
        for ka, kb in middle:
            s += ae[ka] * be[kb]
        out.append(s % mod)
    return UniMatrix(a.size, a.p, a.r, out)


def commutator(a: UniMatrix, b: UniMatrix) -> UniMatrix:
    """a b a^-1 b^-1."""
    return compose(compose(a, b), compose(a.inverse(), b.inverse()))


def order(a: UniMatrix) -> int:
    """Least k >= 1 with a^k = identity; always a power of p."""
    k = 1
    b = a
    while not b.is_identity():
        b = b**a.p
        k *= a.p
    return k


def near_diagonal(a: UniMatrix) -> tuple[int, ...]:
    """The tuple (a_{1,2}, ..., a_{n,n+1}); a homomorphism to (Z/p^r)^n."""
    idx = _index_of(a.size)
    return tuple(a.entries[idx[(i, i + 1)]] for i in range(1, a.size))


def filtration_depth(a: UniMatrix):
    """Largest k with a in gamma_k: the minimal distance j-i of a nonzero
    entry.  Returns INFINITE_DEPTH for the identity."""
    depth = INFINITE_DEPTH
    for (i, j), e in zip(_positions(a.size), a.entries):
        if e and j - i < depth:
            depth = j - i
    return depth


def apply_letters(images: Sequence[UniMatrix], letters: Iterable[tuple[int, int]]) -> UniMatrix:
    """Evaluate a word, given as (generator index, exponent) letters with
    1-based indices, at the matrices ``images``."""
    if not images:
        raise ValueError("need at least one image to fix the target group")
    result = UniMatrix.identity(images[0].size, images[0].p, images[0].r)
    for gen, exp in letters:
        if gen < 1 or gen > len(images):
            raise IndexError(f"word uses generator x{gen} but only {len(images)} images given")
        result = compose(result, images[gen - 1] ** exp)
    return result


# -- central filtration and quotients -------------------------------------


@dataclass(frozen=True)
class FiltrationLevel:
    """A level of the refined central filtration of U_{n+1}(Z/p^r).

    ``FiltrationLevel(k, e)`` denotes the normal subgroup of matrices all of
    whose entries are divisible by p^e, with entries at distance < k from
    the diagonal divisible by p^{e+1}.  For e = 0 this is the classical
    term gamma_k (entries at distance < k vanish mod p); gamma_1 is the
    whole group and, over F_p, gamma_n is the center <E_{1,n+1}>.
    """

    k: int
    exponent: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"filtration index must be >= 1, got {self.k}")
        if self.exponent < 0:
            raise ValueError(f"congruence exponent must be >= 0, got {self.exponent}")

    def contains(self, a: UniMatrix) -> bool:
        pe = a.p**self.exponent
        pe1 = pe * a.p
        for (i, j), e in zip(_positions(a.size), a.entries):
            if e % pe:
                return False
            if j - i < self.k and e % pe1:
                return False
        return True


def reduce_mod_level(a: UniMatrix, level) -> UniMatrix:
    """Canonical coset representative of a modulo a filtration subgroup.

    With an integer ``level`` k >= 1, quotients by gamma_k: entries at
    distance >= k are zeroed (k = n realizes U-bar for U_{n+1}(F_p)).  With
    a :class:`FiltrationLevel` (k, e), entries at distance < k are kept mod
    p^{e+1} and entries at distance >= k are kept mod p^e.
    """
    if isinstance(level, FiltrationLevel):
        k = level.k
        pe = a.p**level.exponent
        pe1 = pe * a.p
        ent = [
            e % pe1 if j - i < k else e % pe
            for (i, j), e in zip(_positions(a.size), a.entries)
        ]
        return UniMatrix(a.size, a.p, a.r, ent)
    k = level
    if k < 1:
        raise ValueError(f"filtration index must be >= 1, got {k}")
    ent = [e if j - i < k else 0 for (i, j), e in zip(_positions(a.size), a.entries)]
    return UniMatrix(a.size, a.p, a.r, ent)


def group_exponent(n: int, p: int, r: int = 1) -> int:
    """Exponent of U_{n+1}(Z/p^r): p^(r - 1 + ceil(log_p(n+1))).

    The binding constraint is the binomial valuation in (I+N)^(p^b): entries
    of C(p^b, k) N^k for k <= n must vanish mod p^r, the worst k being the
    largest p-power <= n, and the regular unipotent attains the bound.  The
    closed form is cross-checked against exhaustive order enumeration in the
    test suite before being relied on anywhere.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    c = 0
    t = 1
    while t < n + 1:
        t *= p
        c += 1
    return p ** (r - 1 + c)


def exponent_by_enumeration(n: int, p: int, r: int = 1, cap: int = 3_000_000) -> int:
    """Exponent of U_{n+1}(Z/p^r) by enumerating every element's order.

    Independent oracle for :func:`group_exponent`; refuses to enumerate
    groups larger than ``cap``.
    """
    size = n + 1
    total = (p**r) ** (size * (size - 1) // 2)
    if total > cap:
        raise Unsupported(f"group has {total} elements, above enumeration cap {cap}")
    exp = 1
    for m in enumerate_group(size, p, r):
        o = order(m)
        if o > exp:
            exp = o
    return exp


def enumerate_group(size: int, p: int, r: int = 1, distance_cap: int | None = None):
    """Yield every element of U_size(Z/p^r), or of the quotient by gamma_k
    (canonical representatives) when ``distance_cap`` = k is given."""
    from itertools import product

    mod = p**r
    pos = _positions(size)
    ranges = [range(mod) if distance_cap is None or j - i < distance_cap else range(1) for i, j in pos]
    for combo in product(*ranges):
        yield UniMatrix(size, p, r, combo)


# -- local plans -----------------------------------------------------------


@dataclass(frozen=True)
class LocalPlan:
    """Images of (Frobenius, inertia) generators of a tame local group.

    The defining relation sigma tau sigma^-1 = tau^q (q the absolute norm
    of the prime) is verified on construction.
    """

    sigma_image: UniMatrix
    tau_image: UniMatrix
    q: int
    kind: str

    def __post_init__(self):
        _check_compatible(self.sigma_image, self.tau_image)
        lhs = compose(compose(self.sigma_image, self.tau_image), self.sigma_image.inverse())
        rhs = self.tau_image**self.q
        if lhs != rhs:
            raise PlanInvalid(
                f"tame relation fails: sigma tau sigma^-1 != tau^{self.q} for kind={self.kind!r}"
            )

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "q": self.q,
            "sigma": self.sigma_image.to_json_dict(),
            "tau": self.tau_image.to_json_dict(),
        }


def _require_prime(q: int) -> None:
    from sympy import isprime

    if not isprime(q):
        raise ValueError(f"q must be a rational prime, got {q}")


def _order_condition(y: UniMatrix, q: int) -> None:
    """order(y) | q - 1, i.e. v_p(q-1) >= log_p order(y)."""
    o = order(y)
    if (q - 1) % o:
        p = y.p
        need = 0
        t = o
        while t > 1:
            t //= p
            need += 1
        have = 0
        t = q - 1
        while t % p == 0:
            t //= p
            have += 1
        raise PlanInvalid(
            f"inertia image has order {o}: needs v_{p}(q-1) >= {need}, "
            f"but q={q} has v_{p}(q-1) = {have}"
        )


def sr_plan(y: UniMatrix, q: int) -> LocalPlan:
    """Scholz-Reichardt plan: trivial Frobenius, inertia -> y.

    Requires order(y) | q - 1 so that y^(q-1) = 1 makes the tame relation
    automatic.
    """
    _require_prime(q)
    _order_condition(y, q)
    sigma = UniMatrix.identity(y.size, y.p, y.r)
    return LocalPlan(sigma, y, q, "SR")


def trivial_plan(x: UniMatrix, q: int) -> LocalPlan:
    """Unramified plan: Frobenius -> x, trivial inertia. Valid for any q."""
    _require_prime(q)
    tau = UniMatrix.identity(x.size, x.p, x.r)
    return LocalPlan(x, tau, q, "trivial")


def abelian_plan(x: UniMatrix, y: UniMatrix, q: int) -> LocalPlan:
    """Plan with commuting images: Frobenius -> x, inertia -> y.

    Requires xy = yx and order(y) | q - 1.
    """
    _require_prime(q)
    _check_compatible(x, y)
    if compose(x, y) != compose(y, x):
        raise PlanInvalid("abelian plan needs commuting images, but xy != yx")
    _order_condition(y, q)
    return LocalPlan(x, y, q, "abelian")


def block_near_diagonal_nilpotent(
    n: int,
    p: int,
    blocks: Sequence[tuple[int, int]],
    lambdas: Sequence[Sequence[int] | None],
) -> tuple[int, ...]:
    """Entry vector of the block near-diagonal nilpotent matrix Lambda.

    ``blocks`` partitions the near-diagonal slots 1..n into consecutive
    (start, end) intervals; a block with lambda data None is a zero block.
    In a nonzero block of length L the slots carry the cumulative products
    1, l_1, l_1 l_2, ..., requiring L-1 nonzero multipliers.
    """
    covered = []
    for start, end in blocks:
        if not 1 <= start <= end <= n:
            raise ValueError(f"block ({start},{end}) out of range 1..{n}")
        covered.extend(range(start, end + 1))
    if covered != list(range(1, n + 1)):
        raise ValueError(f"blocks {list(blocks)} do not partition 1..{n} in order")
    if len(lambdas) != len(blocks):
        raise ValueError("need one lambda list (or None) per block")
    size = n + 1
    ent = [0] * (size * (size - 1) // 2)
    idx = _index_of(size)
    for (start, end), lams in zip(blocks, lambdas):
        if lams is None:
            continue
        length = end - start + 1
        if len(lams) != length - 1:
            raise ValueError(
                f"block ({start},{end}) has length {length}: needs {length - 1} lambdas, got {len(lams)}"
            )
        c = 1
        ent[idx[(start, start + 1)]] = c
        for off, lam in enumerate(lams, start=1):
            lam %= p
            if lam == 0:
                raise PlanInvalid(
                    "lambda must be nonzero within a block; split the block instead"
                )
            c = c * lam % p
            ent[idx[(start + off, start + off + 1)]] = c
    return tuple(ent)


def block_plan(
    n: int,
    p: int,
    chi_sigma: int,
    chi_tau: int,
    lambdas: Sequence[Sequence[int] | None],
    blocks: Sequence[tuple[int, int]],
    q: int,
) -> LocalPlan:
    """Block plan: sigma -> I + chi_sigma*Lambda, tau -> I + chi_tau*Lambda.

    Lambda is the block near-diagonal nilpotent built from ``blocks`` and
    ``lambdas``.  Needs p > n (so Lambda^p = 0 and I + c*Lambda has order
    dividing p) and q = 1 mod p (so the tame relation holds).  The two
    images commute since both are polynomials in Lambda.
    """
    if p <= n:
        raise Unsupported(f"block plans require p > n, got p={p}, n={n}")
    _require_prime(q)
    if (q - 1) % p:
        raise PlanInvalid(f"block plan needs q = 1 mod p, but {q} != 1 mod {p}")
    lam = block_near_diagonal_nilpotent(n, p, blocks, lambdas)
    size = n + 1
    sigma = UniMatrix(size, p, 1, tuple(e * chi_sigma for e in lam))
    tau = UniMatrix(size, p, 1, tuple(e * chi_tau for e in lam))
    if compose(sigma, tau) != compose(tau, sigma):
        raise PlanInvalid("block plan images fail to commute")
    if order(tau) not in (1, p):
        raise PlanInvalid("block plan inertia image must have order 1 or p")
    return LocalPlan(sigma, tau, q, "block")

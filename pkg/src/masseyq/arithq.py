"""Tame arithmetic over Q: residue indices, Hilbert symbols, mod-p Dirichlet
characters with prescribed local behavior, the governing-field criterion for
ramification/splitting patterns, and auxiliary-prime searches.

Characters here are F_p-valued characters of the absolute Galois group of Q
in Kummer-free form: a finite set of component exponents e_q at primes
q = 1 mod p, the component at q being the canonical Z/p-quotient character
of (Z/q)^x normalized by sending the least primitive root mod q to 1.  The
restriction to a tame local group is the pair (inertia value t, Frobenius
value s).  Everything is specialized to base field Q; over Q with p odd the
prime-to-everything Kummer group is trivial (the only units are +-1 and -1
is a p-th power), which trivializes the global obstruction group and makes
the governing field of a splitting set T simply Q(zeta_p, p-th roots of T).

p = 2 is supported only by the Hilbert-symbol operations; the governing
machinery for p = 2 would need -1 and the real place in the Kummer basis
and is deliberately excluded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

from sympy import factorint, isprime, primitive_root, sieve

from .linalg import kernel_vectors
from .unipotent import Unsupported

log = logging.getLogger(__name__)

#: The real place of Q, as accepted by :func:`hilbert_symbol`.
OO = "oo"


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class ModulusTooLarge(Exception):
    """Brute-force character enumeration refused: modulus above cap."""


class NoAuxiliaryPrime(Exception):
    """Auxiliary-prime scan exhausted its bound; carries diagnostics."""

    def __init__(self, message: str, bound: int, scanned: int, residuals=None):
        super().__init__(message)
        self.bound = bound
        self.scanned = scanned
        self.residuals = residuals


@lru_cache(maxsize=None)
def least_primitive_root(q: int) -> int:
    return primitive_root(q)


def v_p(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("v_p(0) is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def res_index(a: int, ell: int, p: int) -> int:
    """Discrete index of a modulo ell in F_p.

    Requires ell prime with ell = 1 mod p and gcd(a, ell) = 1.  Returns the
    k in 0..p-1 with a^((ell-1)/p) = g^(k(ell-1)/p) mod ell, g the least
    primitive root; k = 0 iff a is a p-th power residue mod ell.
    """
    if not isprime(p):
        raise DomainError(f"p must be prime, got {p}")
    if not isprime(ell):
        raise DomainError(f"ell must be prime, got {ell}")
    if (ell - 1) % p:
        raise DomainError(f"need ell = 1 mod p, but {ell} != 1 mod {p}")
    if a % ell == 0:
        raise DomainError(f"a = {a} is divisible by ell = {ell}")
    e = (ell - 1) // p
    t = pow(a, e, ell)
    if t == 1:
        return 0
    u = pow(least_primitive_root(ell), e, ell)
    x = u
    for k in range(1, p):
        if x == t:
            return k
        x = x * u % ell
    raise AssertionError("discrete index not found; primitive root arithmetic broken")


# -- Hilbert symbols --------------------------------------------------------


def _strip(x: int, q: int) -> tuple[int, int]:
    v = 0
    while x % q == 0:
        x //= q
        v += 1
    return v, x


def _legendre(u: int, q: int) -> int:
    t = pow(u % q, (q - 1) // 2, q)
    return 1 if t == 1 else -1


def hilbert_symbol(a: int, b: int, v) -> int:
    """Classical Hilbert symbol (a, b)_v in {+1, -1} over Q.

    ``v`` is the string "oo" for the real place, or a rational prime.
    The product over all places is +1 (quadratic reciprocity).
    """
    if a == 0 or b == 0:
        raise DomainError("Hilbert symbol needs nonzero arguments")
    if v == OO:
        return -1 if a < 0 and b < 0 else 1
    q = v
    if not isinstance(q, int) or not isprime(q):
        raise DomainError(f"place must be 'oo' or a prime, got {v!r}")
    alpha, u = _strip(a, q)
    beta, w = _strip(b, q)
    if q == 2:
        eps_u, eps_w = ((u - 1) // 2) % 2, ((w - 1) // 2) % 2
        om_u, om_w = ((u * u - 1) // 8) % 2, ((w * w - 1) // 8) % 2
        e = eps_u * eps_w + alpha * om_w + beta * om_u
        return -1 if e % 2 else 1
    result = -1 if (alpha * beta * ((q - 1) // 2)) % 2 else 1
    if beta % 2:
        result *= _legendre(u, q)
    if alpha % 2:
        result *= _legendre(w, q)
    return result


def symbol_places(a: int, b: int) -> list:
    """The finite check set for (a, b): the real place, 2, and the odd
    primes dividing ab.  Symbols at all other places are +1."""
    odd = set()
    for x in (a, b):
        for q in factorint(abs(x)):
            if q != 2:
                odd.add(q)
    return [OO, 2] + sorted(odd)


def symbol_ledger(a: int, b: int) -> list[tuple[object, int]]:
    return [(v, hilbert_symbol(a, b, v)) for v in symbol_places(a, b)]


def _require_squarefree(x: int, name: str) -> None:
    if x == 0:
        raise DomainError(f"{name} must be nonzero")
    if any(e > 1 for e in factorint(abs(x)).values()):
        raise DomainError(f"{name} = {x} is not squarefree")


def cup_vanishes_p2(a: int, b: int) -> bool:
    """Whether the mod-2 cup product of the Kummer classes of a and b
    vanishes globally: all Hilbert symbols over the places dividing
    2ab and the real place equal +1."""
    _require_squarefree(a, "a")
    _require_squarefree(b, "b")
    return all(s == 1 for _, s in symbol_ledger(a, b))


# -- mod-p characters of Gamma_Q --------------------------------------------


class CharacterQ:
    """F_p-valued character of the absolute Galois group of Q.

    Stored as component exponents e_q at finitely many primes q = 1 mod p,
    each component normalized against the least primitive root mod q.  Zero
    components are dropped.  p must be odd.
    """

    __slots__ = ("p", "components")

    def __init__(self, p: int, components: Mapping[int, int] | None = None):
        if not isprime(p) or p == 2:
            raise DomainError(f"CharacterQ needs an odd prime, got {p}")
        comps: dict[int, int] = {}
        for q, e in (components or {}).items():
            if not isprime(q):
                raise DomainError(f"component prime {q} is not prime")
            if (q - 1) % p:
                raise DomainError(
                    f"component prime {q} != 1 mod {p}: no tame Z/{p} ramification there"
                )
            e %= p
            if e:
                comps[q] = e
        self.p = p
        self.components = dict(sorted(comps.items()))

    def support(self) -> tuple[int, ...]:
        return tuple(self.components)

    def is_trivial(self) -> bool:
        return not self.components

    def generator_at(self, q: int) -> int:
        """The fixed normalization generator: least primitive root mod q."""
        if q not in self.components:
            raise DomainError(f"{q} is not a component prime")
        return least_primitive_root(q)

    def value_on_frobenius(self, ell: int) -> int:
        """chi(Frob_ell) for a prime ell outside the support."""
        if not isprime(ell):
            raise DomainError(f"ell must be prime, got {ell}")
        if ell in self.components:
            raise DomainError(f"chi is ramified at {ell}; Frobenius value undefined")
        return sum(e * res_index(ell, q, self.p) for q, e in self.components.items()) % self.p

    def to_text(self) -> str:
        lines = [f"p: {self.p}"]
        lines += [f"comp: {q} {e}" for q, e in self.components.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CharacterQ":
        p = None
        comps: dict[int, int] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("p:"):
                if p is not None:
                    raise ValueError(f"duplicate p line (line {lineno})")
                p = int(line[2:].strip())
            elif line.startswith("comp:"):
                if p is None:
                    raise ValueError(f"comp before p (line {lineno})")
                parts = line[5:].split()
                if len(parts) != 2:
                    raise ValueError(f"bad comp line {lineno}: expected 'comp: q e'")
                q, e = int(parts[0]), int(parts[1])
                if q in comps:
                    raise ValueError(f"duplicate component {q} (line {lineno})")
                comps[q] = e
            else:
                raise ValueError(f"unrecognized line {lineno}: {line!r}")
        if p is None:
            raise ValueError("missing p line")
        return cls(p, comps)

    def __eq__(self, other):
        if not isinstance(other, CharacterQ):
            return NotImplemented
        return self.p == other.p and self.components == other.components

    def __hash__(self):
        return hash((self.p, tuple(self.components.items())))

    def __repr__(self):
        return f"CharacterQ(p={self.p}, components={self.components})"


@dataclass(frozen=True)
class LocalDatum:
    """Restriction of a character to the tame local group at q: the value t
    on a fixed inertia generator and s on a Frobenius lift."""

    p: int
    q: int
    t: int
    s: int

    def __post_init__(self):
        if not isprime(self.q):
            raise DomainError(f"q must be prime, got {self.q}")
        if self.q == self.p:
            raise DomainError(f"q = p = {self.p} is a wild place, not tame")
        object.__setattr__(self, "t", self.t % self.p)
        object.__setattr__(self, "s", self.s % self.p)
        if self.t and (self.q - 1) % self.p:
            raise DomainError(
                f"inertia value t != 0 needs q = 1 mod p, but {self.q} != 1 mod {self.p}"
            )


def local_restriction(chi: CharacterQ, q: int) -> LocalDatum:
    """Restrict chi to the local group at a tame prime q.

    t is the component exponent at q; s is the Frobenius value of the
    prime-to-q part of chi.  The wild place q = p is rejected: for odd p
    the local pro-p group of Q_p is free, so no local datum is needed there.
    """
    if not isprime(q):
        raise DomainError(f"q must be prime, got {q}")
    if q == chi.p:
        raise Unsupported(
            f"q = p = {q} is wild; the local pro-p group there is free and carries no datum"
        )
    p = chi.p
    t = chi.components.get(q, 0)
    s = sum(e * res_index(q, q2, p) for q2, e in chi.components.items() if q2 != q) % p
    return LocalDatum(p, q, t, s)


def global_cup_vanishes(
    chi1: CharacterQ, chi2: CharacterQ
) -> tuple[bool, tuple[tuple[int, int], ...]]:
    """Whether the cup product chi1 u chi2 vanishes in H^2 over Q.

    Checked place by place at the primes q = 1 mod p dividing either
    conductor via the tame local pairing t*s' - t'*s; places where zeta_p
    is not local (and the wild place, for odd p over Q) have free local
    groups and contribute nothing, and localization is injective here, so
    the finite ledger decides the global verdict.  Returns (verdict,
    ledger of (q, pairing value)).  For p = 2 use :func:`cup_vanishes_p2`.
    """
    if chi1.p != chi2.p:
        raise DomainError(f"characters have different p: {chi1.p} vs {chi2.p}")
    p = chi1.p
    places = sorted(set(chi1.support()) | set(chi2.support()))
    ledger = []
    for q in places:
        d1 = local_restriction(chi1, q)
        d2 = local_restriction(chi2, q)
        ledger.append((q, (d1.t * d2.s - d2.t * d1.s) % p))
    return all(v == 0 for _, v in ledger), tuple(ledger)


# -- governing fields and the ramification/splitting criterion ---------------


@dataclass(frozen=True)
class GoverningBasis:
    """Kummer basis data of the governing field for splitting set T over Q:
    for odd p the basis of V^T modulo p-th powers is exactly the primes of
    T (the unit -1 is itself a p-th power)."""

    p: int
    T: tuple[int, ...]
    basis: tuple[int, ...]


def governing_basis(p: int, T: Sequence[int]) -> GoverningBasis:
    if not isprime(p) or p == 2:
        raise Unsupported(
            "governing fields are implemented for odd p only "
            "(p = 2 needs -1 and the real place in the Kummer basis)"
        )
    T = tuple(sorted(set(T)))
    for t in T:
        if not isprime(t):
            raise DomainError(f"T must consist of primes, got {t}")
    return GoverningBasis(p, T, T)


def unit_kummer_basis(p: int) -> tuple[int, ...]:
    """Basis of the everywhere-unramified Kummer group V^0/(Q^x)^p.

    The units of Z are +-1 and -1 = (-1)^p for odd p, so the group is
    trivial: the empty set already trivializes every global obstruction
    over Q, and no auxiliary splitting conditions are ever needed for that
    purpose.
    """
    if not isprime(p) or p == 2:
        raise Unsupported("unit Kummer basis implemented for odd p only")
    return ()


def shafarevich_trivializing_set(p: int) -> tuple[int, ...]:
    """A set of primes trivializing the global-to-local H^2 kernel over Q:
    empty for odd p, since the dual Kummer group is already trivial."""
    basis = unit_kummer_basis(p)
    log.debug("unit Kummer basis for p=%d: %r (obstruction group trivial)", p, basis)
    return basis


@dataclass(frozen=True)
class GrasMunnierResult:
    """Outcome of the governing-field criterion for 'exactly ramified at S,
    split completely at T'.  ``certificate`` is None when no extension
    exists, else coefficients a_q in F_p^x aligned with S witnessing a
    vanishing Frobenius combination; ``sigma_matrix`` has one row per basis
    prime of T, one column per prime of S."""

    p: int
    S: tuple[int, ...]
    T: tuple[int, ...]
    certificate: tuple[int, ...] | None
    sigma_matrix: tuple[tuple[int, ...], ...]

    def exists(self) -> bool:
        return self.certificate is not None

    def to_json_dict(self) -> dict:
        return {
            "p": self.p,
            "S": list(self.S),
            "basisT": list(self.T),
            "a": None if self.certificate is None else list(self.certificate),
            "sigma_matrix": [list(r) for r in self.sigma_matrix],
        }


def gras_munnier(S: Sequence[int], T: Sequence[int], p: int) -> GrasMunnierResult:
    """Decide whether a cyclic degree-p extension of Q exists, exactly
    ramified at the primes of S and splitting completely at those of T.

    The criterion: the Frobenius vectors sigma_q of the primes q in S in
    the governing extension (coordinates res_index(t, q, p) at the basis
    primes t of T) admit a linear combination sum a_q sigma_q = 0 with all
    a_q nonzero.  Scaling a certificate by a nonzero scalar gives another
    one, so only existence is canonical; the lexicographically least
    certificate is returned.
    """
    gov = governing_basis(p, T)
    S = tuple(sorted(set(S)))
    for q in S:
        if not isprime(q):
            raise DomainError(f"S must consist of primes, got {q}")
        if (q - 1) % p:
            raise DomainError(
                f"q = {q} in S has q != 1 mod {p}: no tame Z/{p} ramification is possible"
            )
        if q in gov.basis:
            raise ValueError(f"S and T must be disjoint; both contain {q}")
    sigma = tuple(tuple(res_index(t, q, p) for q in S) for t in gov.basis)
    if not S:
        return GrasMunnierResult(p, S, gov.basis, (), sigma)
    certificate = None
    for vec in kernel_vectors([list(row) for row in sigma], len(S), p):
        if all(vec):
            certificate = vec
            break
    return GrasMunnierResult(p, S, gov.basis, certificate, sigma)


@lru_cache(maxsize=None)
def _dlog_table(q: int) -> dict[int, int]:
    """Full discrete-log table mod q for the least primitive root."""
    g = least_primitive_root(q)
    table = {}
    x = 1
    for k in range(q - 1):
        table[x] = k
        x = x * g % q
    return table


def dirichlet_oracle(
    S: Sequence[int], T: Sequence[int], p: int, modulus_cap: int = 300_000
) -> dict[int, int] | None:
    """Brute-force replacement for :func:`gras_munnier`.

    Enumerates every F_p-valued character of (Z/prod(S))^x by full
    discrete-log tables (no residue-index shortcut) and reports component
    exponents of one that is ramified at every q in S and trivial at every
    t in T, or None.  Raises :class:`ModulusTooLarge` above the cap.
    """
    if not isprime(p):
        raise DomainError(f"p must be prime, got {p}")
    S = tuple(sorted(set(S)))
    T = tuple(sorted(set(T)))
    for x in S + T:
        if not isprime(x):
            raise DomainError(f"S and T must consist of primes, got {x}")
    if set(S) & set(T):
        raise ValueError(f"S and T must be disjoint: {set(S) & set(T)}")
    modulus = 1
    for q in S:
        modulus *= q
    if modulus > modulus_cap:
        raise ModulusTooLarge(f"prod(S) = {modulus} above cap {modulus_cap}")
    if not S:
        return {}
    if any((q - 1) % p for q in S):
        return None
    tables = {q: _dlog_table(q) for q in S}
    for combo in product(range(1, p), repeat=len(S)):
        ok = True
        for t in T:
            val = sum(c * (tables[q][t % q] % p) for c, q in zip(combo, S)) % p
            if val:
                ok = False
                break
        if ok:
            return dict(zip(S, combo))
    return None


# -- auxiliary-prime searches ------------------------------------------------


def _aux_scan(p: int, m: int, conditions, bound: int, skip=frozenset()):
    """Increasing scan over primes ell <= bound with v_p(ell-1) = m exactly,
    applying extra predicate ``conditions(ell)``; returns (ell | None, count
    of candidates tested)."""
    pm = p**m
    pm1 = pm * p
    tested = 0
    for ell in sieve.primerange(2, bound + 1):
        if ell in skip or ell == p:
            continue
        d = ell - 1
        if d % pm or d % pm1 == 0:
            continue
        tested += 1
        if conditions(ell):
            return ell, tested
    return None, tested


def find_aux_prime(
    p: int,
    m: int,
    split_kummer: Sequence[int] = (),
    split_chars: Sequence[CharacterQ] = (),
    bound: int = 1_000_000,
) -> int | None:
    """Least prime ell <= bound with v_p(ell - 1) = m exactly, splitting
    completely in the Kummer layer of each integer in ``split_kummer``
    (res_index(a, ell, p) = 0) and in the field of each character in
    ``split_chars`` (chi(Frob_ell) = 0).

    Returns None when the bound is exhausted (callers raise the bound).
    The found prime's predicates are re-verifiable by direct congruences.
    """
    if not isprime(p):
        raise DomainError(f"p must be prime, got {p}")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    for a in split_kummer:
        if a == 0:
            raise DomainError("split_kummer entries must be nonzero")
    skip = set()
    for chi in split_chars:
        skip.update(chi.support())

    def conditions(ell: int) -> bool:
        for a in split_kummer:
            if a % ell == 0 or res_index(a, ell, p) != 0:
                return False
        for chi in split_chars:
            if chi.value_on_frobenius(ell) != 0:
                return False
        return True

    found, tested = _aux_scan(p, m, conditions, bound, frozenset(skip))
    log.debug(
        "aux prime scan p=%d m=%d bound=%d: tested %d candidates, found %r",
        p, m, bound, tested, found,
    )
    return found


@dataclass(frozen=True)
class PrescribedCharacter:
    """Result of :func:`character_with_local_data`: the assembled character,
    the auxiliary ramified prime (None in the degenerate all-zero case) and
    its component exponent."""

    chi: CharacterQ
    aux_prime: int | None
    aux_exponent: int | None
    scanned: int


def character_with_local_data(
    prescribed: Sequence[LocalDatum],
    p: int,
    m: int,
    bound: int = 1_000_000,
) -> PrescribedCharacter:
    """Construct a character of Gamma_Q matching every prescribed tame local
    datum exactly, ramified additionally at one auxiliary prime ell with
    v_p(ell - 1) = m.

    Component exponents at the prescribed primes are pinned by the inertia
    values; the auxiliary prime is chosen by an increasing sieve so that its
    component corrects every Frobenius value to the prescribed s (with
    all-zero data this degenerates to complete splitting of the prescribed
    primes in the auxiliary field).  With an empty prescription the trivial
    character is returned and no auxiliary prime is used.  Raises
    :class:`NoAuxiliaryPrime` (with diagnostics) if no prime <= bound
    satisfies the simultaneous congruences.
    """
    if not isprime(p) or p == 2:
        raise DomainError(f"needs an odd prime p, got {p}")
    qs = [d.q for d in prescribed]
    if len(set(qs)) != len(qs):
        raise ValueError(f"prescribed primes must be distinct, got {qs}")
    for d in prescribed:
        if d.p != p:
            raise ValueError(f"datum at {d.q} is mod {d.p}, expected {p}")
    if not prescribed:
        return PrescribedCharacter(CharacterQ(p, {}), None, None, 0)
    base = {d.q: d.t for d in prescribed if d.t}
    residuals = {}
    for d in prescribed:
        have = sum(
            e * res_index(d.q, q2, p) for q2, e in base.items() if q2 != d.q
        ) % p
        residuals[d.q] = (d.s - have) % p
    pivot = next((q for q, r in residuals.items() if r), None)

    def conditions(ell: int) -> bool:
        return _aux_exponent(ell, p, residuals, pivot) is not None

    found, tested = _aux_scan(p, m, conditions, bound, frozenset(qs))
    if found is None:
        raise NoAuxiliaryPrime(
            f"no prime <= {bound} matches the simultaneous congruences "
            f"(p={p}, m={m}, residuals={residuals})",
            bound=bound,
            scanned=tested,
            residuals=dict(residuals),
        )
    e_aux = _aux_exponent(found, p, residuals, pivot)
    chi = CharacterQ(p, {**base, found: e_aux})
    for d in prescribed:
        got = local_restriction(chi, d.q)
        if (got.t, got.s) != (d.t, d.s):
            raise AssertionError(
                f"assembled character fails its own datum at {d.q}: "
                f"got ({got.t},{got.s}), wanted ({d.t},{d.s})"
            )
    return PrescribedCharacter(chi, found, e_aux, tested)


def _aux_exponent(ell: int, p: int, residuals: dict[int, int], pivot) -> int | None:
    """Exponent e in F_p^x with e * res_index(q, ell, p) = residual_q for
    every prescribed q, or None when ell fails the congruences."""
    r_vec = {q: res_index(q, ell, p) for q in residuals}
    if pivot is None:
        return 1 if all(v == 0 for v in r_vec.values()) else None
    if r_vec[pivot] == 0:
        return None
    e = residuals[pivot] * pow(r_vec[pivot], -1, p) % p
    for q, r in residuals.items():
        if e * r_vec[q] % p != r:
            return None
    return e


def pr_lift_required(q: int, p: int, r: int) -> bool:
    """Necessary congruence for a character ramified at the tame prime q to
    appear on the near-diagonal of a unipotent representation over Z/p^r:
    q = 1 mod p^r."""
    if q == p:
        raise DomainError(f"q = p = {p} is wild, not tame")
    if not isprime(q):
        raise DomainError(f"q must be prime, got {q}")
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    return (q - 1) % p**r == 0

"""Words in free pro-p groups, truncated Magnus expansion over F_p, and
Zassenhaus-filtration depth of relators.

The Magnus expansion sends x_i to 1 + X_i and x_i^-1 to the geometric series
1 - X_i + X_i^2 - ..., truncated at a total-degree cutoff, landing in the
free noncommutative power series ring over F_p.  The Zassenhaus filtration
is used through its Magnus-coefficient characterization: a word lies in the
n-th term iff every coefficient in degrees 1..n-1 vanishes, and its depth is
the first degree with a nonzero coefficient.  Relators of depth > n certify
(Vogel's criterion) that the presented group has the strong k-fold Massey
property for 2 <= k <= n.

Coefficient extraction subsumes Fox derivatives; they get no separate API.
Everything here is pure and immutable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Mapping, Sequence

from .unipotent import UniMatrix, _index_of, apply_letters, reduce_mod_level


class ParseError(ValueError):
    """Malformed presentation or word text; message carries a line number."""


# -- words -----------------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """Group word as a normalized sequence of (generator, exponent) letters.

    Generators are 1-based; exponents are nonzero integers; adjacent letters
    have distinct generators.  The empty sequence is the identity.
    """

    letters: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", _normalize(self.letters))

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    @classmethod
    def generator(cls, i: int, e: int = 1) -> "Word":
        return cls(((i, e),))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, e: int) -> "Word":
        if e == 0:
            return Word()
        base = self if e > 0 else self.inverse()
        return Word(base.letters * abs(e))

    def is_identity(self) -> bool:
        return not self.letters

    def exponent_sum(self, i: int) -> int:
        return sum(e for g, e in self.letters if g == i)

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=0)

    def length(self) -> int:
        """Word length counting letters with multiplicity |exponent|."""
        return sum(abs(e) for _, e in self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(f"x{g}" if e == 1 else f"x{g}^{e}" for g, e in self.letters)


def _normalize(letters: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[list[int]] = []
    for g, e in letters:
        if g < 1:
            raise ValueError(f"generator indices are 1-based, got {g}")
        if not isinstance(e, int):
            raise ValueError(f"exponent must be an integer, got {e!r}")
        if e == 0:
            continue
        if out and out[-1][0] == g:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([g, e])
    return tuple((g, e) for g, e in out)


def word_commutator(u: Word, v: Word) -> Word:
    """[u, v] = u v u^-1 v^-1."""
    return u * v * u.inverse() * v.inverse()


_TOKEN_RE = re.compile(r"^x(\d+)(?:\^(-?\d+))?$")


def parse_word_tokens(tokens: Sequence[str], lineno: int | None = None) -> Word:
    """Parse tokens of the form ``x<i>`` or ``x<i>^<e>`` into a Word."""
    where = f" (line {lineno})" if lineno is not None else ""
    letters = []
    for tok in tokens:
        m = _TOKEN_RE.match(tok)
        if not m:
            raise ParseError(f"bad word token {tok!r}{where}: expected x<i> or x<i>^<e>")
        g = int(m.group(1))
        e = int(m.group(2)) if m.group(2) is not None else 1
        if g < 1:
            raise ParseError(f"bad generator index in {tok!r}{where}: must be >= 1")
        if e == 0:
            raise ParseError(f"zero exponent in {tok!r}{where}")
        letters.append((g, e))
    return Word(tuple(letters))


# -- presentations ---------------------------------------------------------


class Presentation:
    """Finitely presented pro-p group: generator count, relators, prime p.

    Every relator must use generators <= g and have all exponent sums = 0
    mod p (it lies in F^p [F,F]); both are checked at construction.
    """

    def __init__(self, num_generators: int, relators: Iterable[Word], p: int):
        from sympy import isprime

        if num_generators < 1:
            raise ValueError(f"need at least one generator, got {num_generators}")
        if not isprime(p):
            raise ValueError(f"p must be prime, got {p}")
        rels = tuple(relators)
        for k, w in enumerate(rels, start=1):
            if w.max_generator() > num_generators:
                raise ValueError(
                    f"relator {k} ({w}) uses x{w.max_generator()} but only "
                    f"{num_generators} generators are declared"
                )
            for i in range(1, num_generators + 1):
                if w.exponent_sum(i) % p:
                    raise ValueError(
                        f"relator {k} ({w}) has exponent sum {w.exponent_sum(i)} "
                        f"in x{i}, not divisible by p={p}"
                    )
        self.num_generators = num_generators
        self.relators = rels
        self.p = p

    def __repr__(self) -> str:
        rels = ", ".join(str(w) for w in self.relators) or "-"
        return f"Presentation(g={self.num_generators}, p={self.p}, relators=[{rels}])"


def parse_presentation(text: str, p: int) -> Presentation:
    """Parse the presentation text format.

    One ``gens: <g>`` line followed by zero or more ``rel: tok tok ...``
    lines, tokens as in :func:`parse_word_tokens`.  Blank lines and lines
    starting with ``#`` are ignored.  Errors carry line numbers.
    """
    gens = None
    relators: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("gens:"):
            if gens is not None:
                raise ParseError(f"duplicate gens line (line {lineno})")
            try:
                gens = int(line[len("gens:") :].strip())
            except ValueError:
                raise ParseError(f"bad generator count (line {lineno}): {line!r}") from None
        elif line.startswith("rel:"):
            if gens is None:
                raise ParseError(f"rel before gens (line {lineno})")
            relators.append(parse_word_tokens(line[len("rel:") :].split(), lineno))
        else:
            raise ParseError(f"unrecognized line {lineno}: {line!r}")
    if gens is None:
        raise ParseError("missing gens line")
    return Presentation(gens, relators, p)


# -- truncated noncommutative power series ---------------------------------


class NcSeries:
    """Noncommutative power series over F_p truncated at total degree D.

    Coefficients are stored sparsely, keyed by multi-indices (i_1, ..., i_k)
    with k <= D; the empty index keys the constant term.
    """

    __slots__ = ("p", "cutoff", "coeffs")

    def __init__(self, p: int, cutoff: int, coeffs: Mapping[tuple[int, ...], int] | None = None):
        if cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {cutoff}")
        self.p = p
        self.cutoff = cutoff
        cleaned: dict[tuple[int, ...], int] = {}
        if coeffs:
            for idx, c in coeffs.items():
                if len(idx) > cutoff:
                    continue
                c %= p
                if c:
                    cleaned[tuple(idx)] = c
        self.coeffs = cleaned

    @classmethod
    def one(cls, p: int, cutoff: int) -> "NcSeries":
        return cls(p, cutoff, {(): 1})

    @property
    def constant(self) -> int:
        return self.coeffs.get((), 0)

    def coeff(self, index: Sequence[int]) -> int:
        return self.coeffs.get(tuple(index), 0)

    def __mul__(self, other: "NcSeries") -> "NcSeries":
        if self.p != other.p or self.cutoff != other.cutoff:
            raise ValueError("series with different p or cutoff")
        p, cutoff = self.p, self.cutoff
        out: dict[tuple[int, ...], int] = {}
        for ia, ca in self.coeffs.items():
            room = cutoff - len(ia)
            for ib, cb in other.coeffs.items():
                if len(ib) > room:
                    continue
                key = ia + ib
                v = (out.get(key, 0) + ca * cb) % p
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
        return NcSeries(p, cutoff, out)

    def __pow__(self, e: int) -> "NcSeries":
        if e < 0:
            return self.inverse() ** (-e)
        result = NcSeries.one(self.p, self.cutoff)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "NcSeries":
        """Inverse of a series with constant term 1, by geometric series."""
        if self.constant != 1:
            raise ValueError("can only invert series with constant term 1")
        t = NcSeries(self.p, self.cutoff, {k: -c for k, c in self.coeffs.items() if k})
        result = NcSeries.one(self.p, self.cutoff)
        power = NcSeries.one(self.p, self.cutoff)
        for _ in range(self.cutoff):
            power = power * t
            if not power.coeffs:
                break
            result = result + power
        return result

    def __add__(self, other: "NcSeries") -> "NcSeries":
        if self.p != other.p or self.cutoff != other.cutoff:
            raise ValueError("series with different p or cutoff")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            v = (out.get(k, 0) + c) % self.p
            if v:
                out[k] = v
            elif k in out:
                del out[k]
        return NcSeries(self.p, self.cutoff, out)

    def min_degree(self) -> int | None:
        """Least degree >= 1 carrying a nonzero coefficient, or None."""
        degs = [len(k) for k in self.coeffs if k]
        return min(degs) if degs else None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NcSeries):
            return NotImplemented
        return self.p == other.p and self.cutoff == other.cutoff and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        terms = sorted(self.coeffs.items(), key=lambda kv: (len(kv[0]), kv[0]))
        body = " + ".join(
            f"{c}" if not k else f"{c}*" + "".join(f"X{i}" for i in k) for k, c in terms
        )
        return f"NcSeries(p={self.p}, D={self.cutoff}: {body or '0'})"


def _binom(e: int, k: int) -> int:
    """Binomial coefficient C(e, k) for arbitrary integer e, k >= 0."""
    num = 1
    for t in range(k):
        num *= e - t
    return num // factorial(k)


def _letter_series(gen: int, exp: int, p: int, cutoff: int) -> NcSeries:
    """Magnus image of x_gen^exp: sum_k C(exp, k) X_gen^k up to the cutoff."""
    coeffs = {(): 1}
    for k in range(1, cutoff + 1):
        c = _binom(exp, k) % p
        if c:
            coeffs[(gen,) * k] = c
    return NcSeries(p, cutoff, coeffs)


def magnus_expand(w: Word, p: int, cutoff: int) -> NcSeries:
    """Image of w under x_i -> 1 + X_i, truncated at total degree ``cutoff``,
    over F_p.  Inverse generators expand by the truncated geometric series
    (exact within the quotient)."""
    result = NcSeries.one(p, cutoff)
    for gen, exp in w.letters:
        result = result * _letter_series(gen, exp, p, cutoff)
    return result


def epsilon(w: Word, index: Sequence[int], p: int) -> int:
    """Magnus coefficient of X_{i_1} ... X_{i_k} in the expansion of w."""
    index = tuple(index)
    if not index:
        return 1
    return magnus_expand(w, p, len(index)).coeff(index)


def zassenhaus_depth(w: Word, p: int, cap: int) -> int | None:
    """Least k <= cap such that some degree-k Magnus coefficient of w is
    nonzero; None when all coefficients up to the cap vanish (the word lies
    in filtration term cap+1 or deeper)."""
    if cap < 1:
        raise ValueError(f"cap must be >= 1, got {cap}")
    return magnus_expand(w, p, cap).min_degree()


def vogel_check(presentation: Presentation, n: int) -> bool:
    """True iff every relator has Zassenhaus depth > n.

    When true, the presented group satisfies the strong k-fold Massey
    property for all 2 <= k <= n.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return all(
        zassenhaus_depth(w, presentation.p, n) is None for w in presentation.relators
    )


# -- Magnus-coefficient unipotent representation ---------------------------


def magnus_representation(index: Sequence[int], w: Word, p: int) -> UniMatrix:
    """Matrix in U_{n+1}(F_p) with (a, b) entry the Magnus coefficient of w
    at the consecutive subindex (i_a, ..., i_{b-1}) of ``index``.

    For fixed index this is a group homomorphism in w; it sends x_j to the
    unipotent with 1 exactly at the near-diagonal slots a with i_a = j.
    Used for cross-checks of the lifting solver.
    """
    index = tuple(index)
    n = len(index)
    if n < 1:
        raise ValueError("index must be nonempty")
    if any(i < 1 for i in index):
        raise ValueError(f"index entries are 1-based generators, got {index}")
    series = magnus_expand(w, p, n)
    size = n + 1
    ent = [0] * (size * (size - 1) // 2)
    idx = _index_of(size)
    for a in range(1, size):
        for b in range(a + 1, size + 1):
            ent[idx[(a, b)]] = series.coeff(index[a - 1 : b - 1])
    return UniMatrix(size, p, 1, ent)


def obstruction_on_relator(
    presentation: Presentation,
    barlift: Sequence[UniMatrix],
    relator: Word,
) -> int:
    """Central obstruction of a mod-center lift at one relator.

    ``barlift`` gives generator images in U_{n+1}(F_p) that are required to
    satisfy every relator of the presentation modulo the center (any
    representatives may be passed; the corner entries are free choices).
    The relator is evaluated at these matrices in the full group; the value
    lies in the center and the returned scalar is its corner coordinate.
    Because relator exponent sums vanish mod p, re-choosing the central
    preimages cannot change the result.
    """
    if not barlift:
        raise ValueError("barlift must contain at least one matrix")
    size = barlift[0].size
    p = barlift[0].p
    if p != presentation.p:
        raise ValueError(f"barlift is mod {p} but presentation has p={presentation.p}")
    if len(barlift) != presentation.num_generators:
        raise ValueError(
            f"barlift has {len(barlift)} images for {presentation.num_generators} generators"
        )
    for k, w in enumerate(presentation.relators, start=1):
        value = apply_letters(barlift, w.letters)
        if not reduce_mod_level(value, size - 1).is_identity():
            raise ValueError(
                f"barlift fails relator {k} ({w}) modulo the center: not a valid mod-center lift"
            )
    for i in range(1, presentation.num_generators + 1):
        if relator.exponent_sum(i) % p:
            raise ValueError(
                f"relator ({relator}) has exponent sum not divisible by p={p} in x{i}; "
                "obstruction would depend on the preimage choice"
            )
    value = apply_letters(barlift, relator.letters)
    if not reduce_mod_level(value, size - 1).is_identity():
        raise ValueError(f"relator value is not central; ({relator}) is not deep enough")
    return value.entry(1, size)

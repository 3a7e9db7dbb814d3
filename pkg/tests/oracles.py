"""Independent brute-force oracles and random-instance generators shared by
the test modules.  These deliberately avoid the library's own formulas:
local solubility by residue enumeration, orders by repeated multiplication,
discrete logs by linear scan."""

from __future__ import annotations

import random

from masseyq import Presentation, UniMatrix, Word, compose, word_commutator, zassenhaus_depth


def hilbert_soluble(a: int, b: int, v) -> bool:
    """Does z^2 = a x^2 + b y^2 have a nontrivial solution over Q_v?

    Decided by enumerating primitive residue triples: sign check at the
    real place, residues mod 32 at 2, residues mod q^2 at odd q (valuations
    first normalized into {0, 1} by stripping square factors of q).
    """
    if v == "oo":
        return a > 0 or b > 0
    q = v

    def strip_even_valuation(x: int) -> int:
        vx = 0
        while x % q == 0:
            x //= q
            vx += 1
        return x * q ** (vx % 2)

    a, b = strip_even_valuation(a), strip_even_valuation(b)
    if q == 2:
        m = 32
        for x in range(m):
            for y in range(m):
                for z in range(m):
                    if x % 2 == 0 and y % 2 == 0 and z % 2 == 0:
                        continue
                    if (a * x * x + b * y * y - z * z) % m == 0:
                        return True
        return False
    m = q * q
    squares = {z * z % m for z in range(m)}
    for x in range(m):
        for y in range(m):
            # triples with x = y = 0 mod q force z = 0 mod q: imprimitive
            if x % q == 0 and y % q == 0:
                continue
            if (a * x * x + b * y * y) % m in squares:
                return True
    return False


def naive_order(a: UniMatrix) -> int:
    """Order by repeated multiplication (no p-power shortcut)."""
    k = 1
    b = a
    while not b.is_identity():
        b = compose(b, a)
        k += 1
    return k


def dlog(value: int, base: int, modulus: int) -> int:
    """Discrete log by linear scan."""
    x = 1
    for k in range(modulus):
        if x == value % modulus:
            return k
        x = x * base % modulus
    raise ValueError(f"{value} not in <{base}> mod {modulus}")


def random_word(rng: random.Random, g: int, length: int) -> Word:
    """Random word of at most `length` letters with exponents +-1 or +-2."""
    letters = tuple(
        (rng.randint(1, g), rng.choice([-2, -1, 1, 1, 2])) for _ in range(length)
    )
    return Word(letters)


def random_zero_sum_word(rng: random.Random, g: int, p: int, max_length: int = 12) -> Word:
    """Random nonidentity word with all exponent sums = 0 mod p, built from
    commutators of short words and p-th powers of generators."""
    while True:
        w = Word()
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.5 and g >= 2:
                u = random_word(rng, g, rng.randint(1, 2))
                v = random_word(rng, g, rng.randint(1, 2))
                w = w * word_commutator(u, v)
            else:
                w = w * Word.generator(rng.randint(1, g), p * rng.choice([1, -1]))
        if not w.is_identity() and w.length() <= max_length:
            return w


def random_presentation(rng: random.Random, p: int, max_gens: int = 2, max_relators: int = 2) -> Presentation:
    g = rng.randint(1, max_gens)
    relators = [random_zero_sum_word(rng, g, p) for _ in range(rng.randint(0, max_relators))]
    return Presentation(g, relators, p)


def random_word_of_depth(rng: random.Random, g: int, p: int, depth: int, tries: int = 200) -> Word:
    """Random word of exact Zassenhaus depth, by construct-and-verify."""
    for _ in range(tries):
        kind = rng.random()
        if depth == 2:
            if kind < 0.4 and g >= 2:
                i = rng.randint(1, g)
                j = rng.choice([x for x in range(1, g + 1) if x != i])
                w = word_commutator(Word.generator(i), Word.generator(j))
            elif kind < 0.7 and p == 2:
                w = Word.generator(rng.randint(1, g), 2 * rng.choice([1, -1]))
            elif g >= 2:
                u = random_word(rng, g, 2)
                v = random_word(rng, g, 2)
                w = word_commutator(u, v)
            else:
                continue
        else:  # depth 3
            if kind < 0.4 and p == 3:
                w = Word.generator(rng.randint(1, g), 3 * rng.choice([1, -1]))
            elif g >= 2:
                i = rng.randint(1, g)
                j = rng.choice([x for x in range(1, g + 1) if x != i])
                c = word_commutator(Word.generator(i), Word.generator(j))
                w = word_commutator(c, Word.generator(rng.randint(1, g)))
            else:
                continue
        if rng.random() < 0.3:
            # multiply by something strictly deeper; depth is unchanged
            deep = Word.generator(rng.randint(1, g), p ** 2 if p ** 2 > depth else p ** 3)
            w = w * deep if rng.random() < 0.5 else deep * w
        if not w.is_identity() and zassenhaus_depth(w, p, depth) == depth:
            return w
    raise RuntimeError(f"could not build a depth-{depth} word (g={g}, p={p})")

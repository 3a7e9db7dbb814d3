"""Deciding Massey-product predicates for finitely presented pro-p groups.

For a character tuple theta on G = F/R this module decides, by exhaustive
torsor search through the central series of the unipotent target:

  * the adjacent cup conditions (each consecutive pair lifts to the 3x3
    Heisenberg group),
  * "defined"   - theta lifts to U_{n+1}/center, and
  * "vanishing" - theta lifts to U_{n+1},

over Z/p^r for any r >= 1.  The search walks the refined central filtration
level by level.  At each level the canonical entrywise preimage is the only
obstruction test needed: relator values land in the central layer and are
unchanged by central re-choices (relator exponent sums vanish mod p), so a
level is solvable iff one evaluation vanishes, and all branching lives in
the torsor of solutions {lift * chi : chi in Hom(G, layer)}.  Children are
explored depth-first in lexicographic order of the adjustment vectors, so
the first witness found is canonical: it is the lexicographically least
complete lift, the same element a level-synchronous frontier scan would
report first.  For r = 1 the layers above the pinned near-diagonal have
total dimension n(n-1)/2.

Node budgets guard the exponential branching; exhausting one is a
first-class tri-state outcome, never a silent "false".  All states are
immutable and results are schedule-independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import product

from .linalg import kernel_vectors
from .presentation import Presentation, Word
from .unipotent import (
    UniMatrix,
    Unsupported,
    _index_of,
    apply_letters,
    enumerate_group,
    near_diagonal,
    reduce_mod_level,
)

#: Default cap on obstruction evaluations per tower search.
DEFAULT_NODE_BUDGET = 10_000_000

#: Counters for the always-on verdict invariants, for audit reporting.
INVARIANT_COUNTS = {"inclusion": 0, "b3_equals_c3": 0}


class Outcome(Enum):
    TRUE = "true"
    FALSE = "false"
    BUDGET = "budget"

    def __bool__(self):
        raise TypeError("Outcome is tri-state; compare explicitly")


class BudgetExceeded(Exception):
    """Internal signal: the node budget ran out mid-search."""


class CharTuple:
    """An n-tuple of F_p-characters of G, as a g x n value matrix.

    ``columns[j]`` lists the values of the (j+1)-st character on the
    generators.  Construction requires a presentation and rejects columns
    that fail to kill a relator (such a column is not a character of G).
    """

    __slots__ = ("p", "columns")

    def __init__(self, presentation: Presentation, columns):
        cols = tuple(tuple(v % presentation.p for v in col) for col in columns)
        if len(cols) < 2:
            raise ValueError(f"need arity n >= 2, got {len(cols)}")
        g = presentation.num_generators
        for j, col in enumerate(cols, start=1):
            if len(col) != g:
                raise ValueError(f"column {j} has {len(col)} values for {g} generators")
        p = presentation.p
        for j, col in enumerate(cols, start=1):
            for k, w in enumerate(presentation.relators, start=1):
                if sum(c * w.exponent_sum(i + 1) for i, c in enumerate(col)) % p:
                    raise ValueError(
                        f"character {j} does not kill relator {k} ({w}); "
                        "not a character of the presented group"
                    )
        self.p = p
        self.columns = cols

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def g(self) -> int:
        return len(self.columns[0])

    def rows(self) -> tuple[tuple[int, ...], ...]:
        """Generator-major view: row i is the near-diagonal of generator i."""
        return tuple(tuple(col[i] for col in self.columns) for i in range(self.g))

    def pair(self, presentation: Presentation, i: int) -> "CharTuple":
        """The adjacent sub-pair (chi_i, chi_{i+1}), 0-based i."""
        return CharTuple(presentation, self.columns[i : i + 2])

    def __eq__(self, other):
        if not isinstance(other, CharTuple):
            return NotImplemented
        return self.p == other.p and self.columns == other.columns

    def __hash__(self):
        return hash((self.p, self.columns))

    def __repr__(self):
        return f"CharTuple(p={self.p}, columns={self.columns})"


@dataclass(frozen=True)
class LiftState:
    """One node of the tower search: a homomorphism into the quotient
    determined through ``level`` (index into the level list), given by
    canonical-representative generator images; ``parent`` links the branch."""

    level: int
    images: tuple[UniMatrix, ...]
    parent: "LiftState | None" = None


@dataclass(frozen=True)
class LiftResult:
    outcome: Outcome
    witness: tuple[UniMatrix, ...] | None
    nodes: int
    level_nodes: tuple[int, ...]

    def to_json_dict(self) -> dict:
        out: dict = {"ok": self.outcome.value, "nodes": self.nodes}
        if self.witness is not None:
            out["witness"] = [m.to_json_dict() for m in self.witness]
        return out


@dataclass(frozen=True)
class Verdict:
    """The (C_n, B_n, A_n) decision triple for one character tuple."""

    cup_ok: tuple[Outcome, ...]
    defined: LiftResult
    vanishing: LiftResult
    nodes: int

    def to_json_dict(self) -> dict:
        return {
            "cup_ok": [o.value for o in self.cup_ok],
            "defined": self.defined.to_json_dict(),
            "vanishing": self.vanishing.to_json_dict(),
            "stats": {"nodes": self.nodes},
        }


def evaluate_word(images, w: Word) -> UniMatrix:
    """Substitute generator images into w and multiply."""
    return apply_letters(images, w.letters)


# -- homomorphisms G -> F_p from the exponent-sum matrix --------------------


def character_space(presentation: Presentation) -> list[tuple[int, ...]]:
    """All homomorphisms G -> F_p as value vectors on the generators, in
    lexicographic order: the kernel of the relator exponent-sum matrix."""
    g, p = presentation.num_generators, presentation.p
    rows = [
        [w.exponent_sum(i) % p for i in range(1, g + 1)] for w in presentation.relators
    ]
    try:
        return kernel_vectors(rows, g, p, cap=100_000)
    except ValueError as exc:
        raise Unsupported(str(exc)) from None


# -- the tower -------------------------------------------------------------


def _tower_levels(n: int, r: int, target: str) -> list[tuple[int, int]]:
    """Level sequence (congruence exponent j, distance k) of the refined
    central filtration, j-major; the quotient target omits the distance-n
    (center) layers."""
    if target not in ("full", "quotient"):
        raise ValueError(f"target must be 'full' or 'quotient', got {target!r}")
    top = n if target == "full" else n - 1
    return [(j, k) for j in range(r) for k in range(1, top + 1)]


class _Search:
    def __init__(self, presentation, theta, levels, r, budget):
        self.presentation = presentation
        self.theta = theta
        self.levels = levels
        self.r = r
        self.budget = budget
        self.nodes = 0
        self.level_nodes = [0] * len(levels)
        self.kernel = character_space(presentation)
        n = theta.n
        self.size = n + 1
        self.idx = _index_of(self.size)

    def root(self) -> tuple[UniMatrix, ...]:
        p = self.presentation.p
        images = []
        for row in self.theta.rows():
            ent = [0] * (self.size * (self.size - 1) // 2)
            for i, v in enumerate(row, start=1):
                ent[self.idx[(i, i + 1)]] = v
            images.append(UniMatrix(self.size, p, self.r, ent))
        return tuple(images)

    def run(self):
        final = self._extend(LiftState(0, self.root()))
        return None if final is None else final.images

    def _obstruction_vanishes(self, images, j: int, k: int) -> bool:
        p = self.presentation.p
        pj = p**j
        for w in self.presentation.relators:
            value = apply_letters(images, w.letters)
            for pos in range(1, self.size - k + 1):
                v = value.entry(pos, pos + k)
                if v % pj:
                    raise AssertionError(
                        "relator value escaped the central layer; solver invariant broken"
                    )
                if (v // pj) % p:
                    return False
        return True

    def _extend(self, state: LiftState):
        t = state.level
        if t == len(self.levels):
            return state
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded
        self.level_nodes[t] += 1
        j, k = self.levels[t]
        if not self._obstruction_vanishes(state.images, j, k):
            return None
        if t == 0:
            # near-diagonal mod p is pinned to theta: single child
            return self._extend(LiftState(1, state.images, state))
        d = self.size - k
        pj = self.presentation.p**j
        slots = [self.idx[(pos, pos + k)] for pos in range(1, d + 1)]
        for combo in product(self.kernel, repeat=d):
            child = self._adjust(state.images, slots, pj, combo)
            found = self._extend(LiftState(t + 1, child, state))
            if found is not None:
                return found
        return None

    def _adjust(self, images, slots, pj, combo):
        if all(not any(vec) for vec in combo):
            return images
        out = []
        for gi, m in enumerate(images):
            ent = list(m.entries)
            for slot, vec in zip(slots, combo):
                ent[slot] += pj * vec[gi]
            out.append(UniMatrix(self.size, m.p, m.r, ent))
        return tuple(out)


def lift_tower(
    presentation: Presentation,
    theta: CharTuple,
    target: str = "full",
    r: int = 1,
    node_budget: int | None = None,
) -> LiftResult:
    """Search for a lift of theta to U_{n+1}(Z/p^r) (``target='full'``) or
    to its quotient by the center (``target='quotient'``).

    Returns the canonical (lexicographically least) witness images on
    success.  Witness entries left undetermined by a quotient target are
    zero in the canonical representatives.  For r > 1 the near-diagonal of
    the witness reduces to theta mod p; for r = 1 it equals theta.
    """
    if theta.p != presentation.p:
        raise ValueError(f"theta is mod {theta.p} but presentation has p={presentation.p}")
    if theta.g != presentation.num_generators:
        raise ValueError(
            f"theta has {theta.g} generator rows for {presentation.num_generators} generators"
        )
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    budget = DEFAULT_NODE_BUDGET if node_budget is None else node_budget
    levels = _tower_levels(theta.n, r, target)
    search = _Search(presentation, theta, levels, r, budget)
    try:
        witness = search.run()
    except BudgetExceeded:
        return LiftResult(Outcome.BUDGET, None, search.nodes, tuple(search.level_nodes))
    if witness is None:
        return LiftResult(Outcome.FALSE, None, search.nodes, tuple(search.level_nodes))
    return LiftResult(Outcome.TRUE, witness, search.nodes, tuple(search.level_nodes))


def cup_condition(
    presentation: Presentation,
    theta: CharTuple,
    node_budget: int | None = None,
) -> tuple[Outcome, ...]:
    """Adjacent cup conditions: for each pair (chi_i, chi_{i+1}), whether the
    pair lifts to the 3x3 Heisenberg group over F_p."""
    out = []
    for i in range(theta.n - 1):
        res = lift_tower(presentation, theta.pair(presentation, i), "full", 1, node_budget)
        out.append(res.outcome)
    return tuple(out)


def _assert_chain(cup, defined, vanishing, n: int, r: int) -> None:
    if vanishing.outcome is Outcome.TRUE and defined.outcome is Outcome.FALSE:
        raise AssertionError("inclusion chain violated: vanishing without defined")
    if defined.outcome is Outcome.TRUE and Outcome.FALSE in cup:
        raise AssertionError("inclusion chain violated: defined without cup conditions")
    if defined.outcome is Outcome.FALSE and vanishing.outcome is Outcome.TRUE:
        raise AssertionError("inclusion chain violated: vanishing above undefined")
    INVARIANT_COUNTS["inclusion"] += 1
    if (
        r == 1
        and n == 3
        and defined.outcome is not Outcome.BUDGET
        and Outcome.BUDGET not in cup
    ):
        all_cup = all(o is Outcome.TRUE for o in cup)
        if (defined.outcome is Outcome.TRUE) != all_cup:
            raise AssertionError(
                "triple-product coincidence violated: defined and cup conditions disagree at n=3"
            )
        INVARIANT_COUNTS["b3_equals_c3"] += 1


def decide(
    presentation: Presentation,
    theta: CharTuple,
    r: int = 1,
    node_budget: int | None = None,
) -> Verdict:
    """Assemble the full verdict (cup conditions, defined, vanishing) and
    assert the inclusion chain vanishing => defined => cup."""
    cup = cup_condition(presentation, theta, node_budget)
    defined = lift_tower(presentation, theta, "quotient", r, node_budget)
    vanishing = lift_tower(presentation, theta, "full", r, node_budget)
    _assert_chain(cup, defined, vanishing, theta.n, r)
    return Verdict(cup, defined, vanishing, defined.nodes + vanishing.nodes)


@dataclass(frozen=True)
class StrongMasseyResult:
    outcome: Outcome  # TRUE = property holds, FALSE = counterexample found
    counterexample: CharTuple | None
    tuples_checked: int
    nodes: int

    def to_json_dict(self) -> dict:
        out = {
            "holds": self.outcome.value,
            "tuples_checked": self.tuples_checked,
            "nodes": self.nodes,
        }
        if self.counterexample is not None:
            out["counterexample"] = [list(c) for c in self.counterexample.columns]
        return out


def strong_massey_check(
    presentation: Presentation,
    n: int,
    r: int = 1,
    node_budget: int | None = None,
    enumeration_cap: int = 2_000_000,
) -> StrongMasseyResult:
    """Exhaustively test the strong n-fold Massey property.

    Enumerates every character n-tuple in lexicographic order; each tuple
    whose adjacent cup conditions all hold must have a vanishing product.
    The first failure (lexicographically least, hence deterministic) is
    returned as a counterexample.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    p, g = presentation.p, presentation.num_generators
    total = p ** (g * n)
    if total > enumeration_cap:
        return StrongMasseyResult(Outcome.BUDGET, None, 0, 0)
    nodes = 0
    checked = 0
    for flat in product(range(p), repeat=g * n):
        columns = [flat[j * g : (j + 1) * g] for j in range(n)]
        theta = CharTuple(presentation, columns)
        checked += 1
        cup = cup_condition(presentation, theta, node_budget)
        if Outcome.BUDGET in cup:
            return StrongMasseyResult(Outcome.BUDGET, theta, checked, nodes)
        if not all(o is Outcome.TRUE for o in cup):
            continue
        vanishing = lift_tower(presentation, theta, "full", r, node_budget)
        nodes += vanishing.nodes
        if vanishing.outcome is Outcome.BUDGET:
            return StrongMasseyResult(Outcome.BUDGET, theta, checked, nodes)
        if vanishing.outcome is Outcome.FALSE:
            return StrongMasseyResult(Outcome.FALSE, theta, checked, nodes)
    return StrongMasseyResult(Outcome.TRUE, None, checked, nodes)


# -- brute-force oracle and witness validation ------------------------------


def enumerate_lifts(
    presentation: Presentation,
    theta: CharTuple,
    target: str = "full",
    r: int = 1,
    cap: int = 2_000_000,
    distance_cap: int | None = None,
):
    """All lifts of theta into the target, by exhaustive enumeration.

    Independent of the tower search: every assignment of quotient elements
    to generators is tested against the relators and the near-diagonal
    condition.  ``distance_cap`` overrides the target quotient (canonical
    representatives of U/gamma_cap) for intermediate-level cross-checks.
    Returns a list of generator-image tuples.  Intentionally exponential;
    guarded by ``cap``.
    """
    n = theta.n
    size = n + 1
    p = presentation.p
    if distance_cap is None:
        distance_cap = size if target == "full" else n
    mod = p**r
    free_slots = sum(size - d for d in range(1, size) if d < distance_cap)
    per = mod**free_slots
    if per ** presentation.num_generators > cap:
        raise Unsupported(
            f"enumeration would visit {per ** presentation.num_generators} assignments (cap {cap})"
        )
    elements = list(enumerate_group(size, p, r, distance_cap=distance_cap))
    rows = theta.rows()
    candidate_images = []
    for row in rows:
        matches = [
            m for m in elements if tuple(v % p for v in near_diagonal(m)) == row
        ]
        candidate_images.append(matches)
    found = []
    for assignment in product(*candidate_images):
        ok = True
        for w in presentation.relators:
            value = apply_letters(assignment, w.letters)
            if not reduce_mod_level(value, distance_cap).is_identity():
                ok = False
                break
        if ok:
            found.append(tuple(assignment))
    return found


def validate_witness(
    presentation: Presentation,
    theta: CharTuple,
    witness,
    target: str = "full",
    r: int = 1,
) -> tuple[bool, list[str]]:
    """Re-validate emitted witness images: near-diagonal matches theta
    (mod p) and every relator evaluates to the identity in the target."""
    problems = []
    n = theta.n
    p = presentation.p
    if len(witness) != presentation.num_generators:
        return False, ["wrong number of generator images"]
    for i, (m, row) in enumerate(zip(witness, theta.rows()), start=1):
        if tuple(v % p for v in near_diagonal(m)) != row:
            problems.append(f"near-diagonal of generator {i} image does not match theta")
    cap = n + 1 if target == "full" else n
    for k, w in enumerate(presentation.relators, start=1):
        value = apply_letters(witness, w.letters)
        if not reduce_mod_level(value, cap).is_identity():
            problems.append(f"relator {k} ({w}) does not evaluate to the identity")
    return (not problems), problems

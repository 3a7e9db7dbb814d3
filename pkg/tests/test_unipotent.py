import math
import random

import pytest

from masseyq import (
    INFINITE_DEPTH,
    DimensionMismatch,
    FiltrationLevel,
    PlanInvalid,
    UniMatrix,
    Unsupported,
    abelian_plan,
    block_plan,
    commutator,
    compose,
    enumerate_group,
    exponent_by_enumeration,
    filtration_depth,
    group_exponent,
    near_diagonal,
    order,
    reduce_mod_level,
    sr_plan,
    trivial_plan,
)
from oracles import naive_order


def E(size, p, r, i, j, c=1):
    return UniMatrix.elementary(size, p, r, i, j, c)


def random_matrix(rng, size, p, r=1):
    mod = p**r
    count = size * (size - 1) // 2
    return UniMatrix(size, p, r, [rng.randrange(mod) for _ in range(count)])


class TestCompose:
    def test_identity_two_sided(self):
        rng = random.Random(0)
        for _ in range(20):
            m = random_matrix(rng, 4, 3)
            ident = UniMatrix.identity(4, 3)
            assert compose(ident, m) == m
            assert compose(m, ident) == m

    def test_elementary_product(self):
        # (I+E12)(I+E23) = I+E12+E23+E13 in U_4(F_3)
        got = compose(E(4, 3, 1, 1, 2), E(4, 3, 1, 2, 3))
        assert got.rows() == [[1, 1, 1, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]

    def test_inverse_by_back_substitution(self):
        rng = random.Random(1)
        for size, p, r in [(3, 2, 1), (4, 3, 1), (5, 5, 1), (4, 3, 2), (4, 2, 3)]:
            for _ in range(10):
                m = random_matrix(rng, size, p, r)
                assert compose(m, m.inverse()).is_identity()
                assert compose(m.inverse(), m).is_identity()

    def test_associativity_random(self):
        rng = random.Random(2)
        for _ in range(50):
            a, b, c = (random_matrix(rng, 5, 3) for _ in range(3))
            assert compose(compose(a, b), c) == compose(a, compose(b, c))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            compose(UniMatrix.identity(3, 3), UniMatrix.identity(4, 3))
        with pytest.raises(DimensionMismatch):
            compose(UniMatrix.identity(3, 3), UniMatrix.identity(3, 5))
        with pytest.raises(DimensionMismatch):
            compose(UniMatrix.identity(3, 3, 1), UniMatrix.identity(3, 3, 2))


class TestOrder:
    def test_identity(self):
        assert order(UniMatrix.identity(4, 3)) == 1

    def test_regular_unipotent_u4_f3(self):
        reg = UniMatrix.regular(4, 3)
        assert order(reg) == 9
        assert naive_order(reg) == 9

    def test_elementary(self):
        m = E(4, 3, 1, 1, 2)
        assert order(m) == 3
        assert naive_order(m) == 3

    def test_matches_naive_oracle(self):
        rng = random.Random(3)
        for size, p, r in [(3, 2, 1), (4, 3, 1), (3, 3, 2), (3, 2, 2)]:
            for _ in range(15):
                m = random_matrix(rng, size, p, r)
                assert order(m) == naive_order(m)


class TestNearDiagonal:
    def test_identity(self):
        assert near_diagonal(UniMatrix.identity(5, 3)) == (0, 0, 0, 0)

    def test_beyond_near_diagonal(self):
        assert near_diagonal(E(4, 3, 1, 1, 3)) == (0, 0, 0)

    def test_block_plan_matrix_values(self):
        # a one-block 4x4 plan with multipliers (l1, l2) has inertia image
        # near-diagonal (c, l1*c, l1*l2*c)
        p = 5
        for l1, l2, c in [(1, 1, 1), (2, 3, 1), (4, 2, 3)]:
            plan = block_plan(3, p, 0, c, [(l1, l2)], [(1, 3)], 11)
            want = (c % p, l1 * c % p, l1 * l2 * c % p)
            assert near_diagonal(plan.tau_image) == want

    def test_homomorphism(self):
        rng = random.Random(4)
        for _ in range(30):
            a = random_matrix(rng, 5, 3, 2)
            b = random_matrix(rng, 5, 3, 2)
            nd = near_diagonal(compose(a, b))
            want = tuple((x + y) % 9 for x, y in zip(near_diagonal(a), near_diagonal(b)))
            assert nd == want


class TestFiltrationDepth:
    def test_center_element(self):
        assert filtration_depth(E(5, 3, 1, 1, 5)) == 4

    def test_near_diagonal_element(self):
        assert filtration_depth(E(4, 3, 1, 2, 3)) == 1

    def test_identity_sentinel(self):
        assert filtration_depth(UniMatrix.identity(4, 3)) == INFINITE_DEPTH
        assert filtration_depth(UniMatrix.identity(4, 3)) == math.inf

    def test_commutator_of_elementaries(self):
        got = commutator(E(4, 3, 1, 1, 2), E(4, 3, 1, 2, 3))
        assert filtration_depth(got) == 2

    def test_commutator_depth_superadditive(self):
        rng = random.Random(5)
        for _ in range(60):
            a = random_matrix(rng, 5, 3)
            b = random_matrix(rng, 5, 3)
            da, db = filtration_depth(a), filtration_depth(b)
            assert filtration_depth(commutator(a, b)) >= min(da + db, INFINITE_DEPTH)

    def test_center_is_exactly_the_corner_line(self):
        # over F_p, depth >= n iff the matrix is I + c*E_{1,n+1}
        for m in enumerate_group(4, 3):
            deep = filtration_depth(m) >= 3
            corner_only = all(
                e == 0 for (i_, j_), e in zip(
                    [(i, j) for i in range(1, 4) for j in range(i + 1, 5)], m.entries
                ) if (i_, j_) != (1, 4)
            )
            assert deep == corner_only


class TestReduceModLevel:
    def test_full_quotient(self):
        rng = random.Random(6)
        for _ in range(10):
            m = random_matrix(rng, 4, 3)
            assert reduce_mod_level(m, 1).is_identity()

    def test_center_dies_in_quotient(self):
        assert reduce_mod_level(E(4, 3, 1, 1, 4), 3).is_identity()

    def test_mixed_entries(self):
        m = compose(E(4, 3, 1, 1, 2), E(4, 3, 1, 1, 4))
        assert reduce_mod_level(m, 3) == E(4, 3, 1, 1, 2)

    def test_bad_level(self):
        with pytest.raises(ValueError):
            reduce_mod_level(UniMatrix.identity(4, 3), 0)

    def test_refined_level_reduction(self):
        m = UniMatrix(3, 3, 2, [4, 5, 7])  # entries mod 9
        red = reduce_mod_level(m, FiltrationLevel(2, 0))
        # distance < 2 kept mod 3, distance >= 2 dropped mod 1
        assert red.entries == (1, 0, 1)
        red2 = reduce_mod_level(m, FiltrationLevel(2, 1))
        # distance < 2 kept mod 9, distance >= 2 mod 3
        assert red2.entries == (4, 2, 7)

    def test_refined_level_membership(self):
        # entries row-major for size 3: (1,2), (1,3), (2,3); distance-1
        # slots are (1,2) and (2,3), the corner (1,3) has distance 2
        lvl = FiltrationLevel(2, 1)
        assert lvl.contains(UniMatrix(3, 3, 2, [0, 3, 0]))
        assert not lvl.contains(UniMatrix(3, 3, 2, [0, 1, 0]))
        assert not lvl.contains(UniMatrix(3, 3, 2, [3, 3, 0]))

    def test_truncation_is_multiplicative_on_quotient(self):
        # canonical representatives multiply correctly in U/gamma_k
        rng = random.Random(7)
        for _ in range(40):
            a = random_matrix(rng, 5, 3)
            b = random_matrix(rng, 5, 3)
            k = rng.randint(1, 4)
            lhs = reduce_mod_level(compose(a, b), k)
            rhs = reduce_mod_level(
                compose(reduce_mod_level(a, k), reduce_mod_level(b, k)), k
            )
            assert lhs == rhs


class TestGroupExponent:
    def test_u2_f3_is_cyclic(self):
        assert group_exponent(1, 3, 1) == 3

    def test_u4_f3(self):
        assert group_exponent(3, 3, 1) == 9

    def test_closed_form_matches_enumeration(self):
        grid = [
            (1, 2, 1), (1, 3, 1), (1, 2, 2), (1, 3, 2),
            (2, 2, 1), (2, 3, 1), (2, 5, 1), (2, 2, 2), (2, 3, 2),
            (3, 2, 1), (3, 3, 1), (3, 2, 2),
        ]
        for n, p, r in grid:
            assert group_exponent(n, p, r) == exponent_by_enumeration(n, p, r), (n, p, r)

    def test_enumeration_cap(self):
        with pytest.raises(Unsupported):
            exponent_by_enumeration(6, 7, 2)


class TestPlans:
    def test_sr_trivial_inertia(self):
        plan = sr_plan(UniMatrix.identity(4, 3), 5)
        assert plan.tau_image.is_identity()
        assert plan.kind == "SR"

    def test_sr_order_condition(self):
        reg = UniMatrix.regular(4, 3)  # order 9
        plan = sr_plan(reg, 19)  # v_3(18) = 2
        assert plan.sigma_image.is_identity()
        with pytest.raises(PlanInvalid, match="v_3"):
            sr_plan(reg, 7)  # v_3(6) = 1

    def test_trivial_plan_any_prime(self):
        reg = UniMatrix.regular(4, 3)
        for q in (2, 5, 7, 11):
            plan = trivial_plan(reg, q)
            assert plan.tau_image.is_identity()

    def test_abelian_plan(self):
        x = UniMatrix.elementary(4, 3, 1, 1, 2)
        y = UniMatrix.elementary(4, 3, 1, 1, 3)
        plan = abelian_plan(x, y, 7)  # commuting, order(y) = 3 | 6
        assert plan.kind == "abelian"

    def test_abelian_rejects_noncommuting(self):
        x = UniMatrix.elementary(4, 3, 1, 1, 2)
        y = UniMatrix.elementary(4, 3, 1, 2, 3)
        with pytest.raises(PlanInvalid, match="commut"):
            abelian_plan(x, y, 7)

    def test_block_plan_zero_data(self):
        plan = block_plan(3, 5, 0, 0, [None], [(1, 3)], 11)
        assert plan.sigma_image.is_identity()
        assert plan.tau_image.is_identity()

    def test_block_plan_images_commute(self):
        rng = random.Random(8)
        for _ in range(20):
            a, b = rng.randrange(5), rng.randrange(5)
            plan = block_plan(3, 5, a, b, [(rng.randint(1, 4), rng.randint(1, 4))], [(1, 3)], 11)
            st = compose(plan.sigma_image, plan.tau_image)
            ts = compose(plan.tau_image, plan.sigma_image)
            assert st == ts

    def test_block_plan_requires_large_p(self):
        with pytest.raises(Unsupported):
            block_plan(3, 3, 1, 1, [(1, 1)], [(1, 3)], 7)

    def test_block_plan_requires_congruence(self):
        with pytest.raises(PlanInvalid, match="mod"):
            block_plan(3, 5, 1, 1, [(1, 2)], [(1, 3)], 7)  # 7 != 1 mod 5

    def test_block_plan_multi_block(self):
        # nonzero block on slots 1-2, zero block on slot 3
        plan = block_plan(3, 5, 1, 2, [(3,), None], [(1, 2), (3, 3)], 11)
        assert near_diagonal(plan.tau_image) == (2, 6 % 5, 0)
        assert order(plan.tau_image) == 5

    def test_every_plan_satisfies_tame_relation(self):
        rng = random.Random(9)
        for _ in range(30):
            y = random_matrix(rng, 3, 3)
            o = order(y)
            q = rng.choice([7, 13, 19, 31, 37])
            if (q - 1) % o == 0:
                plan = sr_plan(y, q)
                lhs = compose(compose(plan.sigma_image, plan.tau_image), plan.sigma_image.inverse())
                assert lhs == plan.tau_image**q


class TestSerialization:
    def test_round_trip(self):
        rng = random.Random(10)
        for _ in range(10):
            m = random_matrix(rng, 4, 3, 2)
            assert UniMatrix.from_json_dict(m.to_json_dict()) == m

    def test_from_rows_validates(self):
        with pytest.raises(ValueError):
            UniMatrix.from_rows([[1, 0], [1, 1]], 3)
        with pytest.raises(ValueError):
            UniMatrix.from_rows([[2, 0], [0, 1]], 3)


class TestImmutability:
    def test_setattr_blocked(self):
        m = UniMatrix.identity(3, 3)
        with pytest.raises(AttributeError):
            m.size = 5

    def test_hashable(self):
        s = {UniMatrix.identity(3, 3), UniMatrix.identity(3, 3)}
        assert len(s) == 1

import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from steinbench import fingroupoid as fg, groupkit as gk
from steinbench.errors import DomainError, MalformedInputError, SizeCapError
from steinbench.semiring import BOOLEAN, PrimeField, Rationals, is_congruence

R2 = fg.pair_groupoid(2)
Z2 = fg.group_groupoid(gk.cyclic_group(2))
R2_PT = fg.groupoid_from_name("R2 + pt")
R2_Z2 = fg.groupoid_from_name("R2 + Z2")
FAMILY = fg.test_family()


def el(G, *labels):
    return G.element({a: 1 for a in labels})


class TestGroupoid:
    def test_r2_shape(self):
        assert R2.arrows == ("11", "12", "21", "22")
        assert R2.units == ("11", "22")

    def test_json_roundtrip(self, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(json.dumps(R2_Z2.to_json()))
        G = fg.FiniteGroupoid.load(p)
        labelled = lambda H: {(H.arrows[a], H.arrows[b], H.arrows[c]) for (a, b), c in H.compose.items()}
        assert set(G.arrows) == set(R2_Z2.arrows) and set(G.units) == set(R2_Z2.units)
        assert labelled(G) == labelled(R2_Z2)

    def test_bad_composition_rejected(self):
        doc = R2.to_json()
        doc["compose"][0][2] = "12"
        with pytest.raises(MalformedInputError):
            fg.FiniteGroupoid.from_json(doc)

    def test_missing_inverse_rejected(self):
        doc = R2.to_json()
        doc["arrows"][0]["inv"] = "12"
        with pytest.raises(MalformedInputError):
            fg.FiniteGroupoid.from_json(doc)

    def test_name_parser(self):
        G = fg.groupoid_from_name("R3xZ3")
        assert len(G) == 27 and len(G.units) == 3
        with pytest.raises(MalformedInputError):
            fg.groupoid_from_name("Q7")

    def test_family_is_deterministic_and_large_enough(self):
        names = [G.name for G in FAMILY]
        assert names == [G.name for G in fg.test_family()]
        assert len(names) >= 12
        assert {"R2", "Z2", "pt + R2", "Z2 + R2"} <= set(names)


class TestConvolution:
    def test_basis_products(self):
        for G in (R2, R2_Z2):
            for a, b in itertools.product(G.arrows, repeat=2):
                prod = G.delta(a) * G.delta(b)
                ab = G.compose.get((G.index[a], G.index[b]))
                assert prod == (G.zero() if ab is None else G.delta(G.arrows[ab]))

    def test_units_idempotent(self):
        for u in R2.units:
            assert R2.delta(u) * R2.delta(u) == R2.delta(u)

    def test_r2_swap_squares_to_identity(self):
        x = el(R2, "12", "21")
        assert x * x == el(R2, "11", "22")

    def test_parent_mismatch(self):
        with pytest.raises(DomainError):
            R2.delta("11") * Z2.delta("1")


class TestInvolution:
    def test_examples(self):
        assert fg.involution(R2.delta("12")) == R2.delta("21")
        assert fg.involution(el(R2, "11", "22")) == el(R2, "11", "22")
        assert fg.involution(el(R2, "12", "11")) == el(R2, "21", "11")

    def test_reverses_products(self):
        elems = [R2.element(dict(zip(R2.arrows, bits)), PrimeField(3))
                 for bits in itertools.product(range(3), repeat=4)][::7]
        for f, g in itertools.product(elems, repeat=2):
            assert fg.involution(f * g) == fg.involution(g) * fg.involution(f)


class TestStructure:
    def test_r2(self):
        r = fg.structural_analysis(R2)
        assert r.orbits == [["11", "22"]]
        assert r.is_minimal and r.is_effective
        assert r.trivial_isotropy_units == ["11", "22"]

    def test_z2(self):
        r = fg.structural_analysis(Z2)
        assert r.is_minimal and not r.is_effective
        assert r.trivial_isotropy_units == []

    def test_r2_plus_point(self):
        r = fg.structural_analysis(R2_PT)
        assert len(r.orbits) == 2 and not r.is_minimal

    @pytest.mark.parametrize("G", FAMILY, ids=lambda G: G.name)
    def test_t_invariant(self, G):
        T = set(fg.structural_analysis(G).trivial_isotropy_units)
        for a in range(len(G)):
            if G.arrows[G.src[a]] in T:
                assert G.arrows[G.rng[a]] in T


class TestDecompose:
    def test_r2_is_full_matrix_algebra(self):
        dec = fg.decompose(R2)
        assert [b.size for b in dec.blocks] == [2] and len(dec.blocks[0].group) == 1
        assert dec.report["ok"]

    def test_z2(self):
        dec = fg.decompose(Z2)
        assert [(b.size, len(b.group)) for b in dec.blocks] == [(1, 2)]

    def test_r2_plus_point(self):
        dec = fg.decompose(R2_PT)
        assert sorted((b.size, len(b.group)) for b in dec.blocks) == [(1, 1), (2, 1)]

    @pytest.mark.parametrize("G", FAMILY, ids=lambda G: G.name)
    def test_family_verifies(self, G):
        assert fg.decompose(G).report["ok"]

    def test_image_is_multiplicative_on_sums(self):
        dec = fg.decompose(R2_Z2, PrimeField(3))
        f = R2_Z2.element({"a12": 1, "bg": 2, "a11": 1}, PrimeField(3))
        g = R2_Z2.element({"a21": 2, "bg": 1, "b1": 1}, PrimeField(3))
        assert dec.image(f * g) == tuple(x * y for x, y in zip(dec.image(f), dec.image(g)))


class TestRestriction:
    def test_drops_invariant_orbit(self):
        V = ["a11", "a22"]
        assert fg.restriction_hom(R2_PT, V, R2_PT.delta("bpt")).support == {"bpt"}
        assert fg.restriction_hom(R2_PT, V, R2_PT.delta("a12")).is_zero()

    def test_empty_v_is_identity(self):
        f = el(R2, "12", "22")
        assert fg.restriction_hom(R2, [], f) == f

    def test_non_invariant_rejected(self):
        with pytest.raises(DomainError):
            fg.restriction_hom(R2, ["11"], R2.delta("11"))

    def test_empty_complement_rejected(self):
        with pytest.raises(DomainError):
            fg.restriction_hom(R2, ["11", "22"], R2.delta("11"))

    def test_homomorphism(self):
        V = ["a11", "a22"]
        G = R2_Z2
        elems = [el(G, *c) for r in range(3) for c in itertools.combinations(G.arrows, r)]
        for f, g in itertools.product(elems[::3], repeat=2):
            lhs = fg.restriction_hom(G, V, f * g)
            rhs = fg.restriction_hom(G, V, f) * fg.restriction_hom(G, V, g)
            assert lhs == rhs


class TestUnitRepresentation:
    def test_arrow_maps_to_matrix_unit(self):
        M = fg.unit_representation(R2, R2.delta("12"))
        assert M.tolist() == [[False, True], [False, False]]

    def test_noneffective_collision(self):
        assert (fg.unit_representation(Z2, Z2.delta("g")) == fg.unit_representation(Z2, Z2.delta("1"))).all()

    def test_zero(self):
        assert not fg.unit_representation(R2, R2.zero()).any()

    def test_non_boolean_rejected(self):
        with pytest.raises(DomainError):
            fg.unit_representation(R2, R2.delta("11", PrimeField(2)))

    @pytest.mark.parametrize("G", FAMILY, ids=lambda G: G.name)
    def test_multiplicative_and_injectivity(self, G):
        psi = lambda f: fg.unit_representation(G, f)
        for a, b in itertools.product(G.arrows, repeat=2):
            assert (psi(G.delta(a) * G.delta(b)) == fg.boolean_matrix_product(psi(G.delta(a)), psi(G.delta(b)))).all()
        images = {psi(G.delta(a)).tobytes() for a in G.arrows}
        injective_on_basis = len(images) == len(G)
        assert injective_on_basis == fg.structural_analysis(G).is_effective


class TestIdeals:
    def test_unit_of_r2_is_full(self):
        assert fg.ideal_generated(R2, R2.delta("11")).is_full

    def test_point_of_r2_plus_point_is_proper(self):
        r = fg.ideal_generated(R2_PT, R2_PT.delta("bpt"))
        assert not r.is_full
        assert all(set(e.support) <= {"bpt"} for e in r.elements)

    def test_zero(self):
        r = fg.ideal_generated(R2, R2.zero())
        assert not r.is_full and [e.is_zero() for e in r.elements] == [True]

    def test_matches_naive_closure(self):
        # oracle: close {f} under + and left/right basis multiplication
        G = R2_PT
        f = el(G, "a12")
        seen = {f}
        todo = [f]
        while todo:
            x = todo.pop()
            new = [G.delta(a) * x for a in G.arrows] + [x * G.delta(a) for a in G.arrows] + [x + y for y in list(seen)]
            for y in new:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        got = set(fg.ideal_generated(G, f).elements)
        assert got - {G.zero()} == seen - {G.zero()}

    @pytest.mark.parametrize("G", FAMILY, ids=lambda G: G.name)
    def test_minimal_iff_units_generate(self, G):
        all_full = all(fg.ideal_generated(G, G.delta(u)).is_full for u in G.units)
        assert all_full == fg.structural_analysis(G).is_minimal


class TestEquivT:
    def test_r2_diagonal(self):
        part, _ = fg.equiv_T_congruence(R2)
        assert part.is_diagonal

    def test_z2_full(self):
        part, quotient = fg.equiv_T_congruence(Z2)
        assert part.is_full and len(quotient) == 1

    def test_r2_plus_z2_ignores_z2_component(self):
        part, quotient = fg.equiv_T_congruence(R2_Z2)
        alg = fg.materialize_groupoid_algebra(R2_Z2)
        assert is_congruence(alg, part.labels)
        assert len(quotient) == 16
        pos = {a: k for k, a in enumerate(R2_Z2.arrows)}

        def index(labels):
            v = np.zeros(len(R2_Z2), dtype=np.int64)
            v[[pos[a] for a in labels]] = 1
            return int(np.flatnonzero((alg.coeffs == v).all(axis=1))[0])

        assert part.same(index(["a12"]), index(["a12", "bg"]))
        assert part.same(index(["b1"]), index(["bg"]))
        assert not part.same(index(["a12"]), index(["a21"]))

    def test_cap(self):
        with pytest.raises(SizeCapError):
            fg.equiv_T_congruence(fg.groupoid_from_name("R3"), cap=100)


class TestSimplicity:
    @pytest.mark.parametrize("G, expected", [(R2, True), (Z2, False), (R2_PT, False), (R2_Z2, False)])
    def test_examples(self, G, expected):
        r = fg.simplicity_check(G, BOOLEAN)
        assert r.by_theorem is expected and r.by_bruteforce is expected

    def test_non_semifield_rejected(self):
        with pytest.raises(DomainError):
            fg.simplicity_check(R2, Rationals())


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FAMILY), st.data())
def test_convolution_associative_over_f3(G, data):
    F3 = PrimeField(3)
    coeffs = st.lists(st.integers(0, 2), min_size=len(G), max_size=len(G))
    f, g, h = (G.element(dict(zip(G.arrows, data.draw(coeffs))), F3) for _ in range(3))
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h

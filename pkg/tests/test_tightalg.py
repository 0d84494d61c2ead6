import random

import pytest
from hypothesis import given, settings, strategies as st

from steinbench import acceptance as acc
from steinbench import selfsim as ss
from steinbench import tightalg as ta
from steinbench.errors import DomainError, MalformedInputError

SYSTEMS = {"odometer": ss.odometer(), "grigorchuk": ss.grigorchuk(), "katsura": ss.katsura()}


def T(S, a, g, b):
    return ta.triple(S, a, g, b)


def X(S, text):
    return S.graph.parse_infinite(text)


class TestVerdict:
    def test_logic(self):
        assert (ta.TRUE & ta.UNKNOWN) is ta.UNKNOWN
        assert (ta.FALSE & ta.UNKNOWN) is ta.FALSE
        assert (ta.TRUE | ta.UNKNOWN) is ta.TRUE
        assert (ta.FALSE | ta.UNKNOWN) is ta.UNKNOWN

    def test_no_truthiness(self):
        with pytest.raises(TypeError):
            bool(ta.UNKNOWN)


class TestTriples:
    def test_invariant_enforced(self, katsura):
        with pytest.raises(DomainError):
            T(katsura, "e12", "", "e13")   # s(e12) = v2 but s(e13) = v3

    def test_json(self, grigorchuk):
        t = ta.triple_from_json(grigorchuk, {"alpha": ["e0"], "g": ["b"], "beta": ["v"]})
        assert t.to_json() == {"alpha": ["e0"], "g": ["b"], "beta": ["v"]}
        assert ta.triple_from_json(grigorchuk, None) is ta.ZERO
        with pytest.raises(MalformedInputError):
            ta.triple_from_json(grigorchuk, {"alpha": ["e0"]})

    def test_multiply_matching(self, grigorchuk):
        S = grigorchuk
        p = ta.triple_multiply(T(S, "e0", "a", "e1"), T(S, "e1", "b", "e0,e1"))
        assert ta.triple_equal(p, T(S, "e0", "a b", "e0,e1"))

    def test_multiply_extension(self, odometer):
        S = odometer
        assert ta.triple_multiply(T(S, "v", "a", "v"), T(S, "e0", "", "v")) == T(S, "e1", "", "v")

    def test_multiply_zero(self, odometer):
        S = odometer
        assert ta.triple_multiply(T(S, "v", "", "e0"), T(S, "e1", "", "v")) is ta.ZERO
        assert ta.triple_multiply(ta.ZERO, T(S, "v", "a", "v")) is ta.ZERO

    def test_star(self, odometer):
        S = odometer
        assert ta.triple_star(T(S, "e0", "a", "e1")) == T(S, "e1", "a^-1", "e0")
        u = T(S, "e1,e0", "", "e1,e0")
        assert ta.triple_star(u) == u
        assert ta.triple_star(ta.ZERO) is ta.ZERO

    def test_idempotents(self, grigorchuk):
        S = grigorchuk
        assert ta.is_idempotent(T(S, "e0,e1", "", "e0,e1"))
        assert ta.is_idempotent(T(S, "e0", "a a", "e0"))
        assert not ta.is_idempotent(T(S, "e0", "d", "e0"))   # d != 1 even though it fixes e0 paths
        assert ta.is_idempotent(ta.ZERO)


class TestGerms:
    def test_collapse_at_e0_tail(self, grigorchuk):
        S = grigorchuk
        assert ta.germ_equal(T(S, "v", "d", "v"), T(S, "v", "", "v"), X(S, "e0,(e1)*")) is ta.TRUE

    def test_distinct_at_e1_ray(self, grigorchuk):
        S = grigorchuk
        assert ta.germ_equal(T(S, "v", "d", "v"), T(S, "v", "", "v"), X(S, "e1*")) is ta.FALSE

    def test_reflexive(self, katsura):
        s = T(katsura, "e12", "g", "e12")
        assert ta.germ_equal(s, s, X(katsura, "e12,(e21,e12)*"), depth=0) is ta.TRUE

    def test_outside_domain(self, grigorchuk):
        S = grigorchuk
        assert ta.germ_equal(T(S, "v", "", "e0"), T(S, "v", "", "v"), X(S, "e1*")) is ta.FALSE

    def test_different_images(self, odometer):
        S = odometer
        assert ta.germ_equal(T(S, "v", "a", "v"), T(S, "v", "", "v"), X(S, "e0*")) is ta.FALSE


class TestOpenSets:
    def test_single_product(self, odometer):
        S = odometer
        x = ta.OpenSetElement.of(T(S, "v", "a", "v"))
        assert ta.open_product(x, x) == ta.OpenSetElement.of(T(S, "v", "a^2", "v"))

    def test_unit_cylinder_restricts(self, grigorchuk):
        S = grigorchuk
        x = ta.OpenSetElement.of(T(S, "v", "b", "v"))
        u = ta.OpenSetElement.of(T(S, "e0", "", "e0"))
        expected = ta.OpenSetElement.of(ta.BasicBisection.theta(T(S, "v", "b", "v"), S.graph.parse_path("e0")))
        assert ta.open_equal(x * u, expected).verdict is ta.TRUE

    def test_empty(self, grigorchuk):
        x = ta.OpenSetElement.of(T(grigorchuk, "v", "b", "v"))
        assert len(x * ta.OpenSetElement()) == 0

    def test_equal_reflexive(self, katsura):
        x = ta.OpenSetElement.of(T(katsura, "e12", "g", "e12"), T(katsura, "v3", "g^2", "v3"))
        assert ta.open_equal(x, x).verdict is ta.TRUE

    def test_cylinder_split(self, grigorchuk):
        S = grigorchuk
        d = T(S, "v", "d", "v")
        x = ta.OpenSetElement.of(d)
        y = ta.OpenSetElement.of(ta.BasicBisection.theta(d, S.graph.parse_path("e0")),
                                 ta.BasicBisection.theta(d, S.graph.parse_path("e1")))
        assert ta.open_equal(x, y).verdict is ta.TRUE

    def test_germ_collapse(self, grigorchuk):
        S = grigorchuk
        x = ta.OpenSetElement.of(ta.BasicBisection.theta(T(S, "v", "d", "v"), S.graph.parse_path("e0")))
        y = ta.OpenSetElement.of(T(S, "e0", "", "e0"))
        assert ta.open_equal(x, y).verdict is ta.TRUE

    def test_unequal_with_witness(self, grigorchuk):
        S = grigorchuk
        r = ta.open_equal(ta.OpenSetElement.of(T(S, "v", "d", "v")), ta.OpenSetElement.of(T(S, "v", "", "v")))
        assert r.verdict is ta.FALSE and r.witness is not None and not r.sampled_germs_agree

    def test_boolean_collapse_of_sums(self, grigorchuk):
        S = grigorchuk
        a, b = T(S, "e0", "b", "e1"), T(S, "v", "c", "v")
        assert ta.open_equal(ta.OpenSetElement.of(a) + ta.OpenSetElement.of(b) + ta.OpenSetElement.of(a),
                             ta.OpenSetElement.of(a, b), depth=0).verdict is ta.TRUE


class TestFixedPoints:
    def test_odometer(self, odometer):
        assert ta.fixed_and_trivially_fixed(T(odometer, "v", "a", "v"), X(odometer, "e1*")) == (ta.FALSE, ta.FALSE)

    def test_grigorchuk_trivially_fixed(self, grigorchuk):
        S = grigorchuk
        assert ta.fixed_and_trivially_fixed(T(S, "v", "d", "v"), X(S, "e0,(e1)*")) == (ta.TRUE, ta.TRUE)

    def test_grigorchuk_fixed_not_trivially(self, grigorchuk):
        S = grigorchuk
        assert ta.fixed_and_trivially_fixed(T(S, "v", "d", "v"), X(S, "e1*")) == (ta.TRUE, ta.FALSE)

    def test_outside_domain(self, grigorchuk):
        S = grigorchuk
        assert ta.fixed_and_trivially_fixed(T(S, "e0", "d", "e0"), X(S, "e1*")) == (ta.FALSE, ta.FALSE)


class TestConditionS:
    def test_odometer(self, odometer):
        r = ta.condition_S_sample([T(odometer, "v", "a", "v")], [X(odometer, "e1*"), X(odometer, "e0,(e1)*")])
        assert r.verdict is ta.TRUE and r.violations == []

    def test_grigorchuk_certificates(self, grigorchuk):
        S = grigorchuk
        r = ta.condition_S_sample([T(S, "v", "d", "v")], [X(S, "e1*")], depth=4)
        assert r.violations == []
        sample = r.to_json()["samples"][0]
        assert sample["in_F_minus_TF"] == "true"
        assert any("moved_subcylinder" in c for c in sample["non_containment"])

    def test_empty_list(self, grigorchuk):
        assert ta.condition_S_sample([], [X(grigorchuk, "e1*")]).verdict is ta.TRUE

    def test_idempotent_rejected(self, grigorchuk):
        with pytest.raises(DomainError):
            ta.condition_S_sample([T(grigorchuk, "e0", "", "e0")], [X(grigorchuk, "e1*")])


class TestOmega:
    def test_odometer_hypothesis_fails(self, odometer):
        r = ta.omega_faithful_probe(odometer, X(odometer, "e1*"), ["a"])
        assert r.hypothesis_met is ta.FALSE

    def test_grigorchuk_counterexample(self, grigorchuk):
        r = ta.omega_faithful_probe(grigorchuk, X(grigorchuk, "e1*"), ["b", "c", "d"])
        assert r.hypothesis_met is ta.TRUE
        assert r.verdict is ta.FALSE and r.counterexample_prefix is not None

    def test_empty_list(self, grigorchuk):
        r = ta.omega_faithful_probe(grigorchuk, X(grigorchuk, "e1*"), [])
        assert r.verdict is ta.TRUE

    def test_multi_vertex_rejected(self, katsura):
        with pytest.raises(DomainError):
            ta.omega_faithful_probe(katsura, X(katsura, "e11^0*"), ["g"])


class TestHausdorff:
    def test_odometer(self, odometer):
        r = ta.hausdorff_probe(odometer, 4, 10)
        assert set(r.counts.values()) == {0} and r.verdict is ta.TRUE

    def test_grigorchuk(self, grigorchuk):
        r = ta.hausdorff_probe(grigorchuk, 1, 7)
        assert r.counts["d"] == 3 and "d" in r.certificates and r.verdict is ta.FALSE

    def test_katsura(self, katsura):
        r = ta.hausdorff_probe(katsura, 1, 4)
        assert r.verdict is ta.FALSE and r.certificates


# -- properties -------------------------------------------------------------

@settings(max_examples=150, deadline=None)
@given(st.sampled_from(sorted(SYSTEMS)), st.integers(0, 2 ** 32))
def test_inverse_semigroup_laws(name, seed):
    S, rng = SYSTEMS[name], random.Random(seed)
    s = acc.random_triple(rng, S)
    t = acc.random_triple(rng, S, near=s.beta)
    m, star, eq = ta.triple_multiply, ta.triple_star, ta.triple_equal
    assert eq(m(m(s, star(s)), s), s)
    assert eq(m(m(star(s), s), star(s)), star(s))
    assert eq(star(m(s, t)), m(star(t), star(s)))
    r = acc.random_triple(rng, S, near=t.beta)
    assert eq(m(m(s, t), r), m(s, m(t, r)))


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(sorted(SYSTEMS)), st.integers(0, 2 ** 32))
def test_idempotents_are_diagonal_identity_triples(name, seed):
    S, rng = SYSTEMS[name], random.Random(seed)
    s = acc.random_triple(rng, S)
    diagonal = s.alpha == s.beta and ss.is_identity(s.g)
    assert ta.is_idempotent(s) == diagonal


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(SYSTEMS)), st.integers(0, 2 ** 32))
def test_product_matches_germ_oracle(name, seed):
    stats = acc.product_oracle_check(SYSTEMS[name], pairs=3, points=3, seed=seed)
    assert stats["mismatches"] == [] and stats["unknown"] == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(sorted(SYSTEMS)), st.integers(0, 2 ** 32))
def test_sliding_is_sound(name, seed):
    S, rng = SYSTEMS[name], random.Random(seed)
    t = acc.random_triple(rng, S)
    gamma = acc.random_extension(rng, S.graph, t.beta, rng.randint(0, 3))
    slid = ta.slide(t, gamma)
    for _ in range(3):
        eta = acc.random_point(rng, S.graph, gamma)
        assert ta.germ_equal(t, slid, eta) is ta.TRUE
        assert t.act(eta) == slid.act(eta)

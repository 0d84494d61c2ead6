import json

import pytest
from hypothesis import given, settings, strategies as st

from steinbench import selfsim as ss
from steinbench.errors import SteinbenchError, DomainError, FiniteStateCapError, MalformedInputError


def P(S, text):
    return S.graph.parse_path(text)


def X(S, text):
    return S.graph.parse_infinite(text)


class TestGraph:
    def test_source_free_required(self):
        with pytest.raises(MalformedInputError):
            ss.DirectedGraph(["v", "w"], [("e", "v", "w")])

    def test_path_composability(self, katsura):
        # e12 has range v1, source v2; e21 then continues from v2
        p = P(katsura, "e12,e21")
        assert katsura.graph.vertices[p.rng] == "v1" and katsura.graph.vertices[p.src] == "v1"
        with pytest.raises(SteinbenchError):
            P(katsura, "e12,e12")

    def test_paths_of_length_counts(self, grigorchuk, katsura):
        assert len(grigorchuk.graph.paths_of_length(5)) == 32
        # number of length-2 paths = sum of entries of A^2 (A counts source->range edges)
        A = ss.KATSURA_A
        n = len(A)
        total = sum(A[i][k] * A[k][j] for i in range(n) for j in range(n) for k in range(n))
        assert len(katsura.graph.paths_of_length(2)) == total

    def test_infinite_literal_normalizes(self, grigorchuk):
        assert X(grigorchuk, "e1,e1,(e1,e1)*") == X(grigorchuk, "e1*")
        assert str(X(grigorchuk, "e0,(e1)*")) == "e0,(e1)*"
        with pytest.raises(MalformedInputError):
            X(grigorchuk, "e0,()*")

    def test_system_json_roundtrip(self, grigorchuk, tmp_path):
        p = tmp_path / "g.json"
        p.write_text(json.dumps(grigorchuk.to_json()))
        S = ss.SelfSimilarSystem.load(p)
        assert ss.act_on_path(S.word("b"), P(S, "e0,e0")).ids == ["e0", "e1"]


class TestActOnPath:
    def test_odometer_examples(self, odometer):
        a = odometer.word("a")
        assert ss.act_on_path(a, P(odometer, "e0,e1")).ids == ["e1", "e1"]
        assert ss.act_on_path(a, P(odometer, "e1,e1,e0")).ids == ["e0", "e0", "e1"]

    def test_identity(self, katsura):
        p = P(katsura, "e12,e23,e33^0")
        assert ss.act_on_path(katsura.identity(), p) == p

    def test_vertex_path(self, katsura):
        v = katsura.graph.vertex_path("v2")
        assert ss.act_on_path(katsura.word("g"), v) == v


class TestCocycle:
    def test_examples(self, odometer, katsura):
        a = odometer.word("a")
        assert ss.equal(ss.cocycle(a, P(odometer, "e1,e1")), a)
        g = katsura.word("g")
        assert ss.equal(ss.cocycle(g, P(katsura, "e12")), g ** 2)
        assert ss.equal(ss.cocycle(g, katsura.graph.vertex_path("v1")), g)

    def test_grigorchuk_table(self, grigorchuk):
        S = grigorchuk
        table = {("b", "e0"): "a", ("b", "e1"): "c", ("c", "e0"): "a", ("c", "e1"): "d",
                 ("d", "e0"): "1", ("d", "e1"): "b", ("a", "e0"): "1", ("a", "e1"): "1"}
        for (g, e), sec in table.items():
            assert ss.equal(ss.cocycle(S.word(g), P(S, e)), S.word(sec))


class TestInfinite:
    def test_odometer_carry(self, odometer):
        assert ss.act_on_infinite(odometer.word("a"), X(odometer, "e1*")) == X(odometer, "e0*")

    def test_grigorchuk_d(self, grigorchuk):
        xi = X(grigorchuk, "e0,(e1)*")
        assert ss.act_on_infinite(grigorchuk.word("d"), xi) == xi

    def test_identity(self, katsura):
        xi = X(katsura, "e12,(e21,e12)*")
        assert ss.act_on_infinite(katsura.identity(), xi) == xi

    def test_katsura_growing_sections(self, katsura):
        # sections grow like g^(2^n) along this path but the image is still computed
        xi = X(katsura, "(e12,e21)*")
        out = ss.act_on_infinite(katsura.word("g"), xi)
        assert out == xi

    def test_prefix_consistency(self, grigorchuk):
        S = grigorchuk
        xi = X(S, "e0,e1,(e0,e1,e1)*")
        for w in ("a", "b", "a b c", "d a"):
            g = S.word(w)
            img = ss.act_on_infinite(g, xi)
            assert img.initial(12) == ss.act_on_path(g, xi.initial(12))


class TestEqual:
    def test_grigorchuk_relations(self, grigorchuk):
        S = grigorchuk
        one = S.identity()
        # build unreduced words so the relations are checked semantically
        for x in "abcd":
            assert ss.is_identity(ss.GroupElementWord(S, ((S.gindex[x], 2),)))
        assert ss.equal(S.word("b c"), S.word("d"))
        assert ss.equal(S.word("b c d"), one)
        assert not ss.equal(S.word("a"), S.word("b"))

    def test_order_reduction_in_canonical_form(self, grigorchuk):
        assert str(grigorchuk.word("b^-1")) == "b"
        assert str(grigorchuk.word("a^5")) == "a"

    def test_odometer_infinite_order(self, odometer):
        assert odometer.orders[0] == 0
        assert not ss.is_identity(odometer.word("a^64"))

    def test_state_cap(self):
        # (ab)^16 = 1 needs several section states; a tiny cap must raise, never answer
        S = ss.grigorchuk()
        with pytest.raises(FiniteStateCapError):
            ss.is_identity(S.word("a b " * 16), cap=2)
        assert ss.is_identity(ss.grigorchuk().word("a b " * 16))
        assert not ss.is_identity(ss.grigorchuk().word("a b " * 8))

    def test_fast_path_agrees_with_bisimulation(self):
        # b behaves like a but its sections are written in terms of a, so words in b
        # take the general threading path while words in a use exponent arithmetic
        graph = ss.DirectedGraph(["v"], [("e0", "v", "v"), ("e1", "v", "v")])
        a = ss.MealyGenerator("a", {}, {"e0": "e1", "e1": "e0"}, {"e0": [], "e1": ["a"]})
        b = ss.MealyGenerator("b", {}, {"e0": "e1", "e1": "e0"}, {"e0": [], "e1": ["a"]})
        S = ss.SelfSimilarSystem(graph, [a, b])
        assert 0 in S._cyclic and 1 not in S._cyclic
        for n in range(-9, 10):
            wa, wb = S.word(f"a^{n}") if n else S.identity(), S.word(f"b^{n}") if n else S.identity()
            assert ss.equal(wa, wb)
            for p in graph.paths_of_length(5):
                assert ss.act_on_path(wa, p) == ss.act_on_path(wb, p)
                assert ss.equal(ss.cocycle(wa, p), ss.cocycle(wb, p))


class TestStronglyFixed:
    def test_examples(self, grigorchuk):
        S = grigorchuk
        assert ss.strongly_fixed(S.word("d"), P(S, "e0"))
        assert not ss.strongly_fixed(S.word("b"), P(S, "e0"))
        assert ss.strongly_fixed(S.identity(), P(S, "e1,e0"))

    def test_minimal_d(self, grigorchuk):
        got = [p.ids for p in ss.minimal_strongly_fixed(grigorchuk.word("d"), 7)]
        assert got == [["e0"], ["e1"] * 3 + ["e0"], ["e1"] * 6 + ["e0"]]

    def test_minimal_matches_bruteforce(self, grigorchuk):
        S = grigorchuk
        for w in ("b", "c", "d", "a b a", "b a d a"):
            g = S.word(w)
            brute = []
            for n in range(1, 7):
                for p in S.graph.paths_of_length(n):
                    if ss.strongly_fixed(g, p) and not any(ss.strongly_fixed(g, p.prefix(k)) for k in range(1, n)):
                        brute.append(p)
            assert ss.minimal_strongly_fixed(g, 6) == brute

    def test_odometer_none(self, odometer):
        for j in range(1, 5):
            assert ss.minimal_strongly_fixed(odometer.word(f"a^{j}"), 10) == []

    def test_katsura_depth1(self, katsura):
        assert [p.ids for p in ss.minimal_strongly_fixed(katsura.word("g"), 1)] == [["e13"]]

    def test_identity_rejected(self, grigorchuk):
        with pytest.raises(DomainError):
            ss.minimal_strongly_fixed(grigorchuk.word("a a"), 3)


class TestBuiltins:
    def test_odometer(self, odometer):
        assert odometer.graph.vertices == ("v",) and len(odometer.graph.edges) == 2

    def test_katsura_examples(self, katsura):
        g = katsura.word("g")
        assert len(katsura.graph.edges) == 11
        assert ss.equal(ss.cocycle(g, P(katsura, "e23")), g ** 2)
        for i in "123":
            assert ss.act_on_path(g, P(katsura, f"e{i}{i}^0")).ids == [f"e{i}{i}^1"]

    @pytest.mark.parametrize("A, B", [
        ([[1, 0], [0, 1]], [[1, 1], [0, 1]]),     # a = 0 but b != 0
        ([[0, 0], [1, 1]], [[0, 0], [0, 0]]),     # zero row
        ([[1, -1], [1, 1]], [[0, 0], [0, 0]]),    # negative entry
    ])
    def test_katsura_validation(self, A, B):
        with pytest.raises(MalformedInputError):
            ss.builtin_system("katsura", {"A": A, "B": B})

    def test_unknown_builtin(self):
        with pytest.raises(MalformedInputError):
            ss.builtin_system("lamplighter")


def test_odometer_orders():
    S = ss.odometer()
    for k in range(1, 7):
        paths = S.graph.paths_of_length(k)
        fixes = lambda j: all(ss.act_on_path(S.word(f"a^{j}"), p) == p for p in paths)
        assert fixes(2 ** k)
        assert not any(fixes(j) for j in range(1, 2 ** k))


def test_katsura_closing_claim(katsura):
    g = katsura.word("g")
    e13 = katsura.graph.eindex["e13"]
    for n in range(1, 6):
        for p in katsura.graph.paths_of_length(n):
            if any(katsura.graph.src[e] == katsura.graph.rng[e] for e in p.edges):
                continue
            expected = katsura.identity() if e13 in p.edges else g ** (2 ** n)
            assert ss.equal(ss.cocycle(g, p), expected)


# -- properties -------------------------------------------------------------

SYSTEMS = {"odometer": ss.odometer(), "grigorchuk": ss.grigorchuk(), "katsura": ss.katsura()}


@st.composite
def word_and_path(draw, max_word=3, max_path=6):
    S = SYSTEMS[draw(st.sampled_from(sorted(SYSTEMS)))]
    letters = draw(st.lists(st.tuples(st.integers(0, len(S.generators) - 1), st.sampled_from([1, -1])),
                            max_size=max_word))
    n = draw(st.integers(0, max_path))
    v = draw(st.integers(0, len(S.graph.vertices) - 1))
    edges = []
    cur = v
    for _ in range(n):
        e = draw(st.sampled_from(S.graph.into[cur]))
        edges.append(e)
        cur = S.graph.src[e]
    path = S.graph.vertex_path(S.graph.vertices[v]) if not edges else ss.PathWord.from_indices(S.graph, edges)
    return S, ss.GroupElementWord(S, S.canon(tuple(letters))), path


@settings(max_examples=150, deadline=None)
@given(word_and_path())
def test_action_preserves_length(data):
    S, g, p = data
    assert len(ss.act_on_path(g, p)) == len(p)


@settings(max_examples=100, deadline=None)
@given(word_and_path(), st.data())
def test_cocycle_law(data, more):
    S, h, p = data
    letters = more.draw(st.lists(st.tuples(st.integers(0, len(S.generators) - 1), st.sampled_from([1, -1])),
                                 max_size=3))
    g = ss.GroupElementWord(S, S.canon(tuple(letters)))
    lhs = ss.cocycle(g * h, p)
    rhs = ss.cocycle(g, ss.act_on_path(h, p)) * ss.cocycle(h, p)
    assert ss.equal(lhs, rhs)


@settings(max_examples=100, deadline=None)
@given(word_and_path())
def test_inverse_undoes_action(data):
    S, g, p = data
    assert ss.act_on_path(g.inverse(), ss.act_on_path(g, p)) == p

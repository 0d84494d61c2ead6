"""The inverse semigroup of a self-similar graph, germs of its tight groupoid
and the Boolean Steinberg algebra as finite unions of basic bisections.

Anything quantified over all infinite paths is answered with a
:class:`TernaryVerdict`.  True and False always carry a certificate, and
Unknown only means an exploration budget ran out.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, MalformedInputError
from .selfsim import (EventuallyPeriodicPath, GroupElementWord, PathWord, SelfSimilarSystem,
                      act_and_cocycle, act_on_infinite, equal, is_identity, minimal_strongly_fixed,
                      prepend, section_orbit)

DEFAULT_DEPTH = 4


class TernaryVerdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    @classmethod
    def of(cls, flag: bool):
        return cls.TRUE if flag else cls.FALSE

    def __and__(self, other):
        if self is TernaryVerdict.FALSE or other is TernaryVerdict.FALSE:
            return TernaryVerdict.FALSE
        if self is TernaryVerdict.UNKNOWN or other is TernaryVerdict.UNKNOWN:
            return TernaryVerdict.UNKNOWN
        return TernaryVerdict.TRUE

    def __or__(self, other):
        if self is TernaryVerdict.TRUE or other is TernaryVerdict.TRUE:
            return TernaryVerdict.TRUE
        if self is TernaryVerdict.UNKNOWN or other is TernaryVerdict.UNKNOWN:
            return TernaryVerdict.UNKNOWN
        return TernaryVerdict.FALSE

    def __bool__(self):
        raise TypeError("a ternary verdict has no truth value; compare against TernaryVerdict members")

    def to_json(self):
        return self.value


TRUE, FALSE, UNKNOWN = TernaryVerdict.TRUE, TernaryVerdict.FALSE, TernaryVerdict.UNKNOWN


# ---------------------------------------------------------------------------
# Triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Triple:
    """(alpha, g, beta) with s(alpha) = g . s(beta), or the zero element (all fields None).

    Equality and hashing are syntactic; :func:`triple_equal` compares the
    group components semantically.
    """

    alpha: PathWord | None
    g: GroupElementWord | None
    beta: PathWord | None

    def __post_init__(self):
        if self.alpha is None:
            return
        S = self.g.system
        if self.alpha.graph is not S.graph or self.beta.graph is not S.graph:
            raise DomainError("triple components come from different systems")
        if self.alpha.src != S.vertex_image(self.g.letters, self.beta.src):
            raise DomainError(f"s(alpha) != g . s(beta) in ({self.alpha}, {self.g}, {self.beta})")

    @property
    def is_zero(self):
        return self.alpha is None

    @property
    def system(self):
        return None if self.is_zero else self.g.system

    def __str__(self):
        if self.is_zero:
            return "0"
        return f"({self.alpha}, {self.g}, {self.beta})"

    __repr__ = __str__

    def to_json(self):
        if self.is_zero:
            return None
        return {"alpha": self.alpha.to_json(), "g": self.g.to_json(), "beta": self.beta.to_json()}

    def act(self, xi: EventuallyPeriodicPath) -> EventuallyPeriodicPath:
        """(alpha, g, beta) . beta zeta = alpha (g . zeta); xi must lie in Z(beta)."""
        if self.is_zero or not xi.starts_with(self.beta):
            raise DomainError(f"{xi} is not in the domain of {self}")
        image = act_on_infinite(self.g, xi.tail_after(len(self.beta)))
        return prepend(self.alpha, image)


ZERO = Triple(None, None, None)


def triple(system: SelfSimilarSystem, alpha, g, beta) -> Triple:
    """Triple from literals: paths as edge-id lists or a vertex id, g as letters."""
    def path(p):
        if isinstance(p, PathWord):
            return p
        if isinstance(p, str):
            return system.graph.parse_path(p)
        p = list(p)
        if len(p) == 1 and p[0] in system.graph.vindex:
            return system.graph.vertex_path(p[0])
        return system.graph.path(p)
    return Triple(path(alpha), system.word(g), path(beta))


def idempotent(system: SelfSimilarSystem, path: PathWord) -> Triple:
    """The idempotent (gamma, 1, gamma)."""
    return Triple(path, system.identity(), path)


def triple_from_json(system: SelfSimilarSystem, doc) -> Triple:
    if doc is None:
        return ZERO
    if not isinstance(doc, dict) or not {"alpha", "g", "beta"} <= set(doc):
        raise MalformedInputError("triple needs alpha, g, beta")
    return triple(system, doc["alpha"], doc["g"], doc["beta"])


def triple_multiply(s: Triple, t: Triple) -> Triple:
    """(alpha, g, beta)(gamma, h, delta) by the three-case rule."""
    if s.is_zero or t.is_zero:
        return ZERO
    alpha, g, beta = s.alpha, s.g, s.beta
    gamma, h, delta = t.alpha, t.g, t.beta
    if beta.is_prefix_of(gamma):
        eps = gamma.suffix_after(len(beta))
        moved, sec = act_and_cocycle(g, eps)
        return Triple(alpha.concat(moved), sec * h, delta)
    if gamma.is_prefix_of(beta):
        eps = beta.suffix_after(len(gamma))
        hinv = h.inverse()
        moved, sec = act_and_cocycle(hinv, eps)
        return Triple(alpha, g * sec.inverse(), delta.concat(moved))
    return ZERO


def triple_star(t: Triple) -> Triple:
    if t.is_zero:
        return ZERO
    return Triple(t.beta, t.g.inverse(), t.alpha)


def triple_equal(s: Triple, t: Triple) -> bool:
    if s.is_zero or t.is_zero:
        return s.is_zero and t.is_zero
    return s.alpha == t.alpha and s.beta == t.beta and equal(s.g, t.g)


def is_idempotent(t: Triple) -> bool:
    """Whether t is of the form (gamma, 1, gamma) or zero."""
    return t.is_zero or (t.alpha == t.beta and is_identity(t.g))


# ---------------------------------------------------------------------------
# Germs
# ---------------------------------------------------------------------------

def _escape_bound(system, xi: EventuallyPeriodicPath):
    """For a one-generator system of infinite order with exponent arithmetic:
    along one period of xi a section exponent x maps to P x + err, |err| <= E.
    Returns (P, threshold) such that an exponent difference beyond the
    threshold grows forever and never vanishes inside a period; None if the
    certificate does not apply."""
    if len(system.generators) != 1 or system.orders.get(0) != 0:
        return None
    orb = system._eorb[0]
    sums = system._cyclic[0]
    ratio, bounds = [], []
    for e in xi.period.edges:
        c = orb.cycle_of[e]
        cyc, acc = orb.cycles[c], sums[c]
        L, C = len(cyc), acc[-1]
        r = Fraction(C, L)
        h = [acc[k] - k * r for k in range(L)]
        ratio.append(r)
        bounds.append(max(h) - min(h))
    # x_k after k edges: x_k = R_k x_0 + err_k with |err_k| <= E_k
    R, E = Fraction(1), Fraction(0)
    thresholds = []
    for r, b in zip(ratio, bounds):
        R, E = R * r, abs(r) * E + b
        if R == 0:
            return None
        thresholds.append(2 * E / abs(R))
    P = R
    if abs(P) <= 1:
        return None
    thresholds.append(2 * E / (abs(P) - 1))
    return P, max(thresholds)


def _exponent(letters):
    if not letters:
        return 0
    return letters[0][1] if len(letters) == 1 else None


def germ_equal(s: Triple, t: Triple, eta: EventuallyPeriodicPath, depth=DEFAULT_DEPTH, cap=None) -> TernaryVerdict:
    """Whether [s; eta] = [t; eta]: some prefix gamma of eta gives s u = t u for u = (gamma, 1, gamma).

    Certificates: True from such a gamma; False when the image paths of s u
    and t u disagree (then they disagree for every longer gamma), when the
    pair of sections along eta enters a cycle without ever coinciding, or
    when exponent differences provably diverge (one-generator systems of
    infinite order).  The walk along eta is limited to
    ``max(depth, |beta|) + |prefix| + (depth + 1) * |period|`` edges.
    """
    if s.is_zero or t.is_zero:
        return FALSE
    if not eta.starts_with(s.beta) or not eta.starts_with(t.beta):
        return FALSE
    if triple_equal(s, t):
        return TRUE
    if len(s.alpha) - len(s.beta) != len(t.alpha) - len(t.beta):
        return FALSE
    system = s.g.system
    L0 = max(len(s.beta), len(t.beta))
    ps, ws = system.thread(s.g.letters, [eta.edge_at(i) for i in range(len(s.beta), L0)])
    pt, wt = system.thread(t.g.letters, [eta.edge_at(i) for i in range(len(t.beta), L0)])
    if s.alpha.edges + ps != t.alpha.edges + pt or s.alpha.rng != t.alpha.rng:
        return FALSE
    pre, per = len(eta.prefix), len(eta.period)
    budget = max(depth, L0) + pre + (depth + 1) * per
    escape = _escape_bound(system, eta)
    seen = set()
    n = L0
    while True:
        if system.is_identity(ws + tuple((g, -k) for g, k in reversed(wt)), cap):
            return TRUE
        if n >= pre:
            phase = (n - pre) % per
            key = (ws, wt, phase)
            if key in seen:
                return FALSE
            seen.add(key)
            if escape is not None and phase == 0:
                xs, xt = _exponent(ws), _exponent(wt)
                if xs is not None and xt is not None and abs(xs - xt) > escape[1]:
                    return FALSE
        if n >= budget:
            return UNKNOWN
        e = eta.edge_at(n)
        fs, ws = system.on_edge(ws, e)
        ft, wt = system.on_edge(wt, e)
        if fs != ft:
            return FALSE
        n += 1


# ---------------------------------------------------------------------------
# Basic bisections and compact open sets
# ---------------------------------------------------------------------------

def slide(t: Triple, gamma: PathWord) -> Triple:
    """Normal form of Theta(alpha, g, beta; Z(gamma)) for gamma = beta eps:
    the triple (alpha (g . eps), phi(g, eps), gamma) = t (gamma, 1, gamma)."""
    if t.is_zero:
        return ZERO
    if not t.beta.is_prefix_of(gamma):
        raise DomainError(f"cylinder Z({gamma}) is not inside the domain Z({t.beta})")
    eps = gamma.suffix_after(len(t.beta))
    moved, sec = act_and_cocycle(t.g, eps)
    return Triple(t.alpha.concat(moved), sec, gamma)


@dataclass(frozen=True)
class BasicBisection:
    """Theta(t; Z(beta)) for a nonzero triple t = (alpha, g, beta)."""

    triple: Triple

    def __post_init__(self):
        if self.triple.is_zero:
            raise DomainError("zero has empty bisection; leave it out of the set")

    @classmethod
    def theta(cls, t: Triple, gamma: PathWord | None = None) -> "BasicBisection":
        return cls(t if gamma is None else slide(t, gamma))

    def __str__(self):
        return f"Theta{self.triple}"

    def to_json(self):
        return self.triple.to_json()


@dataclass(frozen=True)
class OpenSetElement:
    """Compact open set as a finite union of basic bisections (an element of A_B)."""

    members: frozenset = field(default_factory=frozenset)

    @classmethod
    def of(cls, *items) -> "OpenSetElement":
        out = set()
        for x in items:
            if isinstance(x, Triple):
                if not x.is_zero:
                    out.add(BasicBisection(x))
            else:
                out.add(x)
        return cls(frozenset(out))

    def __add__(self, other: "OpenSetElement") -> "OpenSetElement":
        return OpenSetElement(self.members | other.members)

    def __mul__(self, other):
        return open_product(self, other)

    def __len__(self):
        return len(self.members)

    def sorted_triples(self):
        return sorted((b.triple for b in self.members), key=lambda t: str(t))

    def to_json(self):
        return [t.to_json() for t in self.sorted_triples()]

    def __str__(self):
        return "{" + ", ".join(str(t) for t in self.sorted_triples()) + "}"


def open_from_json(system, doc) -> OpenSetElement:
    if not isinstance(doc, list):
        raise MalformedInputError("an open set is a list of triples")
    return OpenSetElement.of(*(triple_from_json(system, d) for d in doc))


def open_product(x: OpenSetElement, y: OpenSetElement, depth=DEFAULT_DEPTH) -> OpenSetElement:
    """UV for U, V unions of basic bisections.

    Theta(s) Theta(t) = Theta(st) for triples s, t, and the triple product
    already performs the cylinder refinement, so ``depth`` is not consumed.
    """
    out = set()
    for a in x.members:
        for b in y.members:
            p = triple_multiply(a.triple, b.triple)
            if not p.is_zero:
                out.add(BasicBisection(p))
    return OpenSetElement(frozenset(out))


def cycles_at(graph, v, max_len=3):
    """Primitive cycles through v (as periods with range v), shortest first."""
    out = []
    for n in range(1, max_len + 1):
        for p in graph.paths_of_length(n, v):
            if p.src == v:
                try:
                    xi = EventuallyPeriodicPath(PathWord(graph, (), v, v), p)
                except DomainError:
                    continue
                if len(xi.period) == n and not xi.prefix.edges:
                    out.append(p)
    return out


def sample_points(graph, gamma: PathWord, tails=2, cycle_len=3):
    """Eventually periodic points of Z(gamma): gamma followed by short cycles, possibly after one edge."""
    pts = []
    v = gamma.src
    for c in cycles_at(graph, v, cycle_len)[:tails]:
        pts.append(EventuallyPeriodicPath(gamma, c))
    for e in graph.into[v]:
        ge = gamma.extend(e)
        for c in cycles_at(graph, ge.src, cycle_len)[:1]:
            pts.append(EventuallyPeriodicPath(ge, c))
    seen, out = set(), []
    for p in pts:
        if str(p) not in seen:
            seen.add(str(p))
            out.append(p)
    return out


def _covered_by(s: Triple, gamma: PathWord, others):
    """Whether Theta(s; Z(gamma)) coincides with Theta(t; Z(gamma)) for some t."""
    su = slide(s, gamma)
    for t in others:
        if t.beta.is_prefix_of(gamma) and triple_equal(su, slide(t, gamma)):
            return True
    return False


def _contained(x: OpenSetElement, y: OpenSetElement, depth, report):
    """Certify Theta(s) within y for each s in x by splitting cylinders."""
    others = [b.triple for b in y.members]
    graph = None
    verdict = TRUE
    for b in sorted(x.members, key=lambda b: str(b.triple)):
        s = b.triple
        graph = s.beta.graph
        frontier = [s.beta]
        uncovered = []
        for level in range(depth + 1):
            nxt = []
            for gamma in frontier:
                if not _covered_by(s, gamma, others):
                    if level == depth:
                        uncovered.append(gamma)
                    else:
                        nxt.extend(gamma.extend(e) for e in graph.into[gamma.src])
            frontier = nxt
            if not frontier:
                break
        if not uncovered:
            continue
        # look for a germ of s that no member of y has
        for gamma in uncovered:
            for eta in sample_points(graph, gamma):
                verdicts = [germ_equal(s, t, eta, depth) for t in others if eta.starts_with(t.beta)]
                report["sampled"] += 1
                if all(v is FALSE for v in verdicts):
                    report["witness"] = {"bisection": s.to_json(), "eta": str(eta)}
                    return FALSE
                if any(v is UNKNOWN for v in verdicts):
                    report["unknown_samples"] += 1
        verdict = UNKNOWN
    return verdict


@dataclass
class OpenEqualReport:
    verdict: TernaryVerdict
    sampled_germs_agree: bool
    witness: dict | None = None
    sampled: int = 0

    def to_json(self):
        return {"verdict": self.verdict.to_json(), "sampled_germs_agree": self.sampled_germs_agree,
                "witness": self.witness, "sampled": self.sampled}


def open_equal(x: OpenSetElement, y: OpenSetElement, depth=DEFAULT_DEPTH) -> OpenEqualReport:
    """Set equality of two compact open sets.

    Containment x within y is certified by refining each cylinder of x up to
    ``depth`` extra edges until every piece coincides with a slid member of
    y.  Pieces left over are probed at eventually periodic points; a germ of
    x matched by no germ of y (all certified False) refutes equality.
    ``sampled_germs_agree`` records whether every probed germ was matched,
    i.e. whether the evidence is consistent with agreement on a dense set.
    """
    report = {"sampled": 0, "unknown_samples": 0, "witness": None}
    left = _contained(x, y, depth, report)
    right = FALSE if left is FALSE else _contained(y, x, depth, report)
    verdict = left & right
    return OpenEqualReport(verdict, report["witness"] is None, report["witness"], report["sampled"])


# ---------------------------------------------------------------------------
# Fixed points and Condition (S)
# ---------------------------------------------------------------------------

def vertex_idempotent(system: SelfSimilarSystem, v: int) -> Triple:
    return idempotent(system, system.graph.vertex_path(system.graph.vertices[v]))


def fixed_and_trivially_fixed(s: Triple, xi: EventuallyPeriodicPath, depth=DEFAULT_DEPTH, cap=None):
    """(xi in F_s, xi in TF_s).  xi in TF_s iff the germ of s at xi is the unit germ."""
    if s.is_zero or not xi.starts_with(s.beta):
        return FALSE, FALSE
    fixed = TernaryVerdict.of(s.act(xi) == xi)
    unit = vertex_idempotent(s.g.system, xi.rng)
    trivially = germ_equal(s, unit, xi, depth, cap)
    return fixed, trivially


def _cylinder_in_fixed_set(s: Triple, gamma: PathWord, cap=None):
    """Z(gamma) within F_s: s (gamma,1,gamma) = (gamma, h, gamma) with h trivial below s(gamma).
    Returns True, False (some point of Z(gamma) is moved) or None (undecided here)."""
    if not s.beta.is_prefix_of(gamma):
        return False if not gamma.is_prefix_of(s.beta) else None
    su = slide(s, gamma)
    if su.alpha != gamma:
        return False if len(su.alpha) == len(gamma) else None
    return True if su.g.system.is_trivial_at(su.g.letters, gamma.src, cap) else None


def _cylinder_in_union(elements, gamma, depth, cap=None):
    """Certify Z(gamma) within the union of the F_s by splitting up to ``depth`` levels."""
    graph = gamma.graph
    frontier = [gamma]
    for level in range(depth + 1):
        nxt = []
        for c in frontier:
            results = [_cylinder_in_fixed_set(s, c, cap) for s in elements]
            if any(r is True for r in results):
                continue
            if all(r is False for r in results):
                return False, c
            if level == depth:
                return None, c
            nxt.extend(c.extend(e) for e in graph.into[c.src])
        frontier = nxt
        if not frontier:
            return True, None
    return True, None


@dataclass
class ConditionSReport:
    verdict: TernaryVerdict
    violations: list
    samples: list

    def to_json(self):
        return {"verdict": self.verdict.to_json(), "violations": self.violations, "samples": self.samples}


def condition_S_sample(elements, samples, depth=DEFAULT_DEPTH, cap=None) -> ConditionSReport:
    """Search the samples for a point fixed nontrivially by every s_i that lies
    in the interior of the union of the F_{s_i} (a violation of Condition (S)).

    Interior membership is certified by a cylinder Z(gamma), gamma a prefix
    of the point with |gamma| <= depth, split into sub-cylinders each inside
    some F_{s_i}.  A True verdict only says no violation was found.
    """
    elements = list(elements)
    for s in elements:
        if s.is_zero or triple_equal(triple_multiply(s, s), s):
            raise DomainError(f"{s} is idempotent; Condition (S) concerns non-idempotents")
    rows, violations = [], []
    verdict = TRUE
    if not elements:
        return ConditionSReport(TRUE, [], [])
    for xi in samples:
        row = {"xi": str(xi)}
        pairs = [fixed_and_trivially_fixed(s, xi, depth, cap) for s in elements]
        row["F"] = [f.to_json() for f, _ in pairs]
        row["TF"] = [t.to_json() for _, t in pairs]
        membership = TRUE
        for f, t in pairs:
            membership = membership & f & (TRUE if t is FALSE else FALSE if t is TRUE else UNKNOWN)
        row["in_F_minus_TF"] = membership.to_json()
        if membership is FALSE:
            rows.append(row)
            continue
        if membership is UNKNOWN:
            verdict = verdict & UNKNOWN
            rows.append(row)
            continue
        certs = []
        for n in range(depth + 1):
            gamma = xi.initial(n)
            inside, where = _cylinder_in_union(elements, gamma, depth - n, cap)
            if inside is True:
                violations.append({"xi": str(xi), "cylinder": gamma.to_json()})
                verdict = FALSE
                break
            certs.append({"prefix": gamma.to_json(),
                          "moved_subcylinder" if inside is False else "undecided_subcylinder": where.to_json()})
        row["non_containment"] = certs
        rows.append(row)
    return ConditionSReport(verdict, violations, rows)


# ---------------------------------------------------------------------------
# Probes
# ---------------------------------------------------------------------------

def moved_by_all(system: SelfSimilarSystem, sections, v, max_depth, cap=None):
    """Search a path alpha with range v moved by every given element.

    Explores tuples of sections of the elements not yet moved; the search is
    exhaustive once no new tuple appears.  Returns (alpha or None, complete).
    """
    cap = cap or system.state_cap
    graph = system.graph
    start = tuple(sorted(set(w.letters if isinstance(w, GroupElementWord) else w for w in sections)))
    if any(system.vertex_image(w, v) != v for w in start):
        return PathWord(graph, (), v, v), True
    frontier = [((), v, start)]
    seen = {(v, start)}
    for _ in range(max_depth):
        nxt = []
        for path, u, rest in frontier:
            for e in graph.into[u]:
                remaining = []
                for w in rest:
                    f, sec = system.on_edge(w, e)
                    if f == e:
                        remaining.append(sec)
                if not remaining:
                    return PathWord.from_indices(graph, path + (e,)), True
                if any(system.is_identity(w, cap) for w in remaining):
                    continue  # an identity section is never moved below
                key = (graph.src[e], tuple(sorted(set(remaining))))
                if key in seen:
                    continue
                if len(seen) >= cap:
                    return None, False
                seen.add(key)
                nxt.append((path + (e,), key[0], key[1]))
        frontier = nxt
        if not frontier:
            return None, True
    return None, False


@dataclass
class OmegaReport:
    hypothesis_met: TernaryVerdict
    verdict: TernaryVerdict
    witness_m: int | None = None
    counterexample_prefix: list | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"hypothesis_met": self.hypothesis_met.to_json(), "verdict": self.verdict.to_json(),
                "witness_m": self.witness_m, "counterexample_prefix": self.counterexample_prefix,
                "notes": self.notes}


def omega_faithful_probe(system: SelfSimilarSystem, xi: EventuallyPeriodicPath, g_list, m_max=8,
                         alpha_depth=8, cap=None) -> OmegaReport:
    """Test the omega-faithfulness implication for one point and one finite family.

    Hypothesis: every g_i fixes every prefix gamma of xi with phi(g_i, gamma) != 1.
    Conclusion sought: some m such that for every prefix gamma with |gamma| >= m
    there is a single alpha moved by all phi(g_i, gamma).  ``verdict`` is True
    when the implication holds here (including a failed hypothesis) and False
    for a counterexample prefix that recurs forever along xi.
    """
    if len(system.graph.vertices) != 1:
        raise DomainError("omega-faithfulness concerns self-similar group actions (one vertex)")
    g_list = [system.word(g) for g in g_list]
    if not g_list:
        return OmegaReport(TRUE, TRUE, 0, None, ["empty family: vacuous"])
    orbits = []
    for g in g_list:
        secs, loop = section_orbit(g, xi, cap)
        orbits.append((secs, loop))
        for n, w in enumerate(secs):
            if is_identity(w, cap):
                return OmegaReport(FALSE, TRUE, None, None,
                                   [f"{g} has trivial section at prefix {xi.initial(n)}: hypothesis not met"])
            if n < len(secs) and system.on_edge(w.letters, xi.edge_at(n))[0] != xi.edge_at(n):
                return OmegaReport(FALSE, TRUE, None, None,
                                   [f"{g} moves prefix {xi.initial(n + 1)}: hypothesis not met"])
    # the joint state at prefix length n is determined by n (before the loop) or n mod the joint period
    starts = [loop for _, loop in orbits]
    periods = [len(secs) - loop for secs, loop in orbits]
    joint_start = max(starts)
    joint_period = 1
    for p in periods:
        joint_period = joint_period * p // _gcd(joint_period, p)

    def sections_at(n):
        out = []
        for secs, loop in orbits:
            k = n if n < len(secs) else loop + (n - loop) % (len(secs) - loop)
            out.append(secs[k])
        return out

    v = xi.rng
    good = {}
    complete = True
    for n in range(joint_start + joint_period):
        alpha, done = moved_by_all(system, sections_at(n), v, alpha_depth, cap)
        good[n] = alpha
        complete = complete and (alpha is not None or done)
        if alpha is None and n >= joint_start:
            if done:
                return OmegaReport(TRUE, FALSE, None, xi.initial(n).to_json(),
                                   [f"no path is moved by all sections at prefix length {n}; "
                                    f"this repeats every {joint_period} steps"])
    tail_ok = all(good[n] is not None for n in range(joint_start, joint_start + joint_period))
    if tail_ok:
        m = joint_start
        while m > 0 and good[m - 1] is not None:
            m -= 1
        if m <= m_max:
            return OmegaReport(TRUE, TRUE, m, None, [])
        return OmegaReport(TRUE, UNKNOWN, None, None, [f"smallest working m is {m} > m_max"])
    return OmegaReport(TRUE, UNKNOWN, None, None, ["alpha search exhausted its depth"])


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def word_ball(system: SelfSimilarSystem, radius):
    """Reduced words of length 1..radius over the generators and inverses, in a fixed order."""
    letters = [(i, s) for i in range(len(system.generators)) for s in (1, -1)]
    seen, out = set(), []
    for n in range(1, radius + 1):
        for combo in itertools.product(letters, repeat=n):
            w = system.word(tuple(combo))
            if w.letters and w.letters not in seen and sum(abs(k) for _, k in w.letters) == n:
                seen.add(w.letters)
                out.append(w)
    return out


def growth_certificate(g: GroupElementWord, msf, max_cycle, cap=None):
    """A cycle delta with g . delta = delta, phi(g, delta) = g and no trivial
    section along it, ending where some minimal strongly fixed mu starts.
    Then delta^k mu (k >= 0) are infinitely many minimal strongly fixed paths."""
    system = g.system
    graph = system.graph
    starts = {}
    for mu in msf:
        starts.setdefault(mu.rng, mu)
    for v, mu in sorted(starts.items()):
        frontier = [((), v, g.letters)]
        seen = {(v, g.letters)}
        for _ in range(max_cycle):
            nxt = []
            for path, u, w in frontier:
                for e in graph.into[u]:
                    f, sec = system.on_edge(w, e)
                    if f != e or system.is_identity(sec, cap):
                        continue
                    p = path + (e,)
                    if graph.src[e] == v and equal(GroupElementWord(system, sec), g, cap):
                        return PathWord.from_indices(graph, p), mu
                    if (graph.src[e], sec) not in seen:
                        seen.add((graph.src[e], sec))
                        nxt.append((p, graph.src[e], sec))
            frontier = nxt
    return None


@dataclass
class HausdorffReport:
    counts: dict
    certificates: dict
    verdict: TernaryVerdict

    def to_json(self):
        return {"counts": self.counts, "certificates": self.certificates, "verdict": self.verdict.to_json()}


def hausdorff_probe(system: SelfSimilarSystem, radius=1, depth=DEFAULT_DEPTH, cap=None) -> HausdorffReport:
    """Minimal strongly fixed paths per element of the word ball; False (non-Hausdorff
    evidence) when some element has a certified infinite family of them."""
    counts, certs = {}, {}
    verdict = TRUE
    for g in word_ball(system, radius):
        if is_identity(g, cap):
            continue
        msf = minimal_strongly_fixed(g, depth, cap)
        counts[str(g)] = len(msf)
        if msf:
            cert = growth_certificate(g, msf, depth + len(system.graph.vertices), cap)
            if cert is not None:
                delta, mu = cert
                certs[str(g)] = {"cycle": delta.to_json(), "tail": mu.to_json(),
                                 "family": "cycle^k tail, k >= 0"}
                verdict = FALSE
            elif verdict is TRUE:
                verdict = UNKNOWN
    return HausdorffReport(counts, certs, verdict)

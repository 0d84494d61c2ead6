"""Finite discrete groupoids and their convolution algebras.

Every subset of a finite discrete groupoid is open and compact, so the algebra
is free on the arrows: the basis vector of an arrow is the indicator of that
singleton bisection.  Arrows are addressed by label in the public API and by
position internally.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import groupkit
from .errors import DomainError, MalformedInputError, SizeCapError
from .groupkit import (FiniteGroupTable, GroupAlgebraElement, MatrixAlgebraElement,
                       materialize_convolution_algebra, matrix_multiply)
from .semiring import BOOLEAN, CongruencePartition, FiniteAlgebraTable, Semiring, is_congruence_simple

DEFAULT_ALGEBRA_CAP = 2 ** 12


class FiniteGroupoid:
    """Arrows with source/range/inverse and a partial composition.

    ``compose[(a, b)]`` is the product ``ab``, defined iff ``rng(b) == src(a)``
    (right-to-left: b first, then a).  Units are arrows themselves.
    """

    def __init__(self, arrows, src, rng, inv, compose, units, name=None):
        self.arrows = tuple(arrows)
        self.name = name
        self.index = {a: i for i, a in enumerate(self.arrows)}
        if len(self.index) != len(self.arrows):
            raise MalformedInputError("arrow labels must be distinct")
        unit_set = set(units)
        if not unit_set <= set(self.index):
            raise MalformedInputError("units must be arrows")
        self.units = tuple(a for a in self.arrows if a in unit_set)
        ix = self.index
        try:
            self.src = tuple(ix[src[a]] for a in self.arrows)
            self.rng = tuple(ix[rng[a]] for a in self.arrows)
            self.inv = tuple(ix[inv[a]] for a in self.arrows)
        except KeyError as exc:
            raise MalformedInputError(f"dangling arrow reference {exc}") from None
        self.compose = {}
        for (a, b), c in compose.items():
            if a not in ix or b not in ix or c not in ix:
                raise MalformedInputError(f"compose entry {(a, b, c)} names unknown arrows")
            self.compose[(ix[a], ix[b])] = ix[c]
        self._validate()

    def _validate(self):
        n = len(self.arrows)
        units = {self.index[u] for u in self.units}
        lab = self.arrows
        for u in units:
            if self.src[u] != u or self.rng[u] != u or self.inv[u] != u:
                raise MalformedInputError(f"unit {lab[u]} must be its own source, range and inverse")
        for a in range(n):
            if self.src[a] not in units or self.rng[a] not in units:
                raise MalformedInputError(f"arrow {lab[a]} has a non-unit endpoint")
            # units compose implicitly
            self.compose.setdefault((self.rng[a], a), a)
            self.compose.setdefault((a, self.src[a]), a)
        for a, b in list(self.compose):
            if self.rng[b] != self.src[a]:
                raise MalformedInputError(f"compose({lab[a]}, {lab[b]}) given but rng({lab[b]}) != src({lab[a]})")
        for a in range(n):
            for b in range(n):
                if self.rng[b] == self.src[a] and (a, b) not in self.compose:
                    raise MalformedInputError(f"composable pair ({lab[a]}, {lab[b]}) has no product")
        for (a, b), c in self.compose.items():
            if self.src[c] != self.src[b] or self.rng[c] != self.rng[a]:
                raise MalformedInputError(f"product {lab[a]}{lab[b]} = {lab[c]} has wrong endpoints")
        for a in range(n):
            i = self.inv[a]
            if self.compose.get((i, a)) != self.src[a] or self.compose.get((a, i)) != self.rng[a]:
                raise MalformedInputError(f"inverse of {lab[a]} is wrong")
        for (a, b), ab in self.compose.items():
            for c in range(n):
                if self.rng[c] == self.src[b]:
                    if self.compose[(ab, c)] != self.compose[(a, self.compose[(b, c)])]:
                        raise MalformedInputError(f"associativity fails at {(lab[a], lab[b], lab[c])}")

    def __len__(self):
        return len(self.arrows)

    def __repr__(self):
        return f"<FiniteGroupoid {self.name or ''} {len(self.units)} units, {len(self)} arrows>"

    def mul(self, a, b):
        """Product of arrow positions, or None when not composable."""
        return self.compose.get((a, b))

    @cached_property
    def unit_positions(self):
        return tuple(self.index[u] for u in self.units)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        lab = self.arrows
        comp = sorted([lab[a], lab[b], lab[c]] for (a, b), c in self.compose.items()
                      if a not in self.unit_positions and b not in self.unit_positions)
        return {
            "units": list(self.units),
            "arrows": [{"id": lab[a], "src": lab[self.src[a]], "rng": lab[self.rng[a]], "inv": lab[self.inv[a]]}
                       for a in range(len(lab)) if lab[a] not in self.units],
            "compose": comp,
        }

    @classmethod
    def from_json(cls, doc, name=None):
        if not isinstance(doc, dict) or "units" not in doc or "arrows" not in doc:
            raise MalformedInputError("groupoid file needs 'units' and 'arrows'")
        units = [str(u) for u in doc["units"]]
        arrows, src, rng, inv = list(units), {}, {}, {}
        for u in units:
            src[u] = rng[u] = inv[u] = u
        for k, entry in enumerate(doc["arrows"]):
            if not isinstance(entry, dict) or not {"id", "src", "rng", "inv"} <= set(entry):
                raise MalformedInputError(f"arrows[{k}] needs id, src, rng, inv")
            a = str(entry["id"])
            if a in units:
                continue
            arrows.append(a)
            src[a], rng[a], inv[a] = str(entry["src"]), str(entry["rng"]), str(entry["inv"])
        compose = {}
        for k, triple in enumerate(doc.get("compose", [])):
            if not isinstance(triple, (list, tuple)) or len(triple) != 3:
                raise MalformedInputError(f"compose[{k}] must be [a, b, ab]")
            a, b, c = (str(x) for x in triple)
            compose[(a, b)] = c
        return cls(arrows, src, rng, inv, compose, units, name=name)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_json(doc, name=str(path))

    # -- algebra elements --------------------------------------------------

    def element(self, coeffs, semiring=BOOLEAN):
        """Algebra element from {arrow label: coefficient}."""
        out = {}
        for a, c in coeffs.items():
            if a not in self.index:
                raise DomainError(f"unknown arrow {a!r}")
            out[self.index[a]] = c
        return GroupoidAlgebraElement(self, semiring, out)

    def delta(self, arrow, semiring=BOOLEAN):
        return self.element({arrow: semiring.one}, semiring)

    def zero(self, semiring=BOOLEAN):
        return GroupoidAlgebraElement(self, semiring, {})


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def orbit_groupoid(n, group=None, prefix=""):
    """R_n x G: arrows (i, j, g) from unit j to unit i; the transitive groupoid
    with n units and isotropy G."""
    group = group or groupkit.trivial_group()
    trivial = len(group) == 1

    def lab(i, j, g):
        base = f"{prefix}{i + 1}{j + 1}"
        return base if trivial else f"{base}:{group.label(g)}"

    arrows, src, rng, inv, compose = [], {}, {}, {}, {}
    units = [lab(i, i, group.identity) for i in range(n)]
    for i in range(n):
        for j in range(n):
            for g in group:
                a = lab(i, j, g)
                arrows.append(a)
                src[a], rng[a] = units[j], units[i]
                inv[a] = lab(j, i, group.inv(g))
    for i, j, k in itertools.product(range(n), repeat=3):
        for g in group:
            for h in group:
                compose[(lab(i, j, g), lab(j, k, h))] = lab(i, k, group.mul(g, h))
    name = f"R_{n}" if trivial else (group.name if n == 1 else f"R_{n}x{group.name}")
    return FiniteGroupoid(arrows, src, rng, inv, compose, units, name=name)


def pair_groupoid(n, prefix=""):
    return orbit_groupoid(n, None, prefix)


def group_groupoid(group, prefix=""):
    """A group as a one-object groupoid; arrow labels are ``prefix`` + element label."""
    arrows = [f"{prefix}{group.label(g)}" for g in group]
    unit = arrows[group.identity]
    src = {a: unit for a in arrows}
    inv = {arrows[g]: arrows[group.inv(g)] for g in group}
    compose = {(arrows[g], arrows[h]): arrows[group.mul(g, h)] for g in group for h in group}
    return FiniteGroupoid(arrows, src, dict(src), inv, compose, [unit], name=group.name)


def point_groupoid(label="pt"):
    return FiniteGroupoid([label], {label: label}, {label: label}, {label: label}, {}, [label], name=label)


def disjoint_union(*parts, name=None):
    arrows, src, rng, inv, compose, units = [], {}, {}, {}, {}, []
    for G in parts:
        lab = G.arrows
        for a in range(len(G)):
            if lab[a] in src:
                raise DomainError(f"arrow label {lab[a]!r} occurs in two components")
            arrows.append(lab[a])
            src[lab[a]], rng[lab[a]], inv[lab[a]] = lab[G.src[a]], lab[G.rng[a]], lab[G.inv[a]]
        units.extend(G.units)
        for (a, b), c in G.compose.items():
            compose[(lab[a], lab[b])] = lab[c]
    name = name or " + ".join(G.name or "?" for G in parts)
    return FiniteGroupoid(arrows, src, rng, inv, compose, units, name=name)


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------

class GroupoidAlgebraElement:
    """Finitely supported function arrows -> semiring (no zero coefficients stored)."""

    __slots__ = ("groupoid", "semiring", "coeffs")

    def __init__(self, groupoid, semiring, coeffs):
        self.groupoid = groupoid
        self.semiring = semiring
        clean = {}
        for a, c in coeffs.items():
            c = semiring.coerce(c)
            if not semiring.is_zero(c):
                clean[a] = c
        self.coeffs = clean

    def _check(self, other):
        if self.groupoid is not other.groupoid:
            raise DomainError("elements of different groupoid algebras")
        if self.semiring != other.semiring:
            raise DomainError("elements over different semirings")

    def __add__(self, other):
        self._check(other)
        S = self.semiring
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = S.add(out[a], c) if a in out else c
        return GroupoidAlgebraElement(self.groupoid, S, out)

    def __mul__(self, other):
        return convolve(self, other)

    def __eq__(self, other):
        if not isinstance(other, GroupoidAlgebraElement):
            return NotImplemented
        return self.groupoid is other.groupoid and self.semiring == other.semiring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    @property
    def support(self):
        return frozenset(self.groupoid.arrows[a] for a in self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def to_json(self):
        S, lab = self.semiring, self.groupoid.arrows
        return {lab[a]: S.label(c) for a, c in sorted(self.coeffs.items())}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        S, lab = self.semiring, self.groupoid.arrows
        return " + ".join(f"d_{lab[a]}" if c == S.one else f"{S.label(c)}*d_{lab[a]}"
                          for a, c in sorted(self.coeffs.items()))


def convolve(f: GroupoidAlgebraElement, g: GroupoidAlgebraElement) -> GroupoidAlgebraElement:
    """(f*g)(x) = sum over ab = x (rng(b) = src(a)) of f(a) g(b)."""
    f._check(g)
    G, S = f.groupoid, f.semiring
    out = {}
    for a, ca in f.coeffs.items():
        for b, cb in g.coeffs.items():
            x = G.compose.get((a, b))
            if x is None:
                continue
            p = S.mul(ca, cb)
            out[x] = S.add(out[x], p) if x in out else p
    return GroupoidAlgebraElement(G, S, out)


def involution(f: GroupoidAlgebraElement) -> GroupoidAlgebraElement:
    """f*(x) = f(x^-1)."""
    inv = f.groupoid.inv
    return GroupoidAlgebraElement(f.groupoid, f.semiring, {inv[a]: c for a, c in f.coeffs.items()})


# ---------------------------------------------------------------------------
# Structure
# ---------------------------------------------------------------------------

@dataclass
class StructureReport:
    orbits: list
    isotropy: dict          # base unit label -> FiniteGroupTable
    isotropy_arrows: dict   # unit label -> arrow labels with src = rng = unit
    trivial_isotropy_units: list
    is_minimal: bool
    is_effective: bool
    iso: list
    t_invariant: bool

    def to_json(self):
        return {
            "orbits": self.orbits,
            "isotropy": {u: list(v) for u, v in self.isotropy_arrows.items()},
            "T": self.trivial_isotropy_units,
            "is_minimal": self.is_minimal,
            "is_effective": self.is_effective,
            "iso": self.iso,
            "T_invariant": self.t_invariant,
        }


def orbits(G: FiniteGroupoid):
    """Units grouped by the relation u ~ v iff some arrow joins them (ordered by first unit)."""
    parent = {u: u for u in G.unit_positions}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in range(len(G)):
        ra, rb = find(G.src[a]), find(G.rng[a])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for u in G.unit_positions:
        groups.setdefault(find(u), []).append(u)
    return [v for _, v in sorted(groups.items())]


def isotropy_group(G: FiniteGroupoid, unit):
    """Isotropy at a unit position as (FiniteGroupTable, list of arrow positions)."""
    arrows = [a for a in range(len(G)) if G.src[a] == unit and G.rng[a] == unit]
    pos = {a: i for i, a in enumerate(arrows)}
    table = [[pos[G.compose[(a, b)]] for b in arrows] for a in arrows]
    labels = [G.arrows[a] for a in arrows]
    return FiniteGroupTable(labels, table, pos[unit], name=f"Iso({G.arrows[unit]})"), arrows


def structural_analysis(G: FiniteGroupoid) -> StructureReport:
    lab = G.arrows
    orbs = orbits(G)
    iso_arrows = {}
    for u in G.unit_positions:
        iso_arrows[lab[u]] = [lab[a] for a in range(len(G)) if G.src[a] == u and G.rng[a] == u]
    isotropy = {lab[orb[0]]: isotropy_group(G, orb[0])[0] for orb in orbs}
    T = [lab[u] for u in G.unit_positions if len(iso_arrows[lab[u]]) == 1]
    tset = {G.index[u] for u in T}
    t_invariant = all((G.src[a] in tset) == (G.rng[a] in tset) for a in range(len(G)))
    iso = [lab[a] for a in range(len(G)) if G.src[a] == G.rng[a]]
    return StructureReport(
        orbits=[[lab[u] for u in orb] for orb in orbs],
        isotropy=isotropy,
        isotropy_arrows=iso_arrows,
        trivial_isotropy_units=T,
        is_minimal=len(orbs) == 1,
        is_effective=len(iso) == len(G.units),
        iso=iso,
        t_invariant=t_invariant,
    )


# ---------------------------------------------------------------------------
# Matrix decomposition
# ---------------------------------------------------------------------------

@dataclass
class OrbitBlock:
    units: list             # unit positions, matrix index order
    group: FiniteGroupTable
    group_arrows: list      # arrow position of each group element
    transversal: dict       # unit position -> arrow from base unit to that unit

    @property
    def size(self):
        return len(self.units)


@dataclass
class Decomposition:
    groupoid: FiniteGroupoid
    semiring: Semiring
    blocks: list
    phi: dict               # arrow position -> (block index, MatrixAlgebraElement)
    report: dict = field(default_factory=dict)

    def image(self, f: GroupoidAlgebraElement):
        """Linear extension of phi: tuple of block matrices."""
        S = self.semiring
        out = [MatrixAlgebraElement.zero(b.group, S, b.size) for b in self.blocks]
        for a, c in f.coeffs.items():
            k, m = self.phi[a]
            scaled = MatrixAlgebraElement(m.group, S, [[GroupAlgebraElement(m.group, S, {g: S.mul(c, v) for g, v in e.coeffs.items()})
                                                          for e in row] for row in m.entries])
            out[k] = out[k] + scaled
        return tuple(out)

    def to_json(self):
        lab = self.groupoid.arrows
        return {
            "blocks": [{"n": b.size, "units": [lab[u] for u in b.units], "group": list(b.group.elements),
                        "transversal": {lab[u]: lab[a] for u, a in b.transversal.items()}} for b in self.blocks],
            "phi": {lab[a]: {"block": k, "matrix": m.to_json()} for a, (k, m) in sorted(self.phi.items())},
            "verification": self.report,
        }


def decompose(G: FiniteGroupoid, S=BOOLEAN) -> Decomposition:
    """Block-diagonal matrix form: arrow g maps to (t_r^-1 g t_s) E_{r(g), s(g)} in its orbit's block,
    t_v being the chosen arrow from the orbit's base unit to v."""
    S = groupkit._as_semiring(S)
    blocks = []
    where = {}
    for k, orb in enumerate(orbits(G)):
        base = orb[0]
        group, garrows = isotropy_group(G, base)
        transversal = {}
        for u in orb:
            transversal[u] = next(a for a in range(len(G)) if G.src[a] == base and G.rng[a] == u)
        blocks.append(OrbitBlock(orb, group, garrows, transversal))
        for i, u in enumerate(orb):
            where[u] = (k, i)
    phi = {}
    for a in range(len(G)):
        k, r = where[G.rng[a]]
        _, s = where[G.src[a]]
        b = blocks[k]
        t_r, t_s = b.transversal[G.rng[a]], b.transversal[G.src[a]]
        x = G.compose[(G.inv[t_r], G.compose[(a, t_s)])]
        g = b.group_arrows.index(x)
        phi[a] = (k, MatrixAlgebraElement.unit(b.group, S, b.size, r, s, g))
    dec = Decomposition(G, S, blocks, phi)
    dec.report = verify_decomposition(dec)
    return dec


def verify_decomposition(dec: Decomposition) -> dict:
    """Check phi is multiplicative on all basis pairs and bijective onto matrix units."""
    G = dec.groupoid
    failures = []
    pairs = 0
    for a in range(len(G)):
        ka, ma = dec.phi[a]
        for b in range(len(G)):
            kb, mb = dec.phi[b]
            pairs += 1
            ab = G.compose.get((a, b))
            if ka != kb:
                ok = ab is None
            else:
                prod = matrix_multiply(ma, mb)
                if ab is None:
                    ok = prod.is_zero()
                else:
                    kc, mc = dec.phi[ab]
                    ok = kc == ka and prod == mc
            if not ok:
                failures.append([G.arrows[a], G.arrows[b]])
    images = set()
    for a, (k, m) in dec.phi.items():
        nz = [(i, j, g) for i, row in enumerate(m.entries) for j, e in enumerate(row) for g in e.coeffs]
        images.add((k,) + tuple(nz))
    expected = sum(b.size ** 2 * len(b.group) for b in dec.blocks)
    bijective = len(images) == len(G) == expected
    return {"pairs_checked": pairs, "failures": failures, "homomorphism": not failures,
            "bijective": bijective, "ok": not failures and bijective}


# ---------------------------------------------------------------------------
# Restriction, unit representation, ideals
# ---------------------------------------------------------------------------

def is_invariant(G: FiniteGroupoid, unit_labels):
    V = {G.index[u] for u in unit_labels}
    return all((G.src[a] in V) == (G.rng[a] in V) for a in range(len(G)))


def restricted_groupoid(G: FiniteGroupoid, D):
    """G restricted to arrows with source and range in the unit set D (labels)."""
    cache = G.__dict__.setdefault("_restrictions", {})
    key = frozenset(D)
    if key not in cache:
        Dpos = {G.index[u] for u in D}
        keep = [a for a in range(len(G)) if G.src[a] in Dpos and G.rng[a] in Dpos]
        lab = G.arrows
        arrows = [lab[a] for a in keep]
        src = {lab[a]: lab[G.src[a]] for a in keep}
        rng = {lab[a]: lab[G.rng[a]] for a in keep}
        inv = {lab[a]: lab[G.inv[a]] for a in keep}
        kept = set(keep)
        compose = {(lab[a], lab[b]): lab[c] for (a, b), c in G.compose.items() if a in kept and b in kept}
        cache[key] = FiniteGroupoid(arrows, src, rng, inv, compose, [u for u in G.units if u in key],
                                    name=f"{G.name}|D")
    return cache[key]


def restriction_hom(G: FiniteGroupoid, V, f: GroupoidAlgebraElement) -> GroupoidAlgebraElement:
    """Restrict f to the groupoid over D = units minus the invariant set V."""
    V = set(V)
    unknown = V - set(G.units)
    if unknown:
        raise DomainError(f"not units: {sorted(unknown)}")
    if not is_invariant(G, V):
        raise DomainError("unit set is not invariant")
    D = [u for u in G.units if u not in V]
    if not D:
        raise DomainError("complement of V is empty")
    if not V:
        return f
    H = restricted_groupoid(G, D)
    lab = G.arrows
    return GroupoidAlgebraElement(H, f.semiring, {H.index[lab[a]]: c for a, c in f.coeffs.items()
                                                  if lab[a] in H.index})


def unit_representation(G: FiniteGroupoid, f: GroupoidAlgebraElement):
    """Boolean unit-indexed matrix with M[r(a), s(a)] = 1 for every arrow a in the support."""
    if not f.semiring.is_boolean:
        raise DomainError("unit representation needs Boolean coefficients")
    pos = {u: i for i, u in enumerate(G.unit_positions)}
    M = np.zeros((len(pos), len(pos)), dtype=bool)
    for a in f.coeffs:
        M[pos[G.rng[a]], pos[G.src[a]]] = True
    return M


def boolean_matrix_product(A, B):
    return (A.astype(np.int64) @ B.astype(np.int64)) > 0


@dataclass
class IdealReport:
    generators: list
    elements: list
    is_full: bool


def ideal_generated(G: FiniteGroupoid, f: GroupoidAlgebraElement, max_elements=2 ** 16) -> IdealReport:
    """Two-sided ideal of A_B(G) generated by f.

    Over B the ideal is the set of unions of the sets a f b (a, b arrows);
    f itself is such a union since the units sum to the identity.
    """
    if not f.semiring.is_boolean:
        raise DomainError("ideal enumeration needs Boolean coefficients")
    n = len(G)
    support = list(f.coeffs)
    gens = set()
    for a in range(n):
        for b in range(n):
            prod = set()
            for x in support:
                ax = G.compose.get((a, x))
                if ax is None:
                    continue
                axb = G.compose.get((ax, b))
                if axb is not None:
                    prod.add(axb)
            if prod:
                gens.add(frozenset(prod))
    gens = sorted(gens, key=lambda s: (len(s), sorted(s)))
    singletons = {next(iter(g)) for g in gens if len(g) == 1}
    is_full = len(singletons) == n
    elements = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                u = e | g
                if u not in elements:
                    elements.add(u)
                    nxt.append(u)
                    if len(elements) > max_elements:
                        raise SizeCapError(f"ideal exceeds {max_elements} elements", cap=max_elements)
        frontier = nxt
    as_elems = [GroupoidAlgebraElement(G, BOOLEAN, {a: 1 for a in e})
                for e in sorted(elements, key=lambda s: (len(s), sorted(s)))]
    gen_elems = [GroupoidAlgebraElement(G, BOOLEAN, {a: 1 for a in g}) for g in gens]
    return IdealReport(gen_elems, as_elems, is_full)


# ---------------------------------------------------------------------------
# Materialization, the T-congruence and the simplicity cross-check
# ---------------------------------------------------------------------------

def _coeff_table(S):
    if isinstance(S, FiniteAlgebraTable):
        return S
    return S.table()


def materialize_groupoid_algebra(G: FiniteGroupoid, S=BOOLEAN, cap=DEFAULT_ALGEBRA_CAP):
    table = _coeff_table(S)
    return materialize_convolution_algebra(table, G.arrows, dict(G.compose), unit_basis=G.unit_positions,
                                           cap=cap, name=f"A_{table.name}({G.name})")


def equiv_T_congruence(G: FiniteGroupoid, S=BOOLEAN, cap=DEFAULT_ALGEBRA_CAP):
    """Identify f, g when they agree on every arrow with source and range in T
    (the units with trivial isotropy).  Returns (partition, quotient table)."""
    alg = materialize_groupoid_algebra(G, S, cap)
    T = {G.index[u] for u in structural_analysis(G).trivial_isotropy_units}
    cols = [a for a in range(len(G)) if G.src[a] in T and G.rng[a] in T]
    keys = alg.coeffs[:, cols] if cols else np.zeros((len(alg), 0), dtype=np.int64)
    _, labels = np.unique(keys, axis=0, return_inverse=True)
    part = CongruencePartition(alg, labels.ravel())
    if not part.is_congruence():
        raise DomainError("T-agreement relation failed the congruence check")
    return part, part.quotient()


def semifield_kind(S):
    """'boolean', 'field' or None for a finite coefficient semiring."""
    if isinstance(S, Semiring):
        if S.is_boolean:
            return "boolean"
        if S.is_field:
            return "field"
        if S.elements is None:
            return None
        S = S.table()
    table = S
    n = len(table)
    if table.one is None:
        return None
    nonzero = [x for x in range(n) if x != table.zero]
    invertible = all((table.mul[x, nonzero] == table.one).any() for x in nonzero)
    if not invertible:
        return None
    if all((table.add[x] == table.zero).any() for x in range(n)):
        return "field"
    if n == 2:
        return "boolean"
    return None


@dataclass
class SimplicityReport:
    groupoid: str
    semiring: str
    is_minimal: bool
    is_effective: bool
    by_theorem: bool
    by_bruteforce: bool
    algebra_size: int

    @property
    def agree(self):
        return self.by_theorem == self.by_bruteforce

    def to_json(self):
        return {"groupoid": self.groupoid, "semiring": self.semiring, "is_minimal": self.is_minimal,
                "is_effective": self.is_effective, "by_theorem": self.by_theorem,
                "by_bruteforce": self.by_bruteforce, "agree": self.agree, "algebra_size": self.algebra_size}


def simplicity_check(G: FiniteGroupoid, S=BOOLEAN, cap=DEFAULT_ALGEBRA_CAP) -> SimplicityReport:
    kind = semifield_kind(S)
    if kind is None:
        raise DomainError("simplicity check needs the Boolean semifield or a finite field")
    info = structural_analysis(G)
    alg = materialize_groupoid_algebra(G, S, cap)
    brute = is_congruence_simple(alg)
    name = S.name if isinstance(S, Semiring) else (S.name or "S")
    return SimplicityReport(G.name or "G", name, info.is_minimal, info.is_effective,
                            info.is_minimal and info.is_effective, brute, len(alg))


# ---------------------------------------------------------------------------
# Deterministic test family
# ---------------------------------------------------------------------------

ORBIT_SIZES = (1, 2, 3)
ISOTROPY = ("1", "Z2", "Z3", "S3")
ISOTROPY_ORDER = {"1": 1, "Z2": 2, "Z3": 3, "S3": 6}


def _component(n, iso, tag):
    group = {"1": None, "Z2": groupkit.cyclic_group(2), "Z3": groupkit.cyclic_group(3),
             "S3": groupkit.symmetric_group(3)}[iso]
    if n == 1 and group is None:
        return point_groupoid(f"{tag}pt")
    if n == 1:
        return group_groupoid(group, prefix=f"{tag}")
    return orbit_groupoid(n, group, prefix=tag)


def component_specs():
    return [(n, iso) for n in ORBIT_SIZES for iso in ISOTROPY]


def test_family(max_arrows=9, max_components=2, isotropy=ISOTROPY):
    """All groupoids with 1..max_components orbits (sizes <= 3, isotropy among
    ``isotropy``) and at most ``max_arrows`` arrows (None = no limit), in a fixed order."""
    specs = [s for s in component_specs() if s[1] in isotropy]
    size = {s: s[0] ** 2 * ISOTROPY_ORDER[s[1]] for s in specs}
    out = []
    for k in range(1, max_components + 1):
        for combo in itertools.combinations_with_replacement(specs, k):
            if max_arrows is not None and sum(size[s] for s in combo) > max_arrows:
                continue
            name = " + ".join(_spec_name(s) for s in combo)
            if k == 1:
                G = _component(*combo[0], "")
                G.name = name
            else:
                G = disjoint_union(*(_component(n, iso, chr(ord("a") + i)) for i, (n, iso) in enumerate(combo)),
                                   name=name)
            out.append(G)
    return out


def _spec_name(spec):
    n, iso = spec
    if n == 1:
        return "pt" if iso == "1" else iso
    return f"R{n}" if iso == "1" else f"R{n}x{iso}"


def groupoid_from_name(text):
    """Groupoid from a name like ``R2``, ``Z2``, ``R3xZ3`` or ``R2 + pt`` (components joined by +)."""
    parts = [p.strip() for p in text.split("+") if p.strip()]
    if not parts:
        raise MalformedInputError(f"empty groupoid name {text!r}")
    specs = []
    for p in parts:
        if p == "pt":
            specs.append((1, "1"))
            continue
        n, iso = 1, "1"
        head, _, tail = p.partition("x")
        if head.startswith("R") and head[1:].isdigit():
            n = int(head[1:])
            iso = tail or "1"
        elif not tail:
            iso = head
        else:
            raise MalformedInputError(f"bad groupoid component {p!r}")
        if iso not in ISOTROPY_ORDER or n < 1:
            raise MalformedInputError(f"bad groupoid component {p!r}; isotropy must be one of {list(ISOTROPY_ORDER)}")
        specs.append((n, iso))
    name = " + ".join(_spec_name(s) for s in specs)
    if len(specs) == 1:
        G = _component(*specs[0], "")
        G.name = name
        return G
    return disjoint_union(*(_component(n, iso, chr(ord("a") + i)) for i, (n, iso) in enumerate(specs)), name=name)

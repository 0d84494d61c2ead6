"""Self-similar graphs: finite sourceless graphs acted on by finite-state groups.

Conventions:

* Paths are read right to left: ``alpha = e1 e2 ... en`` is composable when
  ``r(e_{k+1}) = s(e_k)``.  So ``r(alpha) = r(e1)`` and ``s(alpha) = s(en)``, and a
  path is extended on its source side (to the right).
* A group element acts on a path by threading from ``e1``: apply the current
  element to the edge, then replace it by its section at that edge.
* Group elements are reduced words over the generators, stored as tuples of
  ``(generator index, nonzero exponent)``.  Two words are compared
  semantically with :func:`equal`; ``==`` on words is only syntactic.
"""
from __future__ import annotations

import json
import math
import re
from collections import deque
from dataclasses import dataclass

from .errors import DomainError, FiniteStateCapError, MalformedInputError

DEFAULT_STATE_CAP = 4096
SMALL_ORDER_PROBE = 6


# ---------------------------------------------------------------------------
# Graphs and paths
# ---------------------------------------------------------------------------

class DirectedGraph:
    """Finite graph without sources (every vertex is the range of some edge)."""

    def __init__(self, vertices, edges):
        self.vertices = tuple(str(v) for v in vertices)
        self.vindex = {v: i for i, v in enumerate(self.vertices)}
        if len(self.vindex) != len(self.vertices):
            raise MalformedInputError("vertex ids must be distinct")
        ids, src, rng = [], [], []
        for k, e in enumerate(edges):
            eid, s, r = (str(x) for x in e)
            if s not in self.vindex or r not in self.vindex:
                raise MalformedInputError(f"edge {eid!r} has an unknown endpoint")
            ids.append(eid)
            src.append(self.vindex[s])
            rng.append(self.vindex[r])
        self.edges = tuple(ids)
        self.eindex = {e: i for i, e in enumerate(self.edges)}
        if len(self.eindex) != len(self.edges):
            raise MalformedInputError("edge ids must be distinct")
        if set(self.eindex) & set(self.vindex):
            raise MalformedInputError("edge and vertex ids must not overlap")
        self.src = tuple(src)
        self.rng = tuple(rng)
        # edges e with r(e) = v: the ways to start a path at v, or extend one with source v
        self.into = tuple(tuple(e for e in range(len(ids)) if rng[e] == v) for v in range(len(self.vertices)))
        for v, fan in enumerate(self.into):
            if not fan:
                raise MalformedInputError(f"vertex {self.vertices[v]!r} is a source (receives no edge)")

    def path(self, edges=(), vertex=None) -> "PathWord":
        """Path from edge ids (left to right); the empty path needs ``vertex``."""
        if isinstance(edges, str):
            edges = [edges]
        idx = []
        for e in edges:
            if e not in self.eindex:
                raise MalformedInputError(f"unknown edge {e!r}")
            idx.append(self.eindex[e])
        if not idx:
            if vertex not in self.vindex:
                raise MalformedInputError(f"empty path needs a vertex, got {vertex!r}")
            return PathWord(self, (), self.vindex[vertex], self.vindex[vertex])
        return PathWord.from_indices(self, tuple(idx))

    def vertex_path(self, v):
        return self.path((), v)

    def parse_path(self, text) -> "PathWord":
        """Comma/space separated edge ids, or a single vertex id for the empty path."""
        tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
        if len(tokens) == 1 and tokens[0] in self.vindex:
            return self.vertex_path(tokens[0])
        if not tokens:
            raise MalformedInputError("empty path literal; give a vertex id")
        return self.path(tokens)

    def parse_infinite(self, text) -> "EventuallyPeriodicPath":
        """Literal ``prefix,(period)*``, e.g. ``e0,(e1)*`` or ``e1*``."""
        text = text.strip()
        m = re.fullmatch(r"(?P<pre>.*?)[,\s]*\((?P<per>[^()]*)\)\*", text)
        if m is None:
            m = re.fullmatch(r"(?P<pre>.*?)[,\s]*(?P<per>[^,\s()*]+)\*", text)
        if m is None:
            raise MalformedInputError(f"bad infinite path literal {text!r}; expected prefix,(period)*")
        per = [t for t in re.split(r"[,\s]+", m.group("per").strip()) if t]
        pre = [t for t in re.split(r"[,\s]+", m.group("pre").strip()) if t]
        if not per:
            raise MalformedInputError("period must be nonempty")
        period = self.path(per)
        prefix = self.path(pre) if pre else self.vertex_path(self.vertices[period.rng])
        return EventuallyPeriodicPath(prefix, period)

    def paths_of_length(self, n, vertex=None):
        """All paths of length n (with range ``vertex`` if given), in length-lex order."""
        starts = range(len(self.vertices)) if vertex is None else [vertex]
        out = []
        for v in starts:
            level = [((), v)]
            for _ in range(n):
                level = [(p + (e,), self.src[e]) for p, s in level for e in self.into[s]]
            out.extend(PathWord(self, p, v, s) if p else PathWord(self, (), v, v) for p, s in level)
        out.sort(key=PathWord.sort_key)
        return out

    def to_json(self):
        return {"vertices": list(self.vertices),
                "edges": [{"id": e, "src": self.vertices[self.src[i]], "rng": self.vertices[self.rng[i]]}
                          for i, e in enumerate(self.edges)]}


@dataclass(frozen=True)
class PathWord:
    """Finite path; ``edges`` holds edge positions, ``rng``/``src`` vertex positions."""

    graph: DirectedGraph
    edges: tuple
    rng: int
    src: int

    @classmethod
    def from_indices(cls, graph, edges, vertex=None):
        if not edges:
            return cls(graph, (), vertex, vertex)
        for a, b in zip(edges, edges[1:]):
            if graph.rng[b] != graph.src[a]:
                raise DomainError(f"edges {graph.edges[a]}, {graph.edges[b]} are not composable")
        return cls(graph, tuple(edges), graph.rng[edges[0]], graph.src[edges[-1]])

    def __len__(self):
        return len(self.edges)

    def __eq__(self, other):
        if not isinstance(other, PathWord):
            return NotImplemented
        return self.edges == other.edges and self.rng == other.rng and self.src == other.src

    def __hash__(self):
        return hash((self.edges, self.rng, self.src))

    def concat(self, other: "PathWord") -> "PathWord":
        """self.other, defined when r(other) = s(self)."""
        if other.rng != self.src:
            raise DomainError(f"cannot concatenate {self} and {other}")
        return PathWord(self.graph, self.edges + other.edges, self.rng, other.src)

    def extend(self, edge: int) -> "PathWord":
        if self.graph.rng[edge] != self.src:
            raise DomainError("edge does not attach to the source of the path")
        return PathWord(self.graph, self.edges + (edge,), self.rng, self.graph.src[edge])

    def prefix(self, n) -> "PathWord":
        if n >= len(self.edges):
            return self
        if n == 0:
            return PathWord(self.graph, (), self.rng, self.rng)
        return PathWord(self.graph, self.edges[:n], self.rng, self.graph.src[self.edges[n - 1]])

    def suffix_after(self, n) -> "PathWord":
        """Drop the first n edges."""
        if n == 0:
            return self
        if n == len(self.edges):
            return PathWord(self.graph, (), self.src, self.src)
        return PathWord(self.graph, self.edges[n:], self.graph.rng[self.edges[n]], self.src)

    def is_prefix_of(self, other: "PathWord") -> bool:
        return self.rng == other.rng and other.edges[:len(self.edges)] == self.edges

    def sort_key(self):
        return (len(self.edges), self.edges, self.rng)

    @property
    def ids(self):
        return [self.graph.edges[e] for e in self.edges]

    def to_json(self):
        return self.ids if self.edges else [self.graph.vertices[self.rng]]

    def __str__(self):
        return " ".join(self.ids) if self.edges else self.graph.vertices[self.rng]

    __repr__ = __str__


@dataclass(frozen=True, init=False)
class EventuallyPeriodicPath:
    """prefix . period . period ...; normalized to a primitive period and shortest prefix."""

    prefix: PathWord
    period: PathWord

    def __init__(self, prefix: PathWord, period: PathWord):
        if not period.edges:
            raise DomainError("period must be nonempty")
        if period.src != period.rng:
            raise DomainError(f"period {period} is not a cycle")
        if prefix.src != period.rng:
            raise DomainError(f"period {period} does not attach to prefix {prefix}")
        g = prefix.graph
        per = period.edges
        n = len(per)
        for d in range(1, n + 1):
            if n % d == 0 and per[:d] * (n // d) == per:
                per = per[:d]
                break
        pre = prefix.edges
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = per[-1:] + per[:-1]
        per_path = PathWord.from_indices(g, per)
        pre_path = PathWord.from_indices(g, pre) if pre else PathWord(g, (), per_path.rng, per_path.rng)
        object.__setattr__(self, "prefix", pre_path)
        object.__setattr__(self, "period", per_path)

    @property
    def graph(self):
        return self.prefix.graph

    @property
    def rng(self):
        return self.prefix.rng

    def edge_at(self, i):
        p = len(self.prefix.edges)
        if i < p:
            return self.prefix.edges[i]
        return self.period.edges[(i - p) % len(self.period.edges)]

    def initial(self, n) -> PathWord:
        """The length-n prefix as a finite path."""
        if n == 0:
            return PathWord(self.graph, (), self.rng, self.rng)
        return PathWord.from_indices(self.graph, tuple(self.edge_at(i) for i in range(n)))

    def tail_after(self, n) -> "EventuallyPeriodicPath":
        """The infinite path with the first n edges removed."""
        p = len(self.prefix.edges)
        if n <= p:
            return EventuallyPeriodicPath(self.prefix.suffix_after(n), self.period)
        k = (n - p) % len(self.period.edges)
        per = self.period.edges[k:] + self.period.edges[:k]
        per_path = PathWord.from_indices(self.graph, per)
        return EventuallyPeriodicPath(PathWord(self.graph, (), per_path.rng, per_path.rng), per_path)

    def starts_with(self, path: PathWord) -> bool:
        if path.rng != self.rng:
            return False
        return all(self.edge_at(i) == e for i, e in enumerate(path.edges))

    def __str__(self):
        g = self.graph
        per = ",".join(g.edges[e] for e in self.period.edges)
        pre = ",".join(g.edges[e] for e in self.prefix.edges)
        return f"{pre},({per})*" if pre else f"({per})*"

    __repr__ = __str__

    def to_json(self):
        return str(self)


def prepend(path: PathWord, xi: EventuallyPeriodicPath) -> EventuallyPeriodicPath:
    """path . xi, defined when r(xi) = s(path)."""
    if xi.rng != path.src:
        raise DomainError(f"cannot prepend {path} to {xi}")
    return EventuallyPeriodicPath(path.concat(xi.prefix), xi.period)


# ---------------------------------------------------------------------------
# Generators and words
# ---------------------------------------------------------------------------

@dataclass
class MealyGenerator:
    """Generator data as given: vertex permutation, edge permutation and sections."""

    name: str
    vertex_action: dict
    edge_action: dict
    cocycle: dict  # edge id -> list of letters

    def to_json(self):
        return {"name": self.name, "vertexAction": dict(self.vertex_action),
                "edgeAction": dict(self.edge_action), "cocycle": {e: list(w) for e, w in self.cocycle.items()}}


_LETTER = re.compile(r"^(?P<sign>[+-]?)(?P<name>[A-Za-z_][A-Za-z0-9_]*)(?:\^(?P<exp>[+-]?\d+))?$")


def _reduce(letters):
    """Free reduction of (gen, exp) pairs, merging neighbours."""
    out = []
    for g, n in letters:
        if n == 0:
            continue
        if out and out[-1][0] == g:
            m = out[-1][1] + n
            out.pop()
            if m:
                out.append((g, m))
        else:
            out.append((g, n))
    return tuple(out)


def _inverse(letters):
    return tuple((g, -n) for g, n in reversed(letters))


class _Orbit:
    """Cycle structure of a permutation, for fast powers."""

    def __init__(self, perm):
        n = len(perm)
        self.cycle_of = [None] * n
        self.pos = [0] * n
        self.cycles = []
        for x in range(n):
            if self.cycle_of[x] is not None:
                continue
            cyc, y = [], x
            while self.cycle_of[y] is None:
                self.cycle_of[y] = len(self.cycles)
                self.pos[y] = len(cyc)
                cyc.append(y)
                y = perm[y]
            self.cycles.append(cyc)

    def power(self, x, n):
        cyc = self.cycles[self.cycle_of[x]]
        return cyc[(self.pos[x] + n) % len(cyc)]


class SelfSimilarSystem:
    """(G, E, sigma, phi) with G generated by finitely many Mealy generators."""

    def __init__(self, graph: DirectedGraph, generators, name=None, state_cap=DEFAULT_STATE_CAP):
        self.graph = graph
        self.name = name
        self.state_cap = state_cap
        self.generators = list(generators)
        self.gindex = {g.name: i for i, g in enumerate(self.generators)}
        if len(self.gindex) != len(self.generators):
            raise MalformedInputError("generator names must be distinct")
        V, E = graph.vindex, graph.eindex
        self._vperm, self._eperm, self._sections = [], [], []
        for gen in self.generators:
            vperm = list(range(len(graph.vertices)))
            for v, w in gen.vertex_action.items():
                if v not in V or w not in V:
                    raise MalformedInputError(f"generator {gen.name}: unknown vertex in vertexAction")
                vperm[V[v]] = V[w]
            eperm = list(range(len(graph.edges)))
            for e, f in gen.edge_action.items():
                if e not in E or f not in E:
                    raise MalformedInputError(f"generator {gen.name}: unknown edge in edgeAction")
                eperm[E[e]] = E[f]
            if sorted(vperm) != list(range(len(vperm))) or sorted(eperm) != list(range(len(eperm))):
                raise MalformedInputError(f"generator {gen.name}: action is not a bijection")
            secs = [()] * len(graph.edges)
            for e, w in gen.cocycle.items():
                if e not in E:
                    raise MalformedInputError(f"generator {gen.name}: unknown edge {e!r} in cocycle")
                secs[E[e]] = None  # filled below once all names are known
            self._vperm.append(vperm)
            self._eperm.append(eperm)
            self._sections.append(secs)
        for i, gen in enumerate(self.generators):
            for e, w in gen.cocycle.items():
                self._sections[i][E[e]] = self.parse_letters(w)
        self._vorb = [_Orbit(p) for p in self._vperm]
        self._eorb = [_Orbit(p) for p in self._eperm]
        self._vinv = [[p.index(x) for x in range(len(p))] for p in self._vperm]
        # generators whose sections are all powers of themselves get exponent arithmetic
        self._cyclic = {}
        for i in range(len(self.generators)):
            secs = self._sections[i]
            if all(len(s) == 0 or (len(s) == 1 and s[0][0] == i) for s in secs):
                expo = [s[0][1] if s else 0 for s in secs]
                orb = self._eorb[i]
                sums = []
                for cyc in orb.cycles:
                    acc = [0]
                    for x in cyc:
                        acc.append(acc[-1] + expo[x])
                    sums.append(acc)
                self._cyclic[i] = sums
        # order of each cyclic generator (0 = infinite): finite iff every edge
        # cycle of length L carries a section exponent sum divisible by L
        self.orders = {}
        for i, sums in self._cyclic.items():
            cycles = self._eorb[i].cycles
            if all(acc[-1] % len(cyc) == 0 for cyc, acc in zip(cycles, sums)):
                lengths = [len(c) for c in cycles] + [len(c) for c in self._vorb[i].cycles]
                self.orders[i] = math.lcm(*lengths)
            else:
                self.orders[i] = 0
        self._mod = {i: k for i, k in self.orders.items() if k}
        self._identity_cache = {}
        self._validate()
        # other generators: look for a small finite order by bisimulation
        for i in range(len(self.generators)):
            if i in self._cyclic:
                continue
            for k in range(2, SMALL_ORDER_PROBE + 1):
                try:
                    if self.is_identity(((i, k),)):
                        self.orders[i] = self._mod[i] = k
                        break
                except FiniteStateCapError:
                    break

    def _validate(self):
        g = self.graph
        for i, gen in enumerate(self.generators):
            vp, ep = self._vperm[i], self._eperm[i]
            for e in range(len(g.edges)):
                if g.src[ep[e]] != vp[g.src[e]] or g.rng[ep[e]] != vp[g.rng[e]]:
                    raise MalformedInputError(f"generator {gen.name}: edge action does not respect endpoints at {g.edges[e]}")
                sec = self._sections[i][e]
                for v in range(len(g.vertices)):
                    if self.vertex_image(sec, v) != vp[v]:
                        raise MalformedInputError(
                            f"generator {gen.name}: section at {g.edges[e]} moves vertices differently from the generator")

    # -- words -------------------------------------------------------------

    def parse_letters(self, letters):
        """Letters like ``a``, ``-a``, ``a^-1``, ``g^4``; a string is split on spaces, commas and dots."""
        if isinstance(letters, str):
            text = letters.strip()
            if text in ("", "1", "id", "e"):
                return ()
            letters = [t for t in re.split(r"[\s,.*]+", text) if t]
        out = []
        for tok in letters:
            tok = str(tok)
            m = _LETTER.match(tok)
            if m is None or m.group("name") not in self.gindex:
                raise MalformedInputError(f"bad group letter {tok!r}")
            n = int(m.group("exp") or 1)
            if m.group("sign") == "-":
                n = -n
            out.append((self.gindex[m.group("name")], n))
        return _reduce(out)

    def word(self, letters=()) -> "GroupElementWord":
        if isinstance(letters, GroupElementWord):
            return letters
        if isinstance(letters, tuple) and all(isinstance(x, tuple) for x in letters):
            return GroupElementWord(self, self.canon(letters))
        return GroupElementWord(self, self.canon(self.parse_letters(letters)))

    def identity(self):
        return GroupElementWord(self, ())

    def generator(self, name):
        return self.word([name])

    def format_letters(self, letters):
        if not letters:
            return "1"
        names = [g.name for g in self.generators]
        return " ".join(names[g] if n == 1 else f"{names[g]}^{n}" for g, n in letters)

    def canon(self, letters):
        """Free reduction plus exponents of finite-order cyclic generators taken mod their order."""
        letters = _reduce(letters)
        if not self._mod:
            return letters
        while True:
            out = _reduce(tuple((g, n % self._mod[g]) if g in self._mod else (g, n) for g, n in letters))
            if out == letters:
                return out
            letters = out

    # -- primitive actions on reduced letter tuples ------------------------

    def vertex_image(self, letters, v):
        for g, n in reversed(letters):
            v = self._vorb[g].power(v, n)
        return v

    def _letter_on_edge(self, g, n, e):
        """(g^n . e, phi(g^n, e)) for a single letter."""
        if g in self._cyclic:
            orb = self._eorb[g]
            c = orb.cycle_of[e]
            cyc, acc = orb.cycles[c], self._cyclic[g][c]
            L, C = len(cyc), acc[-1]
            p = orb.pos[e]

            def F(m):
                return (m // L) * C + acc[m % L]

            q = F(p + n) - F(p)
            return cyc[(p + n) % L], (((g, q),) if q else ())
        secs = self._sections[g]
        parts = []
        if n > 0:
            for _ in range(n):
                parts.append(secs[e])
                e = self._eperm[g][e]
        else:
            inv = self._eorb[g]
            for _ in range(-n):
                e = inv.power(e, -1)
                parts.append(_inverse(secs[e]))
        # the section of g^n is the product with the last application leftmost
        out = ()
        for p in parts:
            out = _reduce(p + out)
        return e, out

    def on_edge(self, letters, e):
        """(w . e, phi(w, e)) for a reduced word w."""
        section = ()
        for g, n in reversed(letters):
            e, s = self._letter_on_edge(g, n, e)
            section = s + section if not section else _reduce(s + section)
        return e, self.canon(section)

    def thread(self, letters, edges):
        """Image edges and final section of w along a finite edge sequence."""
        image = []
        for e in edges:
            f, letters = self.on_edge(letters, e)
            image.append(f)
        return tuple(image), letters

    # -- word problem --------------------------------------------------------

    def is_identity(self, letters, cap=None):
        """Decide whether a reduced word acts trivially on every finite path."""
        letters = self.canon(letters)
        if not letters:
            return True
        cached = self._identity_cache.get(letters)
        if cached is None:
            cached = self._identity_cache[letters] = self._bisimulate(letters, range(len(self.graph.vertices)), cap)
        return cached

    def is_trivial_at(self, letters, v, cap=None):
        """Whether the word fixes every path with range v (v itself included)."""
        letters = self.canon(letters)
        if not letters:
            return True
        return self._bisimulate(letters, [v], cap)

    def _bisimulate(self, letters, vertices, cap):
        cap = cap or self.state_cap
        g = self.graph
        start = [(letters, v) for v in vertices]
        seen = set(start)
        queue = deque(start)
        result = True
        while queue:
            w, v = queue.popleft()
            if not w:
                continue
            if self.vertex_image(w, v) != v:
                result = False
                break
            for e in g.into[v]:
                f, sec = self.on_edge(w, e)
                if f != e:
                    result = False
                    break
                state = (sec, g.src[e])
                if state not in seen:
                    if len(seen) >= cap:
                        raise FiniteStateCapError(f"word problem exceeded {cap} section states", explored=len(seen))
                    seen.add(state)
                    queue.append(state)
            if not result:
                break
        return result

    # -- serialization -------------------------------------------------------

    def to_json(self):
        return {"graph": self.graph.to_json(), "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, doc, name=None, state_cap=DEFAULT_STATE_CAP):
        try:
            gdoc = doc["graph"]
            edges = [(e["id"], e["src"], e["rng"]) for e in gdoc["edges"]]
            graph = DirectedGraph(gdoc["vertices"], edges)
            gens = [MealyGenerator(str(g["name"]), {str(k): str(v) for k, v in g.get("vertexAction", {}).items()},
                                   {str(k): str(v) for k, v in g.get("edgeAction", {}).items()},
                                   {str(k): list(v) for k, v in g.get("cocycle", {}).items()})
                    for g in doc["generators"]]
        except (KeyError, TypeError) as exc:
            raise MalformedInputError(f"system file is missing a field: {exc}") from None
        return cls(graph, gens, name=name, state_cap=state_cap)

    @classmethod
    def load(cls, path, state_cap=DEFAULT_STATE_CAP):
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_json(doc, name=str(path), state_cap=state_cap)

    def __repr__(self):
        return f"<SelfSimilarSystem {self.name}>"


@dataclass(frozen=True)
class GroupElementWord:
    """Reduced word over the system's generators.  ``==`` is syntactic; use :func:`equal`."""

    system: SelfSimilarSystem
    letters: tuple

    def __mul__(self, other: "GroupElementWord") -> "GroupElementWord":
        if other.system is not self.system:
            raise DomainError("words from different systems")
        return GroupElementWord(self.system, self.system.canon(self.letters + other.letters))

    def inverse(self) -> "GroupElementWord":
        return GroupElementWord(self.system, self.system.canon(_inverse(self.letters)))

    def __pow__(self, n: int) -> "GroupElementWord":
        if len(self.letters) == 1:
            g, m = self.letters[0]
            return GroupElementWord(self.system, self.system.canon(((g, m * n),)))
        base = self if n >= 0 else self.inverse()
        out = ()
        for _ in range(abs(n)):
            out = _reduce(out + base.letters)
        return GroupElementWord(self.system, self.system.canon(out))

    def __eq__(self, other):
        if not isinstance(other, GroupElementWord):
            return NotImplemented
        return self.system is other.system and self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def is_empty(self):
        return not self.letters

    def to_json(self):
        names = [g.name for g in self.system.generators]
        return [names[g] if n == 1 else f"{names[g]}^{n}" for g, n in self.letters]

    def __str__(self):
        return self.system.format_letters(self.letters)

    __repr__ = __str__


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def _check(g: GroupElementWord, path: PathWord):
    if path.graph is not g.system.graph:
        raise DomainError("path and element belong to different systems")


def act_on_path(g: GroupElementWord, alpha: PathWord) -> PathWord:
    _check(g, alpha)
    S = g.system
    if not alpha.edges:
        v = S.vertex_image(g.letters, alpha.rng)
        return PathWord(alpha.graph, (), v, v)
    image, _ = S.thread(g.letters, alpha.edges)
    return PathWord.from_indices(alpha.graph, image)


def cocycle(g: GroupElementWord, alpha: PathWord) -> GroupElementWord:
    _check(g, alpha)
    _, sec = g.system.thread(g.letters, alpha.edges)
    return GroupElementWord(g.system, sec)


def act_and_cocycle(g: GroupElementWord, alpha: PathWord):
    _check(g, alpha)
    S = g.system
    if not alpha.edges:
        v = S.vertex_image(g.letters, alpha.rng)
        return PathWord(alpha.graph, (), v, v), g
    image, sec = S.thread(g.letters, alpha.edges)
    return PathWord.from_indices(alpha.graph, image), GroupElementWord(S, sec)


def _period_modulus(system, period_edges):
    """For a single generator with exponent arithmetic: a modulus M such that
    the exponent x at a period boundary, taken mod M, determines the image of
    every later edge.  None when no such M exists (then sections are compared
    syntactically)."""
    if len(system.generators) != 1 or 0 not in system._cyclic:
        return None
    orb, sums = system._eorb[0], system._cyclic[0]
    steps = []
    for e in period_edges:
        c = orb.cycle_of[e]
        steps.append((len(orb.cycles[c]), sums[c][-1]))
    bound = 1
    for L, _ in steps:
        bound *= L
    for M in range(steps[0][0], bound * steps[0][0] + 1, steps[0][0]):
        m, ok = M, True
        for k, (L, C) in enumerate(steps):
            if m % L:
                ok = False
                break
            m = m // L * C
        if ok and m % M == 0:
            return M
    return None


def act_on_infinite(g: GroupElementWord, xi: EventuallyPeriodicPath, cap=None) -> EventuallyPeriodicPath:
    """Image of an eventually periodic path; periodic because the section at
    period boundaries eventually repeats (for finite-state elements, or up to
    a stable exponent modulus for one-generator systems)."""
    _check(g, xi.prefix)
    S = g.system
    cap = cap or S.state_cap
    modulus = _period_modulus(S, xi.period.edges)

    def key(w):
        if modulus is not None and len(w) <= 1:
            return ("mod", (w[0][1] if w else 0) % modulus)
        return w

    pre_img, w = S.thread(g.letters, xi.prefix.edges)
    seen = {key(w): 0}
    blocks = []
    while True:
        img, w = S.thread(w, xi.period.edges)
        blocks.append(img)
        if key(w) in seen:
            start = seen[key(w)]
            break
        if len(blocks) >= cap:
            raise FiniteStateCapError(f"no repeating section within {cap} periods", explored=len(blocks))
        seen[key(w)] = len(blocks)
    graph = xi.graph
    prefix = pre_img + sum(blocks[:start], ())
    period = sum(blocks[start:], ())
    per = PathWord.from_indices(graph, period)
    pre = PathWord.from_indices(graph, prefix) if prefix else PathWord(graph, (), per.rng, per.rng)
    return EventuallyPeriodicPath(pre, per)


def is_identity(g: GroupElementWord, cap=None) -> bool:
    return g.system.is_identity(g.letters, cap)


def equal(g: GroupElementWord, h: GroupElementWord, cap=None) -> bool:
    """Semantic equality by bisimulation on the sections of g h^-1."""
    if g.system is not h.system:
        raise DomainError("words from different systems")
    if g.letters == h.letters:
        return True
    return g.system.is_identity(g.letters + _inverse(h.letters), cap)


def strongly_fixed(g: GroupElementWord, alpha: PathWord, cap=None) -> bool:
    image, sec = act_and_cocycle(g, alpha)
    return image == alpha and is_identity(sec, cap)


def minimal_strongly_fixed(g: GroupElementWord, depth: int, cap=None):
    """Strongly fixed paths of length <= depth with no strongly fixed proper prefix."""
    if depth < 1:
        raise DomainError("depth must be at least 1")
    if is_identity(g, cap):
        raise DomainError("the identity strongly fixes everything; minimal paths are vacuous")
    S, graph = g.system, g.system.graph
    found = []
    stack = [((), v, g.letters) for v in reversed(range(len(graph.vertices)))
             if S.vertex_image(g.letters, v) == v]
    while stack:
        edges, v, w = stack.pop()
        for e in reversed(graph.into[v]):
            f, sec = S.on_edge(w, e)
            if f != e:
                continue
            path = edges + (e,)
            if S.is_identity(sec, cap):
                found.append(PathWord.from_indices(graph, path))
            elif len(path) < depth:
                stack.append((path, graph.src[e], sec))
    found.sort(key=PathWord.sort_key)
    return found


def section_orbit(g: GroupElementWord, xi: EventuallyPeriodicPath, cap=None):
    """Sections phi(g, xi_1..xi_n) for n = 0, 1, ... up to the first repeat of
    (section, position in period).  Returns (sections, loop_start)."""
    S = g.system
    cap = cap or S.state_cap
    p, L = len(xi.prefix), len(xi.period)
    secs = [g.letters]
    seen = {}
    n = 0
    while True:
        if n >= p:
            key = (secs[-1], (n - p) % L)
            if key in seen:
                return [GroupElementWord(S, w) for w in secs[:-1]], seen[key]
            seen[key] = n
        if n >= cap:
            raise FiniteStateCapError(f"section orbit exceeded {cap} states", explored=n)
        _, w = S.on_edge(secs[-1], xi.edge_at(n))
        secs.append(w)
        n += 1


# ---------------------------------------------------------------------------
# Built-in systems
# ---------------------------------------------------------------------------

def odometer():
    graph = DirectedGraph(["v"], [("e0", "v", "v"), ("e1", "v", "v")])
    a = MealyGenerator("a", {}, {"e0": "e1", "e1": "e0"}, {"e0": [], "e1": ["a"]})
    return SelfSimilarSystem(graph, [a], name="odometer")


def grigorchuk():
    graph = DirectedGraph(["v"], [("e0", "v", "v"), ("e1", "v", "v")])
    gens = [
        MealyGenerator("a", {}, {"e0": "e1", "e1": "e0"}, {"e0": [], "e1": []}),
        MealyGenerator("b", {}, {}, {"e0": ["a"], "e1": ["c"]}),
        MealyGenerator("c", {}, {}, {"e0": ["a"], "e1": ["d"]}),
        MealyGenerator("d", {}, {}, {"e0": [], "e1": ["b"]}),
    ]
    return SelfSimilarSystem(graph, gens, name="grigorchuk")


KATSURA_A = ((2, 1, 0), (1, 2, 1), (1, 1, 2))
KATSURA_B = ((1, 2, 0), (2, 1, 2), (0, 2, 1))


def katsura_edge_id(x, y, k, count, n):
    """Edge with range x and source y (1-based); superscript k only when count > 1."""
    base = f"e{x}{y}" if n < 10 else f"e{x}_{y}"
    return f"{base}^{k}" if count > 1 else base


def katsura(A=KATSURA_A, B=KATSURA_B, generator="g"):
    """Katsura self-similar graph of (A, B) acted on by Z = <g>.

    Entry (i, j) of A counts the edges with source i and range j; such an edge
    is written e_{ji}^k (range first), the order in which paths compose.
    The action is g . e^k = e^r and phi(g, e^k) = g^q where k + b = q a + r.
    """
    n = len(A)
    if any(len(row) != n for row in A) or len(B) != n or any(len(row) != n for row in B):
        raise MalformedInputError("A and B must be square matrices of the same size")
    for i in range(n):
        if not any(A[i]):
            raise MalformedInputError(f"A has a zero row {i + 1}")
        for j in range(n):
            if int(A[i][j]) != A[i][j] or int(B[i][j]) != B[i][j]:
                raise MalformedInputError(f"entry ({i + 1},{j + 1}) is not an integer")
            if A[i][j] < 0:
                raise MalformedInputError(f"a_{i + 1}{j + 1} is negative")
            if A[i][j] == 0 and B[i][j] != 0:
                raise MalformedInputError(f"a_{i + 1}{j + 1} = 0 but b_{i + 1}{j + 1} != 0")
    vertices = [f"v{i + 1}" for i in range(n)]
    edges, action, sections = [], {}, {}
    for x in range(n):          # range
        for y in range(n):      # source
            a, b = int(A[y][x]), int(B[y][x])
            for k in range(a):
                eid = katsura_edge_id(x + 1, y + 1, k, a, n)
                edges.append((eid, vertices[y], vertices[x]))
                q, r = divmod(k + b, a)
                action[eid] = katsura_edge_id(x + 1, y + 1, r, a, n)
                sections[eid] = [f"{generator}^{q}"] if q else []
    gen = MealyGenerator(generator, {}, action, sections)
    return SelfSimilarSystem(DirectedGraph(vertices, edges), [gen], name="katsura")


BUILTINS = {"odometer": odometer, "grigorchuk": grigorchuk, "katsura": katsura}


def builtin_system(name, params=None):
    """Built-in system by name; ``params`` may carry {"A": ..., "B": ...} for katsura."""
    if name not in BUILTINS:
        raise MalformedInputError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}")
    params = params or {}
    if name != "katsura" and params:
        raise MalformedInputError(f"builtin {name} takes no parameters")
    return BUILTINS[name](**{k: v for k, v in params.items() if k in ("A", "B")})

"""Exact semiring arithmetic and a brute-force congruence oracle for finite hemirings.

A finite hemiring is given by its Cayley tables (:class:`FiniteAlgebraTable`).
The oracle computes congruences generated by seed pairs and decides
congruence-simplicity by exhausting principal congruences.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DomainError, MalformedInputError


# ---------------------------------------------------------------------------
# Finite tables
# ---------------------------------------------------------------------------

class FiniteAlgebraTable:
    """Carrier plus total addition and multiplication tables (indices into carrier)."""

    def __init__(self, carrier, add, mul, zero, one=None, name=None):
        carrier = tuple(str(c) for c in carrier)
        n = len(carrier)
        if n == 0:
            raise MalformedInputError("carrier must be nonempty")
        if len(set(carrier)) != n:
            raise MalformedInputError("carrier labels must be distinct")
        self.carrier = carrier
        self.add = _check_table(add, n, "add")
        self.mul = _check_table(mul, n, "mul")
        if not isinstance(zero, (int, np.integer)) or not 0 <= zero < n:
            raise MalformedInputError(f"zero index {zero!r} out of range")
        if one is not None and (not isinstance(one, (int, np.integer)) or not 0 <= one < n):
            raise MalformedInputError(f"one index {one!r} out of range")
        self.zero = int(zero)
        self.one = None if one is None else int(one)
        self.name = name

    def __len__(self):
        return len(self.carrier)

    def __repr__(self):
        label = self.name or "table"
        return f"<FiniteAlgebraTable {label} |{len(self)}|>"

    def index(self, label):
        try:
            return self.carrier.index(str(label))
        except ValueError:
            raise MalformedInputError(f"unknown carrier label {label!r}") from None

    @property
    def is_unital(self):
        return self.one is not None

    def to_json(self):
        return {
            "carrier": list(self.carrier),
            "add": self.add.tolist(),
            "mul": self.mul.tolist(),
            "zero": self.zero,
            "one": self.one,
        }

    @classmethod
    def from_json(cls, doc, name=None):
        if not isinstance(doc, dict):
            raise MalformedInputError("semiring table must be a JSON object")
        missing = [k for k in ("carrier", "add", "mul", "zero") if k not in doc]
        if missing:
            raise MalformedInputError(f"semiring table missing keys: {', '.join(missing)}")
        return cls(doc["carrier"], doc["add"], doc["mul"], doc["zero"], doc.get("one"), name=name)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_json(doc, name=str(path))


def _check_table(rows, n, what):
    if isinstance(rows, np.ndarray):
        arr = rows
    else:
        if not isinstance(rows, (list, tuple)) or len(rows) != n:
            raise MalformedInputError(f"{what} table must have {n} rows")
        for i, row in enumerate(rows):
            if not isinstance(row, (list, tuple, np.ndarray)) or len(row) != n:
                raise MalformedInputError(f"{what} table row {i} must have {n} entries")
            for j, v in enumerate(row):
                if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                    raise MalformedInputError(f"{what}[{i}][{j}] is not an index: {v!r}")
        arr = np.asarray(rows, dtype=np.int64)
    if arr.shape != (n, n):
        raise MalformedInputError(f"{what} table must be {n}x{n}, got {arr.shape}")
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = np.argwhere((arr < 0) | (arr >= n))[0]
        raise MalformedInputError(f"{what}[{bad[0]}][{bad[1]}] out of range")
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def boolean_table():
    return FiniteAlgebraTable(["0", "1"], [[0, 1], [1, 1]], [[0, 0], [0, 1]], 0, 1, name="B")


def zmod_table(n):
    """The ring Z/n (a field when n is prime)."""
    idx = np.arange(n)
    add = (idx[:, None] + idx[None, :]) % n
    mul = (idx[:, None] * idx[None, :]) % n
    one = 1 % n if n > 1 else None
    return FiniteAlgebraTable([str(i) for i in range(n)], add, mul, 0, one, name=f"Z/{n}")


def prime_field_table(p):
    if not _is_prime(p):
        raise DomainError(f"{p} is not prime")
    table = zmod_table(p)
    table.name = f"F_{p}"
    return table


def max_plus_table():
    """Three-element max-plus style semiring on {0, 1, inf} with max as addition."""
    # 0 < 1 < inf; 0 absorbs, 1 is the unit, inf*inf = inf
    add = [[0, 1, 2], [1, 1, 2], [2, 2, 2]]
    mul = [[0, 0, 0], [0, 1, 2], [0, 2, 2]]
    return FiniteAlgebraTable(["0", "1", "inf"], add, mul, 0, 1, name="maxplus3")


def _is_prime(p):
    return isinstance(p, int) and p >= 2 and all(p % d for d in range(2, int(p ** 0.5) + 1))


# ---------------------------------------------------------------------------
# Axiom validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple

    def to_json(self):
        return {"law": self.law, "witness": list(self.witness)}


def validate_axioms(table: FiniteAlgebraTable) -> list:
    """Check the hemiring laws exhaustively; returns one :class:`Violation` per broken law."""
    if not isinstance(table, FiniteAlgebraTable):
        raise MalformedInputError("expected a FiniteAlgebraTable")
    A, M, z = table.add, table.mul, table.zero
    n = len(table)
    out = []

    def first(mask):
        hit = np.argwhere(mask)
        return tuple(int(v) for v in hit[0]) if len(hit) else None

    w = first(A != A.T)
    if w:
        out.append(Violation("additive commutativity", w))
    w = first(A[z, :] != np.arange(n))
    if w is None:
        w = first(A[:, z] != np.arange(n))
    if w is not None:
        out.append(Violation("additive identity", w))
    laws = {
        "additive associativity": None,
        "multiplicative associativity": None,
        "left distributivity": None,
        "right distributivity": None,
    }
    idx = np.arange(n)
    for a in range(n):
        # (a+b)+c vs a+(b+c) over all b, c
        if laws["additive associativity"] is None:
            lhs = A[A[a, :][:, None], idx[None, :]]
            rhs = A[a, A]
            w = first(lhs != rhs)
            if w:
                laws["additive associativity"] = (a,) + w
        if laws["multiplicative associativity"] is None:
            lhs = M[M[a, :][:, None], idx[None, :]]
            rhs = M[a, M]
            w = first(lhs != rhs)
            if w:
                laws["multiplicative associativity"] = (a,) + w
        if laws["left distributivity"] is None:
            # a(b+c) = ab + ac
            lhs = M[a, A]
            rhs = A[M[a, :][:, None], M[a, :][None, :]]
            w = first(lhs != rhs)
            if w:
                laws["left distributivity"] = (a,) + w
        if laws["right distributivity"] is None:
            # (b+c)a = ba + ca
            lhs = M[A, a]
            rhs = A[M[:, a][:, None], M[:, a][None, :]]
            w = first(lhs != rhs)
            if w:
                laws["right distributivity"] = w + (a,)
        if all(v is not None for v in laws.values()):
            break
    for law, w in laws.items():
        if w is not None:
            out.append(Violation(law, w))
    w = first(M[z, :] != z)
    if w is None:
        w = first(M[:, z] != z)
    if w is not None:
        out.append(Violation("zero annihilation", w))
    if table.one is not None:
        o = table.one
        w = first(M[o, :] != idx)
        if w is None:
            w = first(M[:, o] != idx)
        if w is not None:
            out.append(Violation("multiplicative identity", w))
        if o == z and n > 1:
            out.append(Violation("one distinct from zero", (o,)))
    return out


# ---------------------------------------------------------------------------
# Congruences
# ---------------------------------------------------------------------------

class CongruencePartition:
    """A partition of a table's carrier; ``labels[i]`` is the least member of i's block."""

    def __init__(self, algebra: FiniteAlgebraTable, labels):
        self.algebra = algebra
        labels = np.asarray(labels, dtype=np.int64)
        self.labels = _canonical_labels(labels)
        self.labels.setflags(write=False)

    @classmethod
    def from_blocks(cls, algebra, blocks):
        labels = np.arange(len(algebra))
        seen = set()
        for block in blocks:
            block = list(block)
            if not block:
                raise MalformedInputError("empty block")
            for b in block:
                if b in seen or not 0 <= b < len(algebra):
                    raise MalformedInputError(f"bad block member {b}")
                seen.add(b)
                labels[b] = min(block)
        if len(seen) != len(algebra):
            raise MalformedInputError("blocks do not cover the carrier")
        return cls(algebra, labels)

    @property
    def blocks(self):
        groups = {}
        for i, lab in enumerate(self.labels.tolist()):
            groups.setdefault(lab, []).append(i)
        return [tuple(v) for _, v in sorted(groups.items())]

    def __len__(self):
        return len(np.unique(self.labels))

    def same(self, a, b):
        return bool(self.labels[a] == self.labels[b])

    @property
    def is_full(self):
        return bool((self.labels == 0).all())

    @property
    def is_diagonal(self):
        return bool((self.labels == np.arange(len(self.labels))).all())

    def __eq__(self, other):
        if not isinstance(other, CongruencePartition):
            return NotImplemented
        return self.algebra is other.algebra and bool((self.labels == other.labels).all())

    def __hash__(self):
        return hash(self.labels.tobytes())

    def refines(self, other):
        """True if every block of self lies inside a block of other."""
        mapping = {}
        for a, b in zip(self.labels.tolist(), other.labels.tolist()):
            if mapping.setdefault(a, b) != b:
                return False
        return True

    def is_congruence(self):
        return is_congruence(self.algebra, self.labels)

    def quotient(self):
        """Quotient hemiring on the blocks (requires a congruence)."""
        if not self.is_congruence():
            raise DomainError("partition is not a congruence")
        reps = sorted(set(self.labels.tolist()))
        pos = {r: i for i, r in enumerate(reps)}
        lab = self.labels
        alg = self.algebra
        rep_arr = np.array(reps)
        add = np.vectorize(pos.get)(lab[alg.add[np.ix_(rep_arr, rep_arr)]])
        mul = np.vectorize(pos.get)(lab[alg.mul[np.ix_(rep_arr, rep_arr)]])
        carrier = ["[" + alg.carrier[r] + "]" for r in reps]
        one = None if alg.one is None else pos[int(lab[alg.one])]
        return FiniteAlgebraTable(carrier, add, mul, pos[int(lab[alg.zero])], one)

    def to_json(self):
        return {"blocks": [list(b) for b in self.blocks]}

    def __repr__(self):
        return f"<CongruencePartition {len(self)} blocks on |{len(self.labels)}|>"


def _canonical_labels(labels):
    # relabel every element by the least member of its class
    n = len(labels)
    first = {}
    out = np.empty(n, dtype=np.int64)
    for i, lab in enumerate(labels.tolist()):
        out[i] = first.setdefault(lab, i)
    return out


def is_congruence(algebra, labels) -> bool:
    """Exhaustive compatibility check of an equivalence (given by class labels)."""
    labels = np.asarray(labels)
    for table in (algebra.add, algebra.mul):
        for right in (False, True):
            T = table.T if right else table
            # rows T[t, :]: labels of T[t, x] must depend only on labels[x]
            img = labels[T]  # img[t, x]
            reps = labels  # compare x against its class representative
            if (img != img[:, reps]).any():
                return False
    return True


def _translation_images(algebra, us, vs):
    """All basic translations of the pairs (us[k], vs[k])."""
    A, M = algebra.add, algebra.mul
    xs = [A[:, us].ravel(), M[:, us].ravel(), M[us, :].ravel()]
    ys = [A[:, vs].ravel(), M[:, vs].ravel(), M[vs, :].ravel()]
    return np.concatenate(xs), np.concatenate(ys)


def _close(algebra, seeds_u, seeds_v, stop_pair=None):
    """Core worklist closure; returns labels (class representative per element).

    Only pairs that actually join two classes are translated in the next round;
    translations of intra-class pairs are implied by earlier rounds.
    """
    n = len(algebra)
    labels = np.arange(n, dtype=np.int64)
    pu = np.asarray(seeds_u, dtype=np.int64)
    pv = np.asarray(seeds_v, dtype=np.int64)
    while len(pu):
        lu, lv = labels[pu], labels[pv]
        keep = lu != lv
        if not keep.any():
            break
        lu, lv = lu[keep], lv[keep]
        graph = coo_matrix((np.ones(len(lu), dtype=np.int8), (lu, lv)), shape=(n, n))
        _, comp = connected_components(graph, directed=False)
        # new representative of each component: least old representative in it
        comp_of_rep = comp[labels]
        rep_of_comp = np.full(comp.max() + 1, n, dtype=np.int64)
        np.minimum.at(rep_of_comp, comp_of_rep, labels)
        old_reps = np.unique(labels)
        new_labels = rep_of_comp[comp_of_rep]
        moved = old_reps[new_labels[old_reps] != old_reps]
        labels = new_labels
        if stop_pair is not None and labels[stop_pair[0]] == labels[stop_pair[1]]:
            return labels, True
        if not len(moved):
            break
        # spanning pairs for this round's merges: (old rep, new rep)
        pu, pv = _translation_images(algebra, moved, labels[moved])
    return labels, False


def congruence_closure(algebra: FiniteAlgebraTable, seeds: Iterable) -> CongruencePartition:
    """Smallest congruence containing every seed pair."""
    n = len(algebra)
    us, vs = [], []
    for pair in seeds:
        try:
            a, b = pair
        except (TypeError, ValueError):
            raise MalformedInputError(f"seed {pair!r} is not a pair") from None
        for x in (a, b):
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)) or not 0 <= x < n:
                raise MalformedInputError(f"seed index {x!r} out of range")
        us.append(int(a))
        vs.append(int(b))
    labels, _ = _close(algebra, us, vs)
    return CongruencePartition(algebra, labels)


def additive_inverses(algebra):
    """Array of additive inverses, or None when (R, +) is not a group."""
    hits = algebra.add == algebra.zero
    if not hits.any(axis=1).all():
        return None
    return hits.argmax(axis=1)


def is_additively_idempotent(algebra):
    idx = np.arange(len(algebra))
    return bool((algebra.add[idx, idx] == idx).all())


def candidate_pairs(algebra):
    """Pairs whose principal congruences must all be full for simplicity.

    Reductions used (each principal congruence below is contained in Cg(a, b)):
      * (R, +) a group: Cg(a, b) = Cg(0, a - b), so pairs (0, x) suffice.
      * additively idempotent: Cg(a, b) contains Cg(a, a+b) or Cg(b, a+b), and
        Cg(x, y) for x < y contains Cg(x', y') for x <= x' < y' <= y, so
        covering pairs of the order x <= y iff x + y = y suffice. Every cover
        has the form (x, x + j) with j join-irreducible; those pairs are used.
    """
    n = len(algebra)
    neg = additive_inverses(algebra)
    if neg is not None:
        xs = [x for x in range(n) if x != algebra.zero]
        return [(algebra.zero, x) for x in xs]
    if is_additively_idempotent(algebra):
        A = algebra.add
        joins = []
        for j in range(n):
            below = np.flatnonzero((A[:, j] == j) & (np.arange(n) != j))
            acc = algebra.zero
            for b in below.tolist():
                acc = int(A[acc, b])
            if acc != j:
                joins.append(j)
        out = set()
        for j in joins:
            ups = A[:, j]
            for x in np.flatnonzero(ups != np.arange(n)).tolist():
                out.add((x, int(ups[x])))
        return sorted(out)
    return list(itertools.combinations(range(n), 2))


def is_congruence_simple(algebra: FiniteAlgebraTable) -> bool:
    """True iff the only congruences are the diagonal and the full relation.

    The one-element hemiring is not congruence-simple.
    """
    n = len(algebra)
    if n == 1:
        return False
    return find_proper_principal(algebra) is None


def find_proper_principal(algebra):
    """A pair generating a proper congruence, or None if every pair generates everything."""
    n = len(algebra)
    stop = None
    # generates_all[x, y]: Cg(x, y) is known to be the full relation
    generates_all = np.zeros((n, n), dtype=bool)
    if algebra.one is not None and algebra.one != algebra.zero:
        # 0 ~ 1 forces x = x*1 ~ x*0 = 0 for all x
        stop = (algebra.zero, algebra.one)
        generates_all[stop] = generates_all[stop[::-1]] = True
    for a, b in candidate_pairs(algebra):
        # Cg(f(a), f(b)) is contained in Cg(a, b) for every translation f
        xs, ys = _translation_images(algebra, np.array([a]), np.array([b]))
        if not generates_all[xs, ys].any():
            labels, hit = _close(algebra, [a], [b], stop_pair=stop)
            if not hit and not (labels == 0).all():
                return (a, b)
        generates_all[a, b] = generates_all[b, a] = True
    return None


def is_zerosumfree(table: FiniteAlgebraTable) -> bool:
    z = table.zero
    hits = np.argwhere(table.add == z)
    return all(a == z and b == z for a, b in hits.tolist())


# ---------------------------------------------------------------------------
# Scalar semirings and tagged values
# ---------------------------------------------------------------------------

class Semiring:
    """A commutative semiring acting on plain Python values."""

    name = "semiring"
    zero = None
    one = None
    is_field = False
    is_boolean = False
    zerosumfree = False
    elements = None  # tuple for finite semirings

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def coerce(self, v):
        return v

    def is_zero(self, a):
        return a == self.zero

    def label(self, a):
        return str(a)

    def table(self) -> FiniteAlgebraTable:
        if self.elements is None:
            raise DomainError(f"{self.name} is infinite")
        pos = {e: i for i, e in enumerate(self.elements)}
        add = [[pos[self.add(a, b)] for b in self.elements] for a in self.elements]
        mul = [[pos[self.mul(a, b)] for b in self.elements] for a in self.elements]
        return FiniteAlgebraTable([self.label(e) for e in self.elements], add, mul,
                                  pos[self.zero], pos[self.one], name=self.name)

    def __repr__(self):
        return f"<Semiring {self.name}>"


class BooleanSemiring(Semiring):
    name = "B"
    zero, one = 0, 1
    is_boolean = True
    zerosumfree = True
    elements = (0, 1)

    def add(self, a, b):
        return a | b

    def mul(self, a, b):
        return a & b

    def __eq__(self, other):
        return isinstance(other, BooleanSemiring)

    def __hash__(self):
        return hash("B")

    def coerce(self, v):
        if v in (0, 1, False, True):
            return int(v)
        raise DomainError(f"{v!r} is not a Boolean value")


class PrimeField(Semiring):
    is_field = True

    def __init__(self, p):
        if not _is_prime(p):
            raise DomainError(f"{p} is not prime")
        self.p = p
        self.name = f"F_{p}"
        self.zero, self.one = 0, 1
        self.elements = tuple(range(p))

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def coerce(self, v):
        if isinstance(v, bool) or not isinstance(v, int):
            raise DomainError(f"{v!r} is not a residue")
        return v % self.p

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))


class Rationals(Semiring):
    """Exact rationals; ``nonnegative=True`` gives the zerosumfree semifield Q>=0."""

    def __init__(self, nonnegative=False):
        self.nonnegative = nonnegative
        self.name = "Q+" if nonnegative else "Q"
        self.is_field = not nonnegative
        self.zerosumfree = nonnegative
        self.zero, self.one = Fraction(0), Fraction(1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def coerce(self, v):
        if isinstance(v, float):
            raise DomainError("floating point values are not exact rationals")
        v = Fraction(v)
        if self.nonnegative and v < 0:
            raise DomainError(f"{v} is negative")
        return v

    def __eq__(self, other):
        return isinstance(other, Rationals) and other.nonnegative == self.nonnegative

    def __hash__(self):
        return hash(("Q", self.nonnegative))


class TableSemiring(Semiring):
    """Values are carrier indices of a FiniteAlgebraTable."""

    def __init__(self, table: FiniteAlgebraTable):
        if table.one is None:
            raise DomainError("coefficient semirings must be unital")
        self.tab = table
        self.name = table.name or f"table{len(table)}"
        self.zero, self.one = table.zero, table.one
        self.elements = tuple(range(len(table)))
        self.zerosumfree = is_zerosumfree(table)
        self._add = table.add.tolist()
        self._mul = table.mul.tolist()

    def add(self, a, b):
        return self._add[a][b]

    def mul(self, a, b):
        return self._mul[a][b]

    def label(self, a):
        return self.tab.carrier[a]

    def table(self):
        return self.tab


BOOLEAN = BooleanSemiring()


def semiring_by_name(name):
    """Resolve a CLI-style semiring name: boolean, f2, f3, ..., q, q+."""
    key = name.lower()
    if key in ("b", "boolean", "bool"):
        return BOOLEAN
    if key.startswith("f") and key[1:].isdigit():
        return PrimeField(int(key[1:]))
    if key == "q":
        return Rationals()
    if key in ("q+", "qplus", "q>=0"):
        return Rationals(nonnegative=True)
    raise DomainError(f"unknown semiring {name!r}")


@dataclass(frozen=True)
class SemiringValue:
    """A scalar tagged with its semiring; mixing tags is rejected."""

    semiring: Semiring = field(compare=False)
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.semiring.coerce(self.value))

    def _check(self, other):
        if not isinstance(other, SemiringValue):
            return NotImplemented
        if self.semiring != other.semiring:
            raise DomainError(f"cannot combine {self.semiring.name} with {other.semiring.name}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return SemiringValue(self.semiring, self.semiring.add(self.value, other.value))

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return SemiringValue(self.semiring, self.semiring.mul(self.value, other.value))

    def __eq__(self, other):
        if not isinstance(other, SemiringValue):
            return NotImplemented
        return self.semiring == other.semiring and self.value == other.value

    def __hash__(self):
        return hash((self.semiring.name, self.value))

    def is_zero(self):
        return self.semiring.is_zero(self.value)

    def __repr__(self):
        return f"{self.semiring.name}({self.semiring.label(self.value)})"


def boolean(v):
    return SemiringValue(BOOLEAN, v)


def rational(v, nonnegative=False):
    return SemiringValue(Rationals(nonnegative), v)


def project_to_boolean(v: SemiringValue) -> SemiringValue:
    """The map 0 -> 0, s -> 1 (s != 0); a homomorphism exactly on zerosumfree sources."""
    if not v.semiring.zerosumfree:
        raise DomainError(f"{v.semiring.name} is not zerosumfree; the projection is not additive")
    return SemiringValue(BOOLEAN, 0 if v.is_zero() else 1)

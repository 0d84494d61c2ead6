"""Groups, group algebras S[G], matrix algebras M_n(S[G]) and their materialization.

Group elements are plain hashable handles owned by a group object: carrier
indices for :class:`FiniteGroupTable`, Python ints (exponents) for
:class:`IntegerGroup`.
"""
from __future__ import annotations

import itertools
import json

import numpy as np

from .errors import DomainError, MalformedInputError, SizeCapError
from .semiring import FiniteAlgebraTable, Semiring, TableSemiring

DEFAULT_MATERIALIZE_CAP = 2 ** 16


class FiniteGroupTable:
    def __init__(self, elements, mul, identity, name=None):
        elements = tuple(str(e) for e in elements)
        n = len(elements)
        if n == 0 or len(set(elements)) != n:
            raise MalformedInputError("group elements must be nonempty and distinct")
        try:
            arr = np.asarray(mul, dtype=np.int64)
        except (TypeError, ValueError):
            raise MalformedInputError("group table is not an integer matrix") from None
        if arr.shape != (n, n) or arr.min() < 0 or arr.max() >= n:
            raise MalformedInputError("group table must be a total n x n index table")
        if not 0 <= identity < n:
            raise MalformedInputError("identity index out of range")
        self.elements = elements
        self.mul_table = arr
        self.identity = int(identity)
        self.name = name
        self._mul = arr.tolist()
        inv = []
        for a in range(n):
            hits = [b for b in range(n) if self._mul[a][b] == identity]
            if len(hits) != 1:
                raise MalformedInputError(f"element {elements[a]} has no unique inverse")
            inv.append(hits[0])
        self.inverse = tuple(inv)
        problems = self.check_axioms()
        if problems:
            raise MalformedInputError("; ".join(problems))

    def check_axioms(self):
        n, m, e = len(self), self._mul, self.identity
        problems = []
        for a in range(n):
            if m[e][a] != a or m[a][e] != a:
                problems.append(f"identity fails at {self.elements[a]}")
            if m[a][self.inverse[a]] != e or m[self.inverse[a]][a] != e:
                problems.append(f"inverse fails at {self.elements[a]}")
        M = self.mul_table
        # (ab)c == a(bc)
        lhs = M[M[:, :, None], np.arange(n)[None, None, :]]
        rhs = M[np.arange(n)[:, None, None], M[None, :, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            a, b, c = bad[0]
            problems.append(f"associativity fails at {(int(a), int(b), int(c))}")
        return problems

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(range(len(self)))

    def __repr__(self):
        return f"<FiniteGroupTable {self.name or ''} |{len(self)}|>"

    def mul(self, a, b):
        return self._mul[a][b]

    def inv(self, a):
        return self.inverse[a]

    def label(self, a):
        return self.elements[a]

    def index(self, label):
        try:
            return self.elements.index(str(label))
        except ValueError:
            raise MalformedInputError(f"unknown group element {label!r}") from None

    def to_json(self):
        return {"elements": list(self.elements), "mul": self.mul_table.tolist(), "identity": self.identity}

    @classmethod
    def from_json(cls, doc, name=None):
        if not isinstance(doc, dict) or not {"elements", "mul", "identity"} <= set(doc):
            raise MalformedInputError("group file needs elements, mul and identity")
        return cls(doc["elements"], doc["mul"], doc["identity"], name=name)

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_json(json.load(fh), name=str(path))
            except json.JSONDecodeError as exc:
                raise MalformedInputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def trivial_group():
    return FiniteGroupTable(["1"], [[0]], 0, name="1")


def cyclic_group(n):
    labels = ["1"] + (["g"] if n == 2 else [f"g{k}" for k in range(1, n)])
    mul = [[(a + b) % n for b in range(n)] for a in range(n)]
    return FiniteGroupTable(labels, mul, 0, name=f"Z/{n}")


def symmetric_group(k):
    perms = sorted(itertools.permutations(range(k)))
    pos = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    mul = [[pos[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]
    labels = ["".join(str(x + 1) for x in p) for p in perms]
    return FiniteGroupTable(labels, mul, pos[tuple(range(k))], name=f"S_{k}")


def group_from_elements(elements, mul, identity, inv, labeler=str, name=None):
    """Tabulate a finite group given by Python callables over a list of hashables."""
    elements = list(elements)
    pos = {e: i for i, e in enumerate(elements)}
    table = [[pos[mul(a, b)] for b in elements] for a in elements]
    return FiniteGroupTable([labeler(e) for e in elements], table, pos[identity], name=name)


class IntegerGroup:
    """The infinite cyclic group <g>, element g^k stored as the integer k."""

    identity = 0

    def __init__(self, generator="g"):
        self.generator = generator

    def mul(self, a, b):
        return a + b

    def inv(self, a):
        return -a

    def label(self, a):
        if a == 0:
            return "1"
        return self.generator if a == 1 else f"{self.generator}^{a}"

    def __eq__(self, other):
        return isinstance(other, IntegerGroup) and other.generator == self.generator

    def __hash__(self):
        return hash(("Z", self.generator))


# ---------------------------------------------------------------------------
# Group algebras
# ---------------------------------------------------------------------------

def _as_semiring(s):
    if isinstance(s, Semiring):
        return s
    if isinstance(s, FiniteAlgebraTable):
        return TableSemiring(s)
    raise DomainError(f"not a semiring: {s!r}")


class GroupAlgebraElement:
    """Finitely supported function group -> semiring; zero coefficients are dropped."""

    __slots__ = ("group", "semiring", "coeffs")

    def __init__(self, group, semiring, coeffs=None):
        self.group = group
        self.semiring = semiring
        clean = {}
        for g, c in (coeffs or {}).items():
            c = semiring.coerce(c)
            if not semiring.is_zero(c):
                clean[g] = c
        self.coeffs = clean

    @classmethod
    def delta(cls, group, semiring, g, coeff=None):
        return cls(group, semiring, {g: semiring.one if coeff is None else coeff})

    @classmethod
    def zero(cls, group, semiring):
        return cls(group, semiring, {})

    def is_zero(self):
        return not self.coeffs

    def _check(self, other):
        if self.group is not other.group and self.group != other.group:
            raise DomainError("group algebra elements over different groups")
        if self.semiring != other.semiring:
            raise DomainError("group algebra elements over different semirings")

    def __add__(self, other):
        self._check(other)
        S = self.semiring
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = S.add(out[g], c) if g in out else c
        return GroupAlgebraElement(self.group, S, out)

    def __mul__(self, other):
        return group_algebra_multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        return self.group == other.group and self.semiring == other.semiring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def to_json(self):
        S, G = self.semiring, self.group
        return {G.label(g): S.label(c) for g, c in sorted(self.coeffs.items(), key=lambda kv: str(kv[0]))}

    def __repr__(self):
        if not self.coeffs:
            return "0"
        S, G = self.semiring, self.group
        terms = []
        for g, c in sorted(self.coeffs.items(), key=lambda kv: str(kv[0])):
            lab = "d_" + G.label(g)
            terms.append(lab if c == S.one else f"{S.label(c)}*{lab}")
        return " + ".join(terms)


def group_algebra_multiply(f: GroupAlgebraElement, h: GroupAlgebraElement) -> GroupAlgebraElement:
    """Convolution (f*h)(x) = sum over ab = x of f(a) h(b)."""
    f._check(h)
    S, G = f.semiring, f.group
    out = {}
    for a, ca in f.coeffs.items():
        for b, cb in h.coeffs.items():
            x = G.mul(a, b)
            prod = S.mul(ca, cb)
            out[x] = S.add(out[x], prod) if x in out else prod
    return GroupAlgebraElement(G, S, out)


class MatrixAlgebraElement:
    """n x n matrix with entries in a group algebra S[G]."""

    __slots__ = ("n", "group", "semiring", "entries")

    def __init__(self, group, semiring, entries):
        n = len(entries)
        if any(len(row) != n for row in entries):
            raise DomainError("matrix must be square")
        for row in entries:
            for e in row:
                if e.group != group or e.semiring != semiring:
                    raise DomainError("matrix entries must share group and semiring")
        self.n = n
        self.group = group
        self.semiring = semiring
        self.entries = tuple(tuple(row) for row in entries)

    @classmethod
    def zero(cls, group, semiring, n):
        z = GroupAlgebraElement.zero(group, semiring)
        return cls(group, semiring, [[z] * n for _ in range(n)])

    @classmethod
    def unit(cls, group, semiring, n, i, j, g=None, coeff=None):
        """Matrix unit g E_ij (0-based i, j)."""
        g = group.identity if g is None else g
        z = GroupAlgebraElement.zero(group, semiring)
        rows = [[z] * n for _ in range(n)]
        rows[i][j] = GroupAlgebraElement.delta(group, semiring, g, coeff)
        return cls(group, semiring, rows)

    def __add__(self, other):
        _check_matrices(self, other)
        return MatrixAlgebraElement(self.group, self.semiring,
                                    [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __mul__(self, other):
        return matrix_multiply(self, other)

    def __eq__(self, other):
        if not isinstance(other, MatrixAlgebraElement):
            return NotImplemented
        return self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self):
        return all(e.is_zero() for row in self.entries for e in row)

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.entries]

    def __repr__(self):
        return f"Matrix({self.to_json()})"


def _check_matrices(A, B):
    if A.n != B.n:
        raise DomainError(f"matrix size mismatch: {A.n} vs {B.n}")
    if A.group != B.group or A.semiring != B.semiring:
        raise DomainError("matrices over different group algebras")


def matrix_multiply(A: MatrixAlgebraElement, B: MatrixAlgebraElement) -> MatrixAlgebraElement:
    _check_matrices(A, B)
    n, G, S = A.n, A.group, A.semiring
    zero = GroupAlgebraElement.zero(G, S)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = zero
            for k in range(n):
                a, b = A.entries[i][k], B.entries[k][j]
                if a.coeffs and b.coeffs:
                    acc = acc + group_algebra_multiply(a, b)
            row.append(acc)
        rows.append(row)
    return MatrixAlgebraElement(G, S, rows)


# ---------------------------------------------------------------------------
# Materialization
# ---------------------------------------------------------------------------

class MaterializedAlgebra(FiniteAlgebraTable):
    """A finite convolution algebra S^basis tabulated as a FiniteAlgebraTable.

    Element index encodes the coefficient vector in base |S|, basis position k
    having weight |S|**k. ``coeffs[i]`` is the coefficient vector of element i.
    """

    def __init__(self, carrier, add, mul, zero, one, coeff_table, basis, coeffs, name=None):
        super().__init__(carrier, add, mul, zero, one, name=name)
        self.coeff_table = coeff_table
        self.basis = tuple(basis)
        self.coeffs = coeffs

    def encode(self, vector):
        q = len(self.coeff_table)
        idx = 0
        for k in reversed(range(len(self.basis))):
            idx = idx * q + int(vector[k])
        return idx

    def decode(self, index):
        return tuple(int(c) for c in self.coeffs[index])

    def basis_element(self, k, coeff=None):
        vec = [self.coeff_table.zero] * len(self.basis)
        vec[k] = self.coeff_table.one if coeff is None else coeff
        return self.encode(vec)


def materialize_convolution_algebra(coeff_table: FiniteAlgebraTable, basis, products, unit_basis=None,
                                    cap=DEFAULT_MATERIALIZE_CAP, name=None):
    """Tabulate the algebra with free basis ``basis`` over a finite coefficient semiring.

    ``products`` maps basis position pairs (i, j) to the position of their product;
    absent pairs multiply to zero. ``unit_basis`` lists basis positions summing to
    the multiplicative identity (None for non-unital algebras).
    """
    q, k = len(coeff_table), len(basis)
    size = q ** k
    if size > cap:
        raise SizeCapError(f"algebra would have {q}^{k} = {size} elements, cap is {cap}; "
                           f"raise the cap to at least {size}", required=size, cap=cap)
    if coeff_table.zero != 0:
        raise DomainError("coefficient table must list its zero first")
    plus, times = _vector_ops(coeff_table)
    z = coeff_table.zero
    digits = np.arange(size, dtype=np.int64)
    coeffs = np.empty((size, k), dtype=np.int64)
    for pos in range(k):
        coeffs[:, pos] = digits % q
        digits //= q
    small = coeffs.astype(np.uint8 if q <= 255 else np.int64)
    weights = q ** np.arange(k, dtype=np.int64)
    add = np.zeros((size, size), dtype=np.int64)
    for pos in range(k):
        add += plus(small[:, pos][:, None], small[:, pos][None, :]) * weights[pos]
    by_target = {}
    for (i, j), t in sorted(products.items()):
        by_target.setdefault(t, []).append((i, j))
    mul = np.zeros((size, size), dtype=np.int64)
    for t, pairs in sorted(by_target.items()):
        acc = None
        for i, j in pairs:
            term = times(small[:, i][:, None], small[:, j][None, :])
            acc = term if acc is None else plus(acc, term)
        mul += acc * weights[t]
    one = None
    if unit_basis is not None:
        vec = [z] * k
        for pos in unit_basis:
            vec[pos] = coeff_table.one
        one = int(sum(int(v) * int(w) for v, w in zip(vec, weights)))
    carrier = [_element_label(coeff_table, basis, row) for row in coeffs.tolist()]
    return MaterializedAlgebra(carrier, add, mul, 0, one, coeff_table, basis, coeffs, name=name)


def _vector_ops(table):
    """Elementwise (plus, times) over coefficient index arrays."""
    q = len(table)
    idx = np.arange(q)
    if q == 2 and (table.add == [[0, 1], [1, 1]]).all() and (table.mul == [[0, 0], [0, 1]]).all():
        return np.bitwise_or, np.bitwise_and
    if (table.add == (idx[:, None] + idx[None, :]) % q).all() and (table.mul == (idx[:, None] * idx[None, :]) % q).all():
        return (lambda x, y: (x + y) % q), (lambda x, y: (x * y) % q)
    A, M = table.add, table.mul
    return (lambda x, y: A[x, y]), (lambda x, y: M[x, y])


def _element_label(coeff_table, basis, row):
    terms = []
    for c, b in zip(row, basis):
        if c == coeff_table.zero:
            continue
        terms.append(b if c == coeff_table.one else f"{coeff_table.carrier[c]}*{b}")
    return " + ".join(terms) if terms else "0"


def _coeff_table(semiring):
    if isinstance(semiring, FiniteAlgebraTable):
        return semiring
    return _as_semiring(semiring).table()


def materialize_finite_algebra(semiring, group: FiniteGroupTable, n: int, cap=DEFAULT_MATERIALIZE_CAP):
    """M_n(S[G]) as a FiniteAlgebraTable.

    Basis element (g, i, j) is g E_ij; the result carries ``to_matrix`` and
    ``from_matrix`` to translate between indices and :class:`MatrixAlgebraElement`.
    """
    table = _coeff_table(semiring)
    if n < 1:
        raise DomainError("matrix size must be positive")
    trivial = len(group) == 1
    basis_keys = [(g, i, j) for i in range(n) for j in range(n) for g in group]
    pos = {key: p for p, key in enumerate(basis_keys)}

    def label(g, i, j):
        unit = f"E{i + 1}{j + 1}"
        return unit if trivial else f"{group.label(g)}.{unit}"

    products = {}
    for (g, i, j), p in pos.items():
        for (h, k, l), r in pos.items():
            if j == k:
                products[(p, r)] = pos[(group.mul(g, h), i, l)]
    units = [pos[(group.identity, i, i)] for i in range(n)]
    name = f"M_{n}({table.name or 'S'}[{group.name or 'G'}])"
    alg = materialize_convolution_algebra(table, [label(*key) for key in basis_keys], products,
                                          unit_basis=units, cap=cap, name=name)
    S = TableSemiring(table)

    def to_matrix(index):
        vec = alg.decode(index)
        rows = [[dict() for _ in range(n)] for _ in range(n)]
        for (g, i, j), c in zip(basis_keys, vec):
            if c != table.zero:
                rows[i][j][g] = c
        return MatrixAlgebraElement(group, S, [[GroupAlgebraElement(group, S, d) for d in row] for row in rows])

    def from_matrix(matrix):
        vec = [table.zero] * len(basis_keys)
        for i in range(n):
            for j in range(n):
                for g, c in matrix.entries[i][j].coeffs.items():
                    vec[pos[(g, i, j)]] = c
        return alg.encode(vec)

    alg.to_matrix = to_matrix
    alg.from_matrix = from_matrix
    alg.group = group
    alg.size_n = n
    alg.coeff_semiring = S
    return alg

"""The standard matrix interpretation of ZX diagrams.

Every node becomes a leg-symmetric tensor (Z spiders are diagonal deltas,
X spiders their Hadamard conjugates, H boxes the 2x2 Hadamard matrix) and
every edge an index pairing; boundary ports stay open.  Contraction follows
a greedy plan that keeps intermediate rank small, with a hard cap.  Entries
are exact cyclotomic scalars or complex floats depending on the backend.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .cyclotomic import CycloScalar, lift_modulus, root_of_unity, sqrt_two
from .diagram import (
    Diagram, NodeKind, Phase, PiRational, H, X, Z, _norm_edge,
    ensure_valid, phase_is_exact, phase_radians,
)

EXACT, FLOAT = "exact", "float"
DEFAULT_MAX_RANK = 16


class BackendError(ValueError):
    """Raised when the exact backend is asked to handle a float phase."""


class ResourceLimitError(RuntimeError):
    """Raised when contraction would exceed the configured tensor rank cap."""


# ---------------------------------------------------------------------------
# scalar backends
# ---------------------------------------------------------------------------

class _ExactRing:
    def __init__(self, modulus: int):
        self.modulus = modulus
        self.zero = CycloScalar.zero(modulus)
        self.one = CycloScalar.one(modulus)
        self._inv_sqrt2 = sqrt_two(modulus).scale(Fraction(1, 2))
        self._inv_pows: dict[int, CycloScalar] = {0: self.one, 1: self._inv_sqrt2}

    def phase(self, phase: Phase) -> CycloScalar:
        if not isinstance(phase, PiRational):
            raise BackendError("exact backend requires exact phases")
        return root_of_unity(phase.num, phase.den, self.modulus)

    def inv_sqrt2_pow(self, k: int) -> CycloScalar:
        out = self._inv_pows.get(k)
        if out is None:
            out = self.inv_sqrt2_pow(k - 1) * self._inv_sqrt2
            self._inv_pows[k] = out
        return out

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a


_RING_CACHE: dict[int, _ExactRing] = {}


def _exact_ring(modulus: int) -> _ExactRing:
    ring = _RING_CACHE.get(modulus)
    if ring is None:
        ring = _RING_CACHE[modulus] = _ExactRing(modulus)
    return ring


class _FloatRing:
    modulus = None
    zero = complex(0)
    one = complex(1)

    @staticmethod
    def phase(phase: Phase) -> complex:
        return cmath.exp(1j * phase_radians(phase))

    @staticmethod
    def inv_sqrt2_pow(k: int) -> complex:
        return complex(2 ** (-k / 2.0))

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a


def choose_modulus(d: Diagram) -> int:
    """Smallest modulus M = lcm(8, 2*den(phase) for all spider phases)."""
    M = 8
    for p in d.phases():
        if not phase_is_exact(p):
            raise BackendError("diagram has a float phase; exact backend unavailable")
        M = math.lcm(M, 2 * p.den)
    return M


_FLOAT_RING = _FloatRing()


def _ring_for(d: Diagram, backend: str):
    if backend == EXACT:
        return _exact_ring(choose_modulus(d))
    if backend == FLOAT:
        return _FLOAT_RING
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# tensors
# ---------------------------------------------------------------------------

class _Tensor:
    __slots__ = ("axes", "data")

    def __init__(self, axes: list[str], data: list):
        self.axes = axes
        self.data = data

    @property
    def rank(self) -> int:
        return len(self.axes)


def _spider_tensor_fresh(kind_name: str, phase: Phase, degree: int, ring) -> tuple:
    ph = ring.phase(phase)
    size = 1 << degree
    if kind_name == Z:
        if degree == 0:
            return (ring.add(ring.one, ph),)
        data = [ring.zero] * size
        data[0] = ring.one
        data[size - 1] = ph
        return tuple(data)
    # X spider: (1/sqrt2)^degree * (1 + e^{ia} * (-1)^popcount)
    scale = ring.inv_sqrt2_pow(degree)
    plus = ring.mul(scale, ring.add(ring.one, ph))
    minus = ring.mul(scale, ring.add(ring.one, ring.neg(ph)))
    return tuple(plus if bin(i).count("1") % 2 == 0 else minus for i in range(size))


_TENSOR_CACHE: dict[tuple, tuple] = {}


def _spider_tensor(kind: NodeKind, degree: int, ring) -> tuple:
    key = (ring.modulus, kind.kind, kind.phase, degree)
    data = _TENSOR_CACHE.get(key)
    if data is None:
        data = _TENSOR_CACHE[key] = _spider_tensor_fresh(kind.kind, kind.phase, degree, ring)
    return data


def _hbox_tensor(ring) -> tuple:
    key = (ring.modulus, H, None, 2)
    data = _TENSOR_CACHE.get(key)
    if data is None:
        s = ring.inv_sqrt2_pow(1)
        data = _TENSOR_CACHE[key] = (s, s, s, ring.neg(s))
    return data


def _node_axes(d: Diagram) -> tuple[dict[str, list[str]], list[Optional[_Tensor]]]:
    """Axis names for each node's legs plus delta tensors for port-port wires.

    Edge k between two nodes shares axis ``e<k>``; an edge end at a port is
    named after the port so the open axis is identifiable.
    """
    ports = d.ports()
    node_axes: dict[str, list[str]] = {n: [] for n in d.nodes}
    extras: list[_Tensor] = []
    for k, (a, b) in enumerate(d.edges):
        a_port, b_port = a in ports, b in ports
        if a_port and b_port:
            extras.append(("delta", a, b))  # identity tensor added at build time
        elif a_port:
            node_axes[b].append(f"p:{a}")
        elif b_port:
            node_axes[a].append(f"p:{b}")
        else:
            node_axes[a].append(f"e{k}")
            node_axes[b].append(f"e{k}")
    return node_axes, extras


def _strides(axes: list[str]) -> dict[str, int]:
    n = len(axes)
    out = {}
    for pos, a in enumerate(axes):
        out[a] = 1 << (n - 1 - pos)
    return out


def _self_trace(t: _Tensor, ring) -> _Tensor:
    while True:
        dup = None
        seen = {}
        for pos, a in enumerate(t.axes):
            if a in seen:
                dup = (seen[a], pos)
                break
            seen[a] = pos
        if dup is None:
            return t
        i, j = dup
        n = len(t.axes)
        si, sj = 1 << (n - 1 - i), 1 << (n - 1 - j)
        rest = [a for pos, a in enumerate(t.axes) if pos not in (i, j)]
        rest_strides = [1 << (n - 1 - pos) for pos in range(n) if pos not in (i, j)]
        m = len(rest)
        data = [ring.zero] * (1 << m)
        for idx in range(1 << m):
            base = 0
            for bit in range(m):
                if (idx >> (m - 1 - bit)) & 1:
                    base += rest_strides[bit]
            data[idx] = ring.add(t.data[base], t.data[base + si + sj])
        t = _Tensor(rest, data)


def _bases(free_axes: list[str], strides: dict[str, int]) -> list[int]:
    """base[i] = flat offset of bit pattern i over free_axes (bit 0 = last axis)."""
    m = len(free_axes)
    out = [0] * (1 << m)
    axis_strides = [strides[a] for a in free_axes]
    for i in range(1, 1 << m):
        low = i & -i
        bit = low.bit_length() - 1
        out[i] = out[i ^ low] + axis_strides[m - 1 - bit]
    return out


def _contract_pair(t1: _Tensor, t2: _Tensor, ring, max_rank: int) -> _Tensor:
    shared = [a for a in t1.axes if a in set(t2.axes)]
    f1 = [a for a in t1.axes if a not in shared]
    f2 = [a for a in t2.axes if a not in shared]
    if len(f1) + len(f2) > max_rank:
        raise ResourceLimitError(
            f"contraction result rank {len(f1) + len(f2)} exceeds cap {max_rank}")
    s1, s2 = _strides(t1.axes), _strides(t2.axes)
    b1, b2 = _bases(f1, s1), _bases(f2, s2)
    sh1, sh2 = _bases(shared, s1), _bases(shared, s2)
    n_f2 = 1 << len(f2)
    data = [ring.zero] * ((1 << len(f1)) * n_f2)
    add, mul = ring.add, ring.mul
    d1, d2 = t1.data, t2.data
    for i1, base1 in enumerate(b1):
        row = i1 * n_f2
        pairs = [(v1, o2) for o1, o2 in zip(sh1, sh2) if (v1 := d1[base1 + o1])]
        for i2, base2 in enumerate(b2):
            acc = None
            for v1, o2 in pairs:
                v2 = d2[base2 + o2]
                if not v2:
                    continue
                term = mul(v1, v2)
                acc = term if acc is None else add(acc, term)
            if acc is not None:
                data[row + i2] = acc
    return _Tensor(f1 + f2, data)


@dataclass
class ContractionPlan:
    """Pairwise contraction order (indices into a growing tensor list)."""

    steps: list[tuple[int, int]]
    peak_rank: int


def _plan_greedy(axes_list: list[list[str]], max_rank: int) -> ContractionPlan:
    """Greedy pairwise order minimizing intermediate rank."""
    pool: dict[int, set[str]] = {i: set(a) for i, a in enumerate(axes_list)}
    # duplicated axes within one tensor resolve to the deduplicated open set
    steps: list[tuple[int, int]] = []
    for i, axes in enumerate(axes_list):
        if len(axes) > max_rank:
            raise ResourceLimitError(
                f"node tensor rank {len(axes)} exceeds cap {max_rank}")
    peak = max((len(s) for s in pool.values()), default=0)
    next_id = len(axes_list)
    while len(pool) > 1:
        best = None
        ids = sorted(pool)
        for ii, i in enumerate(ids):
            for j in ids[ii + 1:]:
                shared = pool[i] & pool[j]
                rank = len(pool[i] | pool[j]) - len(shared)
                key = (0 if shared else 1, rank, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        _, i, j = best
        rank = len((pool[i] | pool[j]) - (pool[i] & pool[j]))
        if rank > max_rank:
            raise ResourceLimitError(f"planned rank {rank} exceeds cap {max_rank}")
        peak = max(peak, rank)
        pool[next_id] = (pool[i] | pool[j]) - (pool[i] & pool[j])
        steps.append((i, j))
        del pool[i], pool[j]
        next_id += 1
    return ContractionPlan(steps, peak)


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

Scalar = Union[CycloScalar, complex]


@dataclass
class SemanticMatrix:
    """A 2^m x 2^n matrix; row bits are outputs (output 0 most significant)."""

    entries: list[list[Scalar]]
    n_inputs: int
    m_outputs: int
    backend: str
    modulus: Optional[int] = None

    @property
    def rows(self) -> int:
        return 1 << self.m_outputs

    @property
    def cols(self) -> int:
        return 1 << self.n_inputs

    def entry(self, r: int, c: int) -> Scalar:
        return self.entries[r][c]

    def is_scalar(self) -> bool:
        return self.n_inputs == 0 and self.m_outputs == 0

    def scalar(self) -> Scalar:
        if not self.is_scalar():
            raise ValueError("matrix is not 1x1")
        return self.entries[0][0]

    def to_complex(self) -> list[list[complex]]:
        if self.backend == FLOAT:
            return [list(row) for row in self.entries]
        return [[e.to_complex() for e in row] for row in self.entries]

    def matmul(self, other: "SemanticMatrix") -> "SemanticMatrix":
        if other.m_outputs != self.n_inputs:
            raise ValueError("matrix composition dimension mismatch")
        a, b = _align(self, other)
        zero = CycloScalar.zero(a.modulus) if a.backend == EXACT else complex(0)
        ents = []
        for r in range(a.rows):
            row = []
            for c in range(b.cols):
                acc = zero
                for k in range(a.cols):
                    acc = acc + a.entries[r][k] * b.entries[k][c]
                row.append(acc)
            ents.append(row)
        return SemanticMatrix(ents, b.n_inputs, a.m_outputs, a.backend, a.modulus)

    def kron(self, other: "SemanticMatrix") -> "SemanticMatrix":
        a, b = _align(self, other)
        ents = []
        for r1 in range(a.rows):
            for r2 in range(b.rows):
                row = []
                for c1 in range(a.cols):
                    for c2 in range(b.cols):
                        row.append(a.entries[r1][c1] * b.entries[r2][c2])
                ents.append(row)
        return SemanticMatrix(ents, a.n_inputs + b.n_inputs, a.m_outputs + b.m_outputs,
                              a.backend, a.modulus)

    def entry_str(self, r: int, c: int, digits: int = 12) -> str:
        e = self.entries[r][c]
        if self.backend == EXACT:
            return str(e)
        sign = "+" if e.imag >= 0 else "-"
        return f"{e.real:.{digits}g}{sign}{abs(e.imag):.{digits}g}i"


def _align(a: SemanticMatrix, b: SemanticMatrix) -> tuple[SemanticMatrix, SemanticMatrix]:
    if a.backend != b.backend:
        raise ValueError("cannot combine exact and float matrices")
    if a.backend == EXACT and a.modulus != b.modulus:
        M = math.lcm(a.modulus, b.modulus)
        return _lift_matrix(a, M), _lift_matrix(b, M)
    return a, b


def _lift_matrix(m: SemanticMatrix, M: int) -> SemanticMatrix:
    if m.modulus == M:
        return m
    ents = [[lift_modulus(e, M) for e in row] for row in m.entries]
    return SemanticMatrix(ents, m.n_inputs, m.m_outputs, m.backend, M)


# ---------------------------------------------------------------------------
# interpretation
# ---------------------------------------------------------------------------

def node_tensor(kind: NodeKind, n_in: int, n_out: int, backend: str = EXACT,
                modulus: Optional[int] = None) -> SemanticMatrix:
    """The generator matrix for a single spider or H box."""
    if kind.kind == H and (n_in, n_out) != (1, 1):
        raise ValueError("H box is a 1 -> 1 generator")
    if backend == EXACT:
        M = modulus
        if M is None:
            M = 8 if (kind.phase is None or not phase_is_exact(kind.phase)) else math.lcm(8, 2 * kind.phase.den)
        ring = _ExactRing(M)
    else:
        ring = _FloatRing()
    degree = n_in + n_out
    flat = _hbox_tensor(ring) if kind.kind == H else _spider_tensor(kind, degree, ring)
    # legs ordered inputs then outputs; symmetric tensors make the order moot
    ents = []
    for r in range(1 << n_out):
        row = []
        for c in range(1 << n_in):
            row.append(flat[(c << n_out) | r])
        ents.append(row)
    return SemanticMatrix(ents, n_in, n_out, backend, ring.modulus)


def _split_high_degree(d: Diagram, limit: int) -> Diagram:
    """Spiders of degree above ``limit`` become chains of smaller spiders
    linked through phase-0 copies of themselves (an exact identity)."""
    out = d
    fresh = 0
    while True:
        target = None
        for n, kind in out.nodes.items():
            if kind.kind != H and out.degree(n) > limit:
                target = n
                break
        if target is None:
            return out
        if out is d:
            out = d.copy()
        helper = f"{target}~deg{fresh}"
        while helper in out.all_ids():
            fresh += 1
            helper = f"{target}~deg{fresh}"
        fresh += 1
        out.nodes[helper] = NodeKind(out.nodes[target].kind, PiRational(0))
        keep = limit - 1
        seen = 0
        edges = []
        for a, b in out.edges:
            ends = []
            for x in (a, b):
                if x == target:
                    seen += 1
                    ends.append(target if seen <= keep else helper)
                else:
                    ends.append(x)
            edges.append(_norm_edge(ends[0], ends[1]))
        out.edges = edges
        out.add_edge(target, helper)
    return out


def plan_contraction(d: Diagram, max_rank: int = DEFAULT_MAX_RANK) -> ContractionPlan:
    d = _split_high_degree(d, max(3, min(8, max_rank)))
    node_axes, extras = _node_axes(d)
    axes_list = [node_axes[n] for n in sorted(d.nodes)]
    for marker in extras:
        axes_list.append([f"p:{marker[1]}", f"p:{marker[2]}"])
    if not axes_list:
        return ContractionPlan([], 0)
    return _plan_greedy(axes_list, max_rank)


def interpret(d: Diagram, backend: str = EXACT, max_rank: int = DEFAULT_MAX_RANK) -> SemanticMatrix:
    """Contract the diagram to its 2^m x 2^n standard-interpretation matrix."""
    ensure_valid(d)
    ring = _ring_for(d, backend)
    d = _split_high_degree(d, max(3, min(8, max_rank)))
    node_axes, extras = _node_axes(d)

    node_order = sorted(d.nodes)
    axes_list = [node_axes[n] for n in node_order]
    for marker in extras:
        _, a, b = marker
        if a == b:
            raise BackendError("a boundary port cannot loop onto itself")
        axes_list.append([f"p:{a}", f"p:{b}"])
    plan = _plan_greedy(axes_list, max_rank) if axes_list else None

    tensors: list[_Tensor] = []
    for n in node_order:
        kind = d.nodes[n]
        degree = len(node_axes[n])  # self-loop axes already appear twice
        if kind.kind == H:
            data = _hbox_tensor(ring)
        else:
            data = _spider_tensor(kind, degree, ring)
        tensors.append(_self_trace(_Tensor(list(node_axes[n]), data), ring))
    for marker in extras:
        _, a, b = marker
        tensors.append(_Tensor([f"p:{a}", f"p:{b}"],
                               [ring.one, ring.zero, ring.zero, ring.one]))

    if tensors:
        pool: dict[int, _Tensor] = dict(enumerate(tensors))
        next_id = len(tensors)
        for i, j in plan.steps:
            pool[next_id] = _contract_pair(pool.pop(i), pool.pop(j), ring, max_rank)
            next_id += 1
        final = pool.popitem()[1]
    else:
        final = _Tensor([], [ring.one])

    # order open axes: inputs then outputs, then reshape to a matrix
    want = [f"p:{p}" for p in d.inputs] + [f"p:{p}" for p in d.outputs]
    if sorted(want) != sorted(final.axes):
        raise AssertionError("open axes do not match boundary ports")
    strides = _strides(final.axes)
    n, m = d.n_inputs, d.n_outputs
    ents = []
    for r in range(1 << m):
        row = []
        for c in range(1 << n):
            flat = 0
            for bit in range(n):
                if (c >> (n - 1 - bit)) & 1:
                    flat += strides[f"p:{d.inputs[bit]}"]
            for bit in range(m):
                if (r >> (m - 1 - bit)) & 1:
                    flat += strides[f"p:{d.outputs[bit]}"]
            row.append(final.data[flat])
        ents.append(row)
    return SemanticMatrix(ents, n, m, backend, ring.modulus)


# ---------------------------------------------------------------------------
# graphical invariants
# ---------------------------------------------------------------------------

def _invariant(d: Diagram, colour: str) -> int:
    count = 0
    for n, kind in d.nodes.items():
        if kind.kind == H:
            count += 1
        elif kind.kind == colour and d.degree(n) % 2 == 1:
            count += 1
    return count % 2


def invariant_r(d: Diagram) -> int:
    """Parity of (# odd-degree X spiders) + (# H boxes)."""
    return _invariant(d, X)


def invariant_g(d: Diagram) -> int:
    """Parity of (# odd-degree Z spiders) + (# H boxes)."""
    return _invariant(d, Z)


# ---------------------------------------------------------------------------
# comparison
# ---------------------------------------------------------------------------

@dataclass
class CompareResult:
    equal: bool
    witness: Optional[tuple[int, int, str, str]] = None

    def __bool__(self) -> bool:
        return self.equal


def matrix_compare(a: SemanticMatrix, b: SemanticMatrix, tol: float = 1e-9) -> CompareResult:
    """Exact equality for exact backends, entrywise |delta| <= tol otherwise."""
    if (a.n_inputs, a.m_outputs) != (b.n_inputs, b.m_outputs):
        raise ValueError("matrix dimensions differ")
    if a.backend == EXACT and b.backend == EXACT:
        aa, bb = _align(a, b)
        for r in range(aa.rows):
            for c in range(aa.cols):
                if aa.entries[r][c] != bb.entries[r][c]:
                    return CompareResult(False, (r, c, str(aa.entries[r][c]), str(bb.entries[r][c])))
        return CompareResult(True)
    ca, cb = a.to_complex(), b.to_complex()
    for r in range(len(ca)):
        for c in range(len(ca[0])):
            if abs(ca[r][c] - cb[r][c]) > tol:
                return CompareResult(False, (r, c, str(ca[r][c]), str(cb[r][c])))
    return CompareResult(True)


def is_zero(a: SemanticMatrix, tol: float = 1e-9) -> bool:
    if a.backend == EXACT:
        return all(e.is_zero() for row in a.entries for e in row)
    return all(abs(e) <= tol for row in a.entries for e in row)

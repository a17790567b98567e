"""Disk-count differentials on nice diagrams and GF(2) homology.

On a nice diagram (every unmarked region a bigon or square) the
differential counts embedded empty disks: connected domains with all
multiplicities 0 or 1 whose corners are convex and sit exactly at the
points where the two generators differ, avoiding the flavor's forbidden
basepoints.  The link flavor forbids every basepoint; the knot flavor
additionally allows disks across the z-basepoint of the axis component,
which is sound when the region holding it is itself a bigon or square
(checked, and rejected otherwise).

Candidate domains for a generator pair are the particular solution of
the corner system shifted by the full-curve lattice; multiplicity
bounds make the search exact and finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DifferentialNotSquareZeroError,
    InvalidDiagramError,
    NotAdmissibleError,
    NotNiceError,
)
from .diagram import validate
from .gradings import (
    Domain,
    GradingTable,
    check_admissibility,
    domain_family,
    enumerate_generators,
    maslov_index,
    relative_gradings,
)

LINK = "link"
KNOT = "knot"


def _axis_z(d, axis):
    comps = {c.name: c for c in d.link_components}
    if axis not in comps:
        raise InvalidDiagramError(f"no link component named {axis!r}")
    comp = comps[axis]
    if len(comp.pairs) != 1:
        raise InvalidDiagramError(
            f"axis component {axis!r} must carry exactly one basepoint pair")
    return comp.pairs[0][0]


def forbidden_basepoints(d, flavor, axis="U"):
    if flavor == LINK:
        return frozenset(d.basepoints)
    if flavor == KNOT:
        return frozenset(set(d.basepoints) - {_axis_z(d, axis)})
    raise ValueError(f"unknown flavor {flavor!r}")


def check_niceness(d, flavor, axis="U"):
    """Every region a disk must cross freely must be a bigon or square.

    Returns {"nice": bool, "offending": [region ids]}.  Marked regions
    (those holding a basepoint the flavor forbids) are exempt.
    """
    forbidden = forbidden_basepoints(d, flavor, axis)
    marked = {d.basepoints[b].region for b in forbidden}
    offending = []
    for r in d.regions:
        if r.id in marked:
            continue
        if len(r.corners) not in (2, 4):
            offending.append(r.id)
    return {"nice": not offending, "offending": offending}


@dataclass
class GradedComplex:
    diagram: object
    flavor: str
    axis: str
    generators: tuple
    table: GradingTable
    matrix: np.ndarray            # GF(2); entry [target, source]
    disk_counts: dict             # (x, y) -> raw embedded disk count
    forbidden: frozenset
    index: dict = field(default_factory=dict)

    def __post_init__(self):
        self.index = {g: i for i, g in enumerate(self.generators)}

    @property
    def components(self):
        return [c.name for c in self.diagram.link_components]

    @property
    def block_components(self):
        """Components whose Alexander grading the differential preserves."""
        if self.flavor == LINK:
            return self.components
        return [c for c in self.components if c != self.axis]

    def block_grading(self, gen):
        return tuple(self.table.alexander[gen][c] for c in self.block_components)

    def maslov(self, gen):
        return self.table.maslov[gen]

    def with_table(self, table):
        return GradedComplex(self.diagram, self.flavor, self.axis,
                             self.generators, table, self.matrix,
                             self.disk_counts, self.forbidden)

    def vector(self, gens):
        """GF(2) coordinate vector of a formal sum of generators."""
        v = np.zeros(len(self.generators), dtype=np.uint8)
        for g in gens:
            v[self.index[g]] ^= 1
        return v


def _pivot_columns(vecs):
    """Column indices making the given integer row vectors invertible."""
    rows = [[Fraction(v) for v in vec] for vec in vecs]
    k = len(rows)
    cols = []
    r = 0
    work = [row[:] for row in rows]
    n = len(rows[0]) if rows else 0
    for c in range(n):
        piv = next((i for i in range(r, k) if work[i][c] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][c]
        work[r] = [t * inv for t in work[r]]
        for i in range(k):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        cols.append(c)
        r += 1
        if r == k:
            break
    assert r == k, "full-curve lattice basis is degenerate"
    return cols


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _invert_fraction_matrix(rows):
    """Inverse of a small square Fraction matrix by Gauss-Jordan."""
    k = len(rows)
    A = [row[:] + [Fraction(int(i == j)) for j in range(k)]
         for i, row in enumerate(rows)]
    for c in range(k):
        piv = next(r for r in range(c, k) if A[r][c] != 0)
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [t * inv for t in A[c]]
        for r in range(k):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[k:] for row in A]


class _DiskCounter:
    """Enumerates embedded empty bigons and squares between generators."""

    def __init__(self, d, forbidden):
        self.d = d
        self.forbidden_regions = {d.basepoints[b].region for b in forbidden}
        self.slots = {}
        for r in d.regions:
            for pid, q in r.corners:
                self.slots.setdefault(pid, {})[q] = r.id
        self.adjacent_pairs = ({0, 1}, {1, 2}, {2, 3}, {0, 3})
        # region adjacency for connectivity of supports
        self.neighbors = {}
        for arc in d.arcs:
            a = d.arc_side[(arc, 1)]
            b = d.arc_side[(arc, -1)]
            self.neighbors.setdefault(a, set()).add(b)
            self.neighbors.setdefault(b, set()).add(a)
        from .gradings import full_curve_lattice
        self.kernel = full_curve_lattice(d)
        k = len(self.kernel)
        self.pivot_cols = _pivot_columns(self.kernel) if self.kernel else []
        if k:
            # Exact inverse of the pivot block as an integer adjugate and a
            # common denominator, so candidate coefficients come from one
            # int64 matrix product per generator pair.
            from fractions import Fraction as F
            block = [[F(self.kernel[i][c]) for i in range(k)]
                     for c in self.pivot_cols]
            inv = _invert_fraction_matrix(block)
            den = 1
            for row in inv:
                for v in row:
                    den = den * v.denominator // _gcd(den, v.denominator)
            self._inv_num = np.array(
                [[int(v * den) for v in row] for row in inv], dtype=np.int64)
            self._inv_den = den
            self._K = np.array(self.kernel, dtype=np.int64)
            self._combos = np.array(
                list(itertools.product((0, 1), repeat=k)), dtype=np.int64)

    def candidate_domains(self, x, y):
        """All domains from x to y with multiplicities in {0, 1}."""
        d = self.d
        vec, kernel = domain_family(d, x, y)
        if not kernel:
            doms = [vec] if all(v in (0, 1) for v in vec) else []
        else:
            v = np.asarray(vec, dtype=np.int64)
            targets = self._combos - v[self.pivot_cols]
            nums = targets @ self._inv_num.T
            good = (nums % self._inv_den == 0).all(axis=1)
            coeffs = nums[good] // self._inv_den
            cands = v + coeffs @ self._K
            keep = ((cands == 0) | (cands == 1)).all(axis=1)
            doms = [list(map(int, row)) for row in cands[keep]]
        out = []
        seen = set()
        for cand in doms:
            key = tuple(cand)
            if key in seen:
                continue
            seen.add(key)
            mults = {d.regions[i].id: v for i, v in enumerate(cand) if v}
            out.append(Domain(d, mults, x, y))
        return out

    def is_embedded_disk(self, dom, moving):
        d = self.d
        support = set(dom.mults)
        if not support:
            return False
        for rid in self.forbidden_regions:
            if rid in support:
                return False
        untouched = set(dom.from_gen) - moving
        for pid in d.intersections:
            covered = {q for q in range(4)
                       if self.slots.get(pid, {}).get(q) in support}
            if pid in moving:
                if len(covered) != 1:
                    return False
            elif pid in untouched:
                if covered:
                    return False
            else:
                if len(covered) == 1 or len(covered) == 3:
                    return False
                if len(covered) == 2 and covered not in self.adjacent_pairs:
                    return False
        # connected support
        seen = {next(iter(support))}
        stack = [next(iter(support))]
        while stack:
            r = stack.pop()
            for nb in self.neighbors.get(r, ()):
                if nb in support and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != support:
            return False
        return maslov_index(d, dom) == 1

    def count(self, x, y):
        """Number of embedded empty disks from x to y."""
        moving = (set(x) | set(y)) - (set(x) & set(y))
        k = len(set(x) - set(y))
        if k not in (1, 2):
            return 0
        total = 0
        for dom in self.candidate_domains(x, y):
            if self.is_embedded_disk(dom, moving):
                total += 1
        return total


def differential(d, flavor, axis="U"):
    """Chain complex of the requested flavor with its GF(2) differential."""
    rep = validate(d)
    if not rep.passed:
        raise InvalidDiagramError(
            f"diagram invalid: {rep.failures[0]['detail']}")
    nice = check_niceness(d, flavor, axis)
    if not nice["nice"]:
        raise NotNiceError(
            f"regions {nice['offending']} are neither bigons nor squares",
            offending=nice["offending"])
    forbidden = forbidden_basepoints(d, flavor, axis)
    adm = check_admissibility(d, forbidden)
    if not adm.admissible:
        raise NotAdmissibleError(
            "diagram is not weakly admissible for this flavor",
            witness=adm.witness.mults if adm.witness else None)

    gens = enumerate_generators(d)
    table = relative_gradings(d, gens)
    counter = _DiskCounter(d, forbidden)
    n = len(gens)
    matrix = np.zeros((n, n), dtype=np.uint8)
    disk_counts = {}
    index = {g: i for i, g in enumerate(gens)}

    for x in gens:
        for y in _neighbors(d, gens, x):
            c = counter.count(x, y)
            if c:
                disk_counts[(x, y)] = c
                if c % 2:
                    matrix[index[y], index[x]] ^= 1

    cx = GradedComplex(d, flavor, axis, tuple(gens), table, matrix,
                       disk_counts, forbidden)
    _check_square_zero(cx)
    _check_grading_behavior(cx)
    return cx


def _neighbors(d, gens, x):
    """Generators differing from x in one or two alpha coordinates."""
    out = []
    xs = set(x)
    for y in gens:
        if y == x:
            continue
        diff = sum(1 for a, b in zip(x, y) if a != b)
        if diff in (1, 2):
            out.append(y)
    return out


def _check_square_zero(cx):
    sq = (cx.matrix.astype(np.uint16) @ cx.matrix.astype(np.uint16)) % 2
    if sq.any():
        bad = int(np.nonzero(sq.any(axis=0))[0][0])
        raise DifferentialNotSquareZeroError(
            f"d^2 != 0 on generator {cx.generators[bad]}",
            generator=cx.generators[bad])


def _check_grading_behavior(cx):
    table = cx.table
    for (x, y), c in cx.disk_counts.items():
        if table.maslov[x] - table.maslov[y] != 1:
            raise InvalidDiagramError(
                f"disk from {x} to {y} does not drop Maslov by 1")
        for comp in cx.block_components:
            if table.alexander[x][comp] != table.alexander[y][comp]:
                raise InvalidDiagramError(
                    f"disk from {x} to {y} changes the {comp} grading")


# ---------------------------------------------------------------------------
# Homology
# ---------------------------------------------------------------------------


@dataclass
class HomologyBlock:
    alexander: dict     # component -> Fraction (block components only)
    maslov: int
    rank: int
    representatives: list  # of tuples of generator tuples (GF(2) sums)


@dataclass
class HomologyResult:
    complex: GradedComplex
    blocks: list

    @property
    def total_rank(self):
        return sum(b.rank for b in self.blocks)

    def rank_by_alexander(self):
        out = {}
        for b in self.blocks:
            key = tuple(sorted(b.alexander.items()))
            out[key] = out.get(key, 0) + b.rank
        return out

    def rank_at(self, **gradings):
        total = 0
        for b in self.blocks:
            if all(b.alexander.get(k) == v for k, v in gradings.items()):
                total += b.rank
        return total

    def as_payload(self):
        return [
            {
                "gradings": {k: _frac_str(v) for k, v in sorted(b.alexander.items())},
                "maslov_rel": b.maslov,
                "rank": b.rank,
                "representatives": [
                    ["+".join("".join(g) for g in rep)] for rep in b.representatives
                ],
            }
            for b in self.blocks
        ]


def _frac_str(v):
    f = Fraction(v)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def homology(cx):
    """Graded GF(2) homology with representative cycles per block."""
    from .linalg import Gf2Space, gf2_kernel

    _check_square_zero(cx)
    gens = cx.generators
    by_block = {}
    for g in gens:
        key = (cx.block_grading(g), cx.maslov(g))
        by_block.setdefault(key, []).append(g)

    blocks = []
    for (alex, m), block_gens in sorted(by_block.items()):
        cols = [cx.index[g] for g in block_gens]
        src_above = [cx.index[g] for g in by_block.get((alex, m + 1), [])]
        # differential out of this block (restricted to its rows' complement
        # is zero by gradedness; use full rows for safety)
        mat = cx.matrix[:, cols]
        kernel = gf2_kernel(mat)
        boundaries = []
        for j in src_above:
            col = cx.matrix[:, j]
            boundaries.append([col[cx.index[g]] for g in block_gens])
        bspace = Gf2Space(boundaries or None, width=len(block_gens))
        reps = []
        count = 0
        added = bspace
        for v in kernel:
            residue = added.reduce(v)
            if residue.any():
                added = added.extended([v])
                count += 1
                rep = tuple(block_gens[i] for i in np.nonzero(v)[0])
                reps.append(rep)
        rank = count
        if rank:
            blocks.append(HomologyBlock(
                {c: a for c, a in zip(cx.block_components, alex)},
                m, rank, reps))
    return HomologyResult(cx, blocks)

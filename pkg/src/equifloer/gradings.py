"""Generators, domains, the Lipshitz index, and relative gradings.

A generator picks one intersection point per alpha curve so that every
beta curve is used once.  A domain is an integer chain of regions whose
boundary runs along alpha curves from one generator to the other and
back along beta curves; domains are found by solving the integer corner
system on region multiplicities.

The Maslov index of a domain is computed combinatorially: the Euler
measure of a 2k-cornered disk region is 1 - k/2, and each generator
point contributes the average of the four quadrant multiplicities
around it.  Relative Maslov and Alexander gradings follow from the
index and the basepoint counts of any connecting domain; the values do
not depend on the choice of domain because every full-curve-boundary
chain has index twice its total w-multiplicity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidDiagramError, NoDomainError, NonDiskRegionError
from .linalg import SmithSolver, integer_kernel, rational_consistent
from .diagram import ALPHA, BETA

# A generator is a tuple of intersection ids, entry i on alpha curve i.


def enumerate_generators(d):
    """All generators, sorted lexicographically by their point tuples."""
    by_pair = {}
    for p in d.intersections.values():
        by_pair.setdefault((p.alpha, p.beta), []).append(p.id)
    n = d.alpha_count
    out = []

    def extend(i, used_beta, chosen):
        if i == n:
            out.append(tuple(chosen))
            return
        for j in range(d.beta_count):
            if j in used_beta:
                continue
            for pid in by_pair.get((i, j), ()):
                used_beta.add(j)
                chosen.append(pid)
                extend(i + 1, used_beta, chosen)
                chosen.pop()
                used_beta.discard(j)

    extend(0, set(), [])
    out.sort()
    return out


@dataclass
class Domain:
    """Integer multiplicity chain from one generator to another."""

    diagram: object
    mults: dict  # region id -> int
    from_gen: tuple
    to_gen: tuple

    def mult(self, rid):
        return self.mults.get(rid, 0)

    def n(self, basepoint_id):
        return self.mult(self.diagram.basepoints[basepoint_id].region)

    def basepoint_sum(self, kind=None, component=None, exclude=()):
        total = 0
        for b in self.diagram.basepoints.values():
            if b.id in exclude:
                continue
            if kind is not None and b.kind != kind:
                continue
            if component is not None and \
                    self.diagram.component_of_basepoint.get(b.id) != component:
                continue
            total += self.n(b.id)
        return total

    def vector(self):
        return [self.mult(r.id) for r in self.diagram.regions]

    def __add__(self, other):
        assert self.diagram is other.diagram
        out = dict(self.mults)
        for r, m in other.mults.items():
            out[r] = out.get(r, 0) + m
        out = {r: m for r, m in out.items() if m}
        return Domain(self.diagram, out, self.from_gen, other.to_gen)

    def scaled(self, c):
        return Domain(self.diagram, {r: c * m for r, m in self.mults.items()},
                      self.from_gen, self.to_gen)


def _corner_cache(d):
    cache = getattr(d, "_corner_cache", None)
    if cache is None:
        cache = {}
        d._corner_cache = cache
    return cache


def _arc_row(d, arc):
    """Row vector of the boundary coefficient of an arc: left - right."""
    F = len(d.regions)
    row = [0] * F
    row[d.region_index[d.arc_side[(arc, 1)]]] += 1
    row[d.region_index[d.arc_side[(arc, -1)]]] -= 1
    return row


def _corner_system(d):
    """Constraint matrix of the corner conditions, one pair per point.

    Row order: for each point id (sorted), the alpha condition then the
    beta condition.  The right-hand side for a domain from x to y is
    built by `_corner_rhs`.
    """
    cache = _corner_cache(d)
    if "system" in cache:
        return cache["system"]
    rows = []
    points = sorted(d.intersections)
    for pid in points:
        ai, ap = d.alpha_pos[pid]
        bj, bp = d.beta_pos[pid]
        la = len(d.alpha_orders[ai])
        lb = len(d.beta_orders[bj])
        in_a = _arc_row(d, (ALPHA, ai, (ap - 1) % la))
        out_a = _arc_row(d, (ALPHA, ai, ap))
        rows.append([a - b for a, b in zip(in_a, out_a)])
        in_b = _arc_row(d, (BETA, bj, (bp - 1) % lb))
        out_b = _arc_row(d, (BETA, bj, bp))
        rows.append([a - b for a, b in zip(in_b, out_b)])
    cache["system"] = (points, rows)
    return cache["system"]


def _corner_rhs(points, x, y):
    # Sign convention fixed so that positive index-one disks are the
    # differentials (Maslov drops from x to y); with interior-on-left
    # region walks this makes alpha boundaries run x -> y.
    xs, ys = set(x), set(y)
    rhs = []
    for pid in points:
        rhs.append((pid in xs) - (pid in ys))
        rhs.append((pid in ys) - (pid in xs))
    return rhs


def _corner_solver(d):
    cache = _corner_cache(d)
    if "solver" not in cache:
        _, rows = _corner_system(d)
        cache["solver"] = SmithSolver(rows)
    return cache["solver"]


def full_curve_lattice(d):
    """Basis of chains whose boundary is a combination of full curves.

    Contains the disks bounded by each curve and the whole sphere, so
    its rank is (number of curves) + 1 on sphere diagrams.
    """
    return _corner_solver(d).kernel


def _vec_to_domain(d, vec, x, y):
    mults = {r.id: int(v) for r, v in zip(d.regions, vec) if v}
    return Domain(d, mults, x, y)


def _minimize_l1(x0, kernel):
    """Smallest-|.|_1 representative of x0 + lattice(kernel), deterministic."""
    if not kernel:
        return list(x0)
    import numpy as np

    K = np.asarray(kernel, dtype=np.int64)
    x = np.asarray(x0, dtype=np.int64)
    improved = True
    while improved:
        improved = False
        for b in K:
            # 1-d minimization over x - k*b via a short scan around the
            # median estimate.
            nz = b != 0
            ts = np.sort(x[nz] / b[nz])
            mid = int(round(float(ts[len(ts) // 2])))
            ks = np.arange(mid - 2, mid + 3)
            cands = x[None, :] - ks[:, None] * b[None, :]
            norms = np.abs(cands).sum(axis=1)
            j = int(norms.argmin())
            if norms[j] < np.abs(x).sum():
                x = cands[j]
                improved = bool(ks[j])
    # Deterministic tie-break: exhaustive scan of a radius-1 box.
    combos = np.array(list(itertools.product((-1, 0, 1), repeat=len(kernel))),
                      dtype=np.int64)
    cands = x[None, :] - combos @ K
    norms = np.abs(cands).sum(axis=1)
    keys = sorted((int(n), tuple(int(t) for t in c))
                  for n, c in zip(norms, cands))
    return list(keys[0][1])


def find_domain(d, x, y):
    """Some integer domain from x to y, minimizing total |multiplicity|.

    Downstream gradings do not depend on the choice; minimal domains
    keep the arithmetic small and the output reproducible.
    """
    vec, kernel = domain_family(d, x, y)
    vec = _minimize_l1(vec, kernel)
    return _vec_to_domain(d, vec, x, y)


def domain_family(d, x, y):
    """Particular domain and the full-curve lattice spanning all others."""
    points, rows = _corner_system(d)
    rhs = _corner_rhs(points, x, y)
    solver = _corner_solver(d)
    vec = solver.solve(rhs)
    if vec is None:
        if rational_consistent(rows, rhs):
            raise NoDomainError(
                f"no integer domain joins {x} to {y} (rational solution only)")
        raise NoDomainError(f"no domain joins {x} to {y}")
    return vec, solver.kernel


def check_corner_consistency(d, dom):
    """Independent re-check that a domain's boundary matches its endpoints.

    Walks every curve and verifies the multiplicity jumps at each point
    against generator membership; used as the oracle for find_domain.
    """
    xs, ys = set(dom.from_gen), set(dom.to_gen)

    def coeff(arc):
        left = d.arc_side[(arc, 1)]
        right = d.arc_side[(arc, -1)]
        return dom.mult(left) - dom.mult(right)

    for pid in d.intersections:
        ai, ap = d.alpha_pos[pid]
        bj, bp = d.beta_pos[pid]
        la = len(d.alpha_orders[ai])
        lb = len(d.beta_orders[bj])
        da = coeff((ALPHA, ai, (ap - 1) % la)) - coeff((ALPHA, ai, ap))
        db = coeff((BETA, bj, (bp - 1) % lb)) - coeff((BETA, bj, bp))
        if da != (pid in xs) - (pid in ys):
            return False
        if db != (pid in ys) - (pid in xs):
            return False
    return True


# ---------------------------------------------------------------------------
# Lipshitz index
# ---------------------------------------------------------------------------


def euler_measure(d, rid):
    """Euler measure of a disk region with 2k corners: 1 - k/2."""
    corners = d.corners_of_region(rid)
    if len(corners) % 2:
        raise NonDiskRegionError(
            f"region {rid} has {len(corners)} corners; not a disk region")
    return Fraction(1) - Fraction(len(corners), 4)


def point_measure(d, dom, gen):
    """Sum over generator points of the average corner multiplicity."""
    cache = _corner_cache(d)
    if "slots" not in cache:
        # (pid, quadrant) -> region ids; unique per slot on valid diagrams
        slots = {}
        for r in d.regions:
            for pid, q in r.corners:
                slots.setdefault(pid, {}).setdefault(q, []).append(r.id)
        cache["slots"] = slots
    slots = cache["slots"]
    total = Fraction(0)
    for pid in gen:
        for q in range(4):
            for rid in slots.get(pid, {}).get(q, ()):
                total += Fraction(dom.mult(rid), 4)
    return total


def maslov_index(d, dom):
    """Lipshitz formula: sum of a_i e(D_i) plus both point measures."""
    total = Fraction(0)
    for rid, m in dom.mults.items():
        if m:
            total += m * euler_measure(d, rid)
    total += point_measure(d, dom, dom.from_gen)
    total += point_measure(d, dom, dom.to_gen)
    if total.denominator != 1:
        raise InvalidDiagramError(f"non-integer Maslov index {total}")
    return int(total)


# ---------------------------------------------------------------------------
# Relative gradings
# ---------------------------------------------------------------------------


@dataclass
class GradingTable:
    """Relative Maslov and Alexander gradings anchored at a base generator."""

    base_generator: tuple
    maslov: dict          # generator -> int
    alexander: dict       # generator -> {component name: Fraction}

    def alexander_tuple(self, gen, components):
        return tuple(self.alexander[gen][c] for c in components)

    def shifted(self, maslov_shift=0, alexander_shifts=None):
        shifts = alexander_shifts or {}
        return GradingTable(
            self.base_generator,
            {g: m + maslov_shift for g, m in self.maslov.items()},
            {g: {c: a + shifts.get(c, 0) for c, a in comp.items()}
             for g, comp in self.alexander.items()},
        )


def relative_gradings(d, generators=None):
    """Anchor the lexicographically first generator at grading zero."""
    gens = generators if generators is not None else enumerate_generators(d)
    if not gens:
        raise InvalidDiagramError("diagram has no generators")
    base = gens[0]
    comps = [c.name for c in d.link_components]
    maslov = {}
    alexander = {}
    for g in gens:
        if g == base:
            maslov[g] = 0
            alexander[g] = {c: Fraction(0) for c in comps}
            continue
        dom = find_domain(d, base, g)
        mu = maslov_index(d, dom)
        nw = dom.basepoint_sum(kind="w")
        maslov[g] = -(mu - 2 * nw)
        a = {}
        for c in comps:
            nz_c = dom.basepoint_sum(kind="z", component=c)
            nw_c = dom.basepoint_sum(kind="w", component=c)
            a[c] = Fraction(-(nz_c - nw_c))
        alexander[g] = a
    return GradingTable(base, maslov, alexander)


# ---------------------------------------------------------------------------
# Periodic domains and admissibility
# ---------------------------------------------------------------------------


def periodic_domains(d, punctures):
    """Integer basis of full-curve-boundary chains avoiding the punctures."""
    _, rows = _corner_system(d)
    rows = [list(r) for r in rows]
    for bid in punctures:
        if bid not in d.basepoints:
            raise InvalidDiagramError(f"no basepoint {bid!r}")
        row = [0] * len(d.regions)
        row[d.region_index[d.basepoints[bid].region]] = 1
        rows.append(row)
    kernel = integer_kernel(rows)
    gens = enumerate_generators(d)
    anchor = gens[0] if gens else tuple()
    return [_vec_to_domain(d, v, anchor, anchor) for v in kernel]


@dataclass
class AdmissibilityResult:
    admissible: bool
    conclusive: bool
    witness: object = None  # single-signed Domain when inadmissible

    def __bool__(self):
        return self.admissible


def check_admissibility(d, punctures, bound=2):
    """Weak admissibility: every periodic chain has mixed signs.

    Scans all coefficient combinations of the basis with entries up to
    ``bound`` in absolute value.  A single-signed combination is a
    definite failure; a clean scan of a basis larger than 6 elements is
    reported as inconclusive rather than claimed admissible.
    """
    basis = periodic_domains(d, punctures)
    vecs = [dom.vector() for dom in basis]
    if not vecs:
        return AdmissibilityResult(True, True)
    gens_anchor = basis[0].from_gen
    for combo in itertools.product(range(-bound, bound + 1), repeat=len(vecs)):
        if not any(combo):
            continue
        v = [sum(c * vec[i] for c, vec in zip(combo, vecs))
             for i in range(len(vecs[0]))]
        if all(t >= 0 for t in v) or all(t <= 0 for t in v):
            dom = _vec_to_domain(d, v, gens_anchor, gens_anchor)
            return AdmissibilityResult(False, True, witness=dom)
    return AdmissibilityResult(True, len(vecs) <= 6)


# ---------------------------------------------------------------------------
# Cover/quotient interplay
# ---------------------------------------------------------------------------


def lift_domain(ed, dom):
    """Pull a quotient domain back through the branched covering map.

    Branch regions receive the multiplicity once, all others push to
    both sheets; the endpoints become the total lifts.
    """
    cover = ed.diagram
    mults = {}
    for cov_rid, quo_rid in ed.project_regions.items():
        m = dom.mult(quo_rid)
        if m:
            mults[cov_rid] = m
    x = total_lift(ed, dom.from_gen)
    y = total_lift(ed, dom.to_gen)
    return Domain(cover, mults, x, y)


def total_lift(ed, gen):
    """The tau-invariant cover generator lying over a quotient generator."""
    cover = ed.diagram
    pts = []
    for pid in gen:
        pts.extend(ed.lift_points[pid])
    return tuple(sorted(pts, key=lambda p: cover.alpha_pos[p][0]))


def partition_projection(ed, gen):
    """Split the projection of a cover generator into quotient generators.

    The projected points form a 2-regular bipartite multigraph between
    quotient alpha and beta curves; a system of distinct representatives
    (Hall's theorem) peels off one quotient generator per sheet.  The
    lexicographically smallest matching is taken at every round.
    """
    quo = ed.quotient
    if quo is None:
        raise InvalidDiagramError("equivariant diagram carries no quotient")
    remaining = sorted(ed.project_points[p] for p in gen)
    q = len(remaining) // quo.alpha_count
    parts = []
    for _ in range(q):
        chosen = _lex_matching(quo, remaining)
        parts.append(tuple(chosen))
        for pid in chosen:
            remaining.remove(pid)
    return parts


def _lex_matching(quo, pool):
    """Lexicographically smallest perfect matching in the point pool."""
    n = quo.alpha_count
    by_alpha = {}
    for pid in pool:
        by_alpha.setdefault(quo.alpha_pos[pid][0], []).append(pid)

    def feasible(i, used_beta, chosen):
        if i == n:
            return list(chosen)
        for pid in sorted(set(by_alpha.get(i, ()))):
            j = quo.beta_pos[pid][0]
            if j in used_beta:
                continue
            used_beta.add(j)
            chosen.append(pid)
            got = feasible(i + 1, used_beta, chosen)
            if got is not None:
                return got
            chosen.pop()
            used_beta.discard(j)
        return None

    got = feasible(0, set(), [])
    assert got is not None, "Hall matching failed on a projected generator"
    return got

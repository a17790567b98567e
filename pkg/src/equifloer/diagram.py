"""Multi-pointed genus-0 Heegaard diagrams: model, format, covers.

A diagram is stored combinatorially: cyclic orders of intersection
points along each alpha and beta curve, crossing signs, and the planar
complementary regions as boundary walks with corner data.  The cyclic
orders plus signs determine a rotation system whose faces must agree
with the declared regions; validation re-derives the faces and checks
Euler characteristic 2, so only genuine sphere diagrams pass.

Conventions baked into the file format:

* Arc ``[kind, i, p]`` is the oriented arc of curve ``kind_i`` from the
  point at position ``p`` of its cyclic order to the point at ``p+1``.
* Region boundaries are cyclic walks with the region interior on the
  left; ``direction -1`` traverses an arc against its curve orientation.
  Every oriented arc appears in exactly one region boundary.
* At a point, the four outgoing rays in counterclockwise order are
  ``alpha-out, beta-out, alpha-in, beta-in`` when the crossing sign is
  +1 and ``alpha-out, beta-in, alpha-in, beta-out`` when it is -1.
  Quadrant ``q`` is the sector between rays ``q`` and ``q+1``; corner
  ``k`` of a region sits where boundary segment ``k`` starts.

The branched double cover over two basepoints is built as a Z2 voltage
construction: a shortest dual path from the z0-region to the w0-region
marks the arcs where sheets interchange.
"""

from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field

from .errors import (
    BranchPointsCoincideError,
    DanglingReferenceError,
    DiagramSyntaxError,
    DuplicateIdError,
    InvalidDiagramError,
)

ALPHA = "alpha"
BETA = "beta"


@dataclass(frozen=True)
class Intersection:
    id: str
    alpha: int
    beta: int
    sign: int


@dataclass(frozen=True)
class Basepoint:
    id: str
    kind: str  # 'w' or 'z'
    region: str


@dataclass(frozen=True)
class LinkComponent:
    name: str
    pairs: tuple  # of (z_id, w_id)

    @property
    def basepoints(self):
        out = []
        for z, w in self.pairs:
            out.extend([z, w])
        return out


@dataclass(frozen=True)
class Region:
    id: str
    boundary: tuple  # of ((kind, curve, pos), direction)
    corners: tuple  # of (point_id, quadrant)


@dataclass
class ValidationReport:
    passed: bool = True
    failures: list = field(default_factory=list)

    def fail(self, rule, detail, cells=()):
        self.passed = False
        self.failures.append({"rule": rule, "detail": detail, "cells": list(cells)})

    def as_dict(self):
        return {"passed": self.passed, "failures": self.failures}


class HeegaardDiagram:
    """Immutable combinatorial Heegaard diagram on the sphere."""

    def __init__(self, name, alpha_orders, beta_orders, intersections,
                 regions, basepoints, link_components, involution=None,
                 extra=None):
        self.name = name
        self.alpha_orders = [list(o) for o in alpha_orders]
        self.beta_orders = [list(o) for o in beta_orders]
        self.intersections = {p.id: p for p in intersections}
        self.regions = list(regions)
        self.basepoints = {b.id: b for b in basepoints}
        self.link_components = list(link_components)
        self.involution = involution
        self.extra = extra or {}
        self._build()

    # -- derived structure --------------------------------------------------

    def _build(self):
        self.alpha_pos = {}
        self.beta_pos = {}
        for i, order in enumerate(self.alpha_orders):
            for p, pid in enumerate(order):
                self.alpha_pos.setdefault(pid, (i, p))
        for j, order in enumerate(self.beta_orders):
            for p, pid in enumerate(order):
                self.beta_pos.setdefault(pid, (j, p))
        self.arcs = {}
        for kind, orders in ((ALPHA, self.alpha_orders), (BETA, self.beta_orders)):
            for i, order in enumerate(orders):
                n = len(order)
                for p in range(n):
                    self.arcs[(kind, i, p)] = (order[p], order[(p + 1) % n])
        self.region_index = {r.id: k for k, r in enumerate(self.regions)}
        self.arc_side = {}
        for r in self.regions:
            for arc, direction in r.boundary:
                self.arc_side[(arc, direction)] = r.id
        self.basepoints_by_region = {}
        for b in self.basepoints.values():
            self.basepoints_by_region.setdefault(b.region, []).append(b.id)
        self.component_of_basepoint = {}
        for comp in self.link_components:
            for bid in comp.basepoints:
                self.component_of_basepoint[bid] = comp.name

    @property
    def alpha_count(self):
        return len(self.alpha_orders)

    @property
    def beta_count(self):
        return len(self.beta_orders)

    @property
    def point_count(self):
        return len(self.intersections)

    def sign(self, pid):
        return self.intersections[pid].sign

    def rays_at(self, pid):
        """The four outgoing darts at a point, in counterclockwise order.

        A dart is ((kind, curve, pos), direction); +1 leaves the point
        along the arc, -1 leaves backwards along the arc ending there.
        """
        ai, ap = self.alpha_pos[pid]
        bj, bp = self.beta_pos[pid]
        la = len(self.alpha_orders[ai])
        lb = len(self.beta_orders[bj])
        a_out = ((ALPHA, ai, ap), 1)
        a_in = ((ALPHA, ai, (ap - 1) % la), -1)
        b_out = ((BETA, bj, bp), 1)
        b_in = ((BETA, bj, (bp - 1) % lb), -1)
        if self.sign(pid) == 1:
            return [a_out, b_out, a_in, b_in]
        return [a_out, b_in, a_in, b_out]

    def dart_head(self, dart):
        arc, direction = dart
        tail, head = self.arcs[arc]
        return head if direction == 1 else tail

    def dart_tail(self, dart):
        arc, direction = dart
        tail, head = self.arcs[arc]
        return tail if direction == 1 else head

    def next_dart(self, dart):
        """Next dart of the face lying to the left, and the corner quadrant."""
        v = self.dart_head(dart)
        rays = self.rays_at(v)
        rev = (dart[0], -dart[1])
        idx = rays.index(rev)
        slot = (idx - 1) % 4
        return rays[slot], (v, slot)

    def derive_faces(self):
        """Faces of the rotation system as (boundary walk, corner list) pairs.

        Face corners[k] sits at the tail of boundary segment k, matching
        the region format.
        """
        todo = set()
        for arc in self.arcs:
            todo.add((arc, 1))
            todo.add((arc, -1))
        faces = []
        while todo:
            start = min(todo)
            walk = []
            corners = []
            dart = start
            while True:
                walk.append(dart)
                todo.discard(dart)
                dart, corner = self.next_dart(dart)
                corners.append(corner)
                if dart == start:
                    break
            # corners[k] was recorded at the head of walk[k], i.e. the tail
            # of walk[k+1]; rotate so corners align with segment starts.
            corners = [corners[-1]] + corners[:-1]
            faces.append((walk, corners))
        return faces

    def region_multiset_key(self, walk):
        """Cyclic normalization of a boundary walk for face comparison."""
        k = len(walk)
        best = None
        for s in range(k):
            cand = tuple(walk[s:] + walk[:s])
            if best is None or cand < best:
                best = cand
        return best

    def corners_of_region(self, rid):
        return self.regions[self.region_index[rid]].corners

    def merge_components(self, remove_kind):
        """Components of the sphere minus one curve family.

        ``remove_kind`` is the family that is kept as walls; regions are
        merged across arcs of the *other* family.  Returns a list of
        sets of region ids.
        """
        other = BETA if remove_kind == ALPHA else ALPHA
        parent = {r.id: r.id for r in self.regions}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for arc in self.arcs:
            if arc[0] != other:
                continue
            a = self.arc_side.get((arc, 1))
            b = self.arc_side.get((arc, -1))
            if a is None or b is None:
                continue
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups = {}
        for r in self.regions:
            groups.setdefault(find(r.id), set()).add(r.id)
        return list(groups.values())

    # -- serialization ------------------------------------------------------

    def to_dict(self):
        data = {
            "name": self.name,
            "alpha_orders": [list(o) for o in self.alpha_orders],
            "beta_orders": [list(o) for o in self.beta_orders],
            "intersections": [
                {"id": p.id, "alpha": p.alpha, "beta": p.beta, "sign": p.sign}
                for p in self.intersections.values()
            ],
            "regions": [
                {
                    "id": r.id,
                    "boundary": [
                        {"arc": list(arc), "direction": d} for arc, d in r.boundary
                    ],
                    "corners": [[pid, q] for pid, q in r.corners],
                }
                for r in self.regions
            ],
            "basepoints": [
                {"id": b.id, "kind": b.kind, "region": b.region}
                for b in self.basepoints.values()
            ],
            "link_components": [
                {"name": c.name, "pairs": [list(p) for p in c.pairs]}
                for c in self.link_components
            ],
        }
        if self.involution is not None:
            data["involution"] = self.involution
        data.update(self.extra)
        return data

    def to_json(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _require(cond, message, **ctx):
    if not cond:
        raise DiagramSyntaxError(message, **ctx)


def diagram_from_dict(data):
    _require(isinstance(data, dict), "top level must be an object")
    for key in ("name", "alpha_orders", "beta_orders", "intersections",
                "regions", "basepoints", "link_components"):
        _require(key in data, f"missing top-level key {key!r}")
    name = data["name"]
    alpha_orders = data["alpha_orders"]
    beta_orders = data["beta_orders"]
    _require(isinstance(alpha_orders, list) and len(alpha_orders) > 0,
             "alpha_count = 0: at least one alpha curve required")
    _require(isinstance(beta_orders, list) and len(beta_orders) > 0,
             "beta_count = 0: at least one beta curve required")
    for orders in (alpha_orders, beta_orders):
        for o in orders:
            _require(isinstance(o, list) and len(o) > 0,
                     "curve orders must be nonempty lists")

    points = []
    seen = set()
    for entry in data["intersections"]:
        pid = entry["id"]
        if pid in seen:
            raise DuplicateIdError(f"intersection id {pid!r} declared twice")
        seen.add(pid)
        sign = int(entry["sign"])
        _require(sign in (1, -1), f"sign of {pid!r} must be +1 or -1")
        points.append(Intersection(pid, int(entry["alpha"]), int(entry["beta"]), sign))
    point_ids = {p.id for p in points}

    for kind, orders in ((ALPHA, alpha_orders), (BETA, beta_orders)):
        for i, order in enumerate(orders):
            for pid in order:
                if pid not in point_ids:
                    raise DanglingReferenceError(
                        f"{kind} order {i} references undeclared point {pid!r}")

    regions = []
    region_ids = set()
    for entry in data["regions"]:
        rid = entry["id"]
        if rid in region_ids:
            raise DuplicateIdError(f"region id {rid!r} declared twice")
        region_ids.add(rid)
        boundary = []
        for seg in entry["boundary"]:
            kind, ci, pos = seg["arc"]
            _require(kind in (ALPHA, BETA), f"bad curve kind {kind!r} in {rid!r}")
            orders = alpha_orders if kind == ALPHA else beta_orders
            if not (0 <= ci < len(orders)) or not (0 <= pos < len(orders[ci])):
                raise DanglingReferenceError(
                    f"region {rid!r} references missing arc {seg['arc']!r}")
            d = int(seg["direction"])
            _require(d in (1, -1), f"bad direction in region {rid!r}")
            boundary.append(((kind, int(ci), int(pos)), d))
        corners = []
        for pid, q in entry["corners"]:
            if pid not in point_ids:
                raise DanglingReferenceError(
                    f"region {rid!r} corner references undeclared point {pid!r}")
            _require(q in (0, 1, 2, 3), f"bad quadrant in region {rid!r}")
            corners.append((pid, int(q)))
        regions.append(Region(rid, tuple(boundary), tuple(corners)))

    basepoints = []
    bp_ids = set()
    for entry in data["basepoints"]:
        bid = entry["id"]
        if bid in bp_ids:
            raise DuplicateIdError(f"basepoint id {bid!r} declared twice")
        bp_ids.add(bid)
        _require(entry["kind"] in ("w", "z"), f"basepoint {bid!r} kind must be w or z")
        if entry["region"] not in region_ids:
            raise DanglingReferenceError(
                f"basepoint {bid!r} placed in undeclared region {entry['region']!r}")
        basepoints.append(Basepoint(bid, entry["kind"], entry["region"]))

    components = []
    comp_names = set()
    for entry in data["link_components"]:
        cname = entry["name"]
        if cname in comp_names:
            raise DuplicateIdError(f"link component {cname!r} declared twice")
        comp_names.add(cname)
        pairs = []
        for z, w in entry["pairs"]:
            for bid in (z, w):
                if bid not in bp_ids:
                    raise DanglingReferenceError(
                        f"component {cname!r} references undeclared basepoint {bid!r}")
            pairs.append((z, w))
        components.append(LinkComponent(cname, tuple(pairs)))

    involution = data.get("involution")
    extra = {k: v for k, v in data.items()
             if k not in {"name", "alpha_orders", "beta_orders", "intersections",
                          "regions", "basepoints", "link_components", "involution"}}
    return HeegaardDiagram(name, alpha_orders, beta_orders, points, regions,
                           basepoints, components, involution=involution,
                           extra=extra)


def parse_diagram(text):
    """Parse diagram-file contents (JSON) into a HeegaardDiagram."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramSyntaxError(f"not valid JSON: {exc}") from exc
    return diagram_from_dict(data)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate(d):
    """Check every structural invariant; report all violations found."""
    rep = ValidationReport()

    if d.alpha_count != d.beta_count:
        rep.fail("curve-counts",
                 f"{d.alpha_count} alpha vs {d.beta_count} beta curves")

    usage_ok = True
    alpha_seen = Counter()
    beta_seen = Counter()
    for i, order in enumerate(d.alpha_orders):
        for pid in order:
            alpha_seen[pid] += 1
            p = d.intersections[pid]
            if p.alpha != i:
                usage_ok = False
                rep.fail("intersection-usage",
                         f"{pid} listed on alpha {i} but declares alpha {p.alpha}",
                         [pid])
    for j, order in enumerate(d.beta_orders):
        for pid in order:
            beta_seen[pid] += 1
            p = d.intersections[pid]
            if p.beta != j:
                usage_ok = False
                rep.fail("intersection-usage",
                         f"{pid} listed on beta {j} but declares beta {p.beta}",
                         [pid])
    for pid in d.intersections:
        if alpha_seen[pid] != 1 or beta_seen[pid] != 1:
            usage_ok = False
            rep.fail("intersection-usage",
                     f"{pid} appears {alpha_seen[pid]}x on alpha orders and "
                     f"{beta_seen[pid]}x on beta orders (need exactly once each)",
                     [pid])
    if not usage_ok:
        return rep  # rotation system is meaningless past this point

    V = d.point_count
    E = len(d.arcs)
    F = len(d.regions)
    if V - E + F != 2:
        rep.fail("euler-characteristic",
                 f"V - E + F = {V} - {E} + {F} = {V - E + F}, expected 2 "
                 "(surface is not a sphere)")

    seen_sides = Counter()
    for r in d.regions:
        for seg in r.boundary:
            seen_sides[seg] += 1
    coverage_ok = True
    for arc in d.arcs:
        for direction in (1, -1):
            c = seen_sides[(arc, direction)]
            if c != 1:
                coverage_ok = False
                rep.fail("arc-coverage",
                         f"oriented arc {arc} dir {direction} appears {c} times "
                         "in region boundaries (need exactly 1)")

    for r in d.regions:
        k = len(r.boundary)
        if len(r.corners) != k:
            rep.fail("corner-consistency",
                     f"region {r.id}: {k} boundary segments but "
                     f"{len(r.corners)} corners", [r.id])
            continue
        for idx in range(k):
            prev = r.boundary[idx - 1]
            cur = r.boundary[idx]
            v_end = d.dart_head(prev)
            v_start = d.dart_tail(cur)
            if v_end != v_start:
                rep.fail("boundary-closure",
                         f"region {r.id}: segment {idx - 1} ends at {v_end} "
                         f"but segment {idx} starts at {v_start}", [r.id])
                continue
            rays = d.rays_at(v_start)
            rev_prev = (prev[0], -prev[1])
            if cur not in rays or rev_prev not in rays:
                rep.fail("corner-consistency",
                         f"region {r.id}: segments at {v_start} are not "
                         "incident darts", [r.id, v_start])
                continue
            slot = rays.index(cur)
            pid, q = r.corners[idx]
            if pid != v_start or q != slot or rays[(slot + 1) % 4] != rev_prev:
                rep.fail("corner-consistency",
                         f"region {r.id}: corner {idx} declared ({pid},{q}) "
                         f"but walk occupies quadrant {slot} at {v_start} "
                         "(or sign is inconsistent with the walk)",
                         [r.id, v_start])

    corner_slots = {}
    for r in d.regions:
        for pid, q in r.corners:
            corner_slots.setdefault(pid, []).append(q)
    for pid in d.intersections:
        slots = sorted(corner_slots.get(pid, []))
        if slots != [0, 1, 2, 3]:
            rep.fail("four-quadrants",
                     f"point {pid} has corner quadrants {slots}, "
                     "expected exactly one of each of 0..3", [pid])

    if coverage_ok and rep.passed:
        derived = {d.region_multiset_key(walk) for walk, _ in d.derive_faces()}
        declared = {d.region_multiset_key(list(r.boundary)) for r in d.regions}
        if derived != declared:
            rep.fail("faces-match-rotation",
                     "declared regions do not match the faces of the rotation "
                     "system induced by curve orders and signs")

    # Surface connectivity: all points reachable through arcs.
    if d.intersections:
        start = next(iter(d.intersections))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for dart in d.rays_at(v):
                w = d.dart_head(dart)
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != V:
            rep.fail("connectivity",
                     f"curve system is disconnected ({len(seen)} of {V} points "
                     "reachable)")

    # Basepoint bookkeeping.
    for rid, bids in d.basepoints_by_region.items():
        for kind in ("w", "z"):
            k = [b for b in bids if d.basepoints[b].kind == kind]
            if len(k) > 1:
                rep.fail("basepoint-kind-collision",
                         f"region {rid} holds {len(k)} basepoints of kind "
                         f"{kind}: {sorted(k)}", k)

    for remove_kind, label in ((ALPHA, "alpha"), (BETA, "beta")):
        if not rep.passed and not coverage_ok:
            break
        for comp in d.merge_components(remove_kind):
            ws = [b.id for b in d.basepoints.values()
                  if b.region in comp and b.kind == "w"]
            zs = [b.id for b in d.basepoints.values()
                  if b.region in comp and b.kind == "z"]
            if len(ws) != 1 or len(zs) != 1:
                rep.fail("basepoint-distribution",
                         f"a component of the {label}-complement holds "
                         f"w={sorted(ws)} z={sorted(zs)} (need one of each)",
                         ws + zs)

    assigned = Counter()
    for comp in d.link_components:
        for z, w in comp.pairs:
            assigned[z] += 1
            assigned[w] += 1
            if d.basepoints[z].kind != "z" or d.basepoints[w].kind != "w":
                rep.fail("link-components",
                         f"component {comp.name} pair ({z},{w}) has wrong kinds",
                         [z, w])
    for bid in d.basepoints:
        if assigned[bid] != 1:
            rep.fail("link-components",
                     f"basepoint {bid} belongs to {assigned[bid]} component "
                     "pairs (need exactly 1)", [bid])

    return rep


# ---------------------------------------------------------------------------
# Branched double cover
# ---------------------------------------------------------------------------


class EquivariantDiagram:
    """A cover diagram with its deck involution and quotient bookkeeping."""

    def __init__(self, diagram, tau_points, tau_regions, fixed_basepoints,
                 quotient=None, project_points=None, project_regions=None):
        self.diagram = diagram
        self.tau_points = dict(tau_points)
        self.tau_regions = dict(tau_regions)
        self.fixed_basepoints = tuple(fixed_basepoints)
        self.quotient = quotient
        self.project_points = dict(project_points or {})
        self.project_regions = dict(project_regions or {})
        self.lift_points = {}
        for cov, quo in self.project_points.items():
            self.lift_points.setdefault(quo, []).append(cov)
        self.lift_regions = {}
        for cov, quo in self.project_regions.items():
            self.lift_regions.setdefault(quo, []).append(cov)

    def tau_generator(self, gen):
        """Image of a generator (tuple of point ids sorted by alpha curve)."""
        imgs = [self.tau_points[p] for p in gen]
        return tuple(sorted(imgs, key=lambda p: self.diagram.alpha_pos[p][0]))

    def check(self):
        """Verify the involution axioms; returns a ValidationReport."""
        rep = ValidationReport()
        d = self.diagram
        for p, q in self.tau_points.items():
            if self.tau_points.get(q) != p:
                rep.fail("involution-squares", f"tau^2 moves point {p}", [p])
            if p == q:
                rep.fail("involution-fixed-points",
                         f"tau fixes intersection {p}", [p])
            a, b = d.intersections[p], d.intersections[q]
            if a.sign != b.sign:
                rep.fail("involution-signs", f"tau flips sign at {p}", [p, q])
        fixed_regions = [r for r, s in self.tau_regions.items() if r == s]
        expected = sorted(d.basepoints[b].region for b in self.fixed_basepoints)
        if sorted(fixed_regions) != expected:
            rep.fail("involution-fixed-regions",
                     f"tau fixes regions {sorted(fixed_regions)}, expected "
                     f"exactly the branch regions {expected}")
        for r, s in self.tau_regions.items():
            if self.tau_regions.get(s) != r:
                rep.fail("involution-squares", f"tau^2 moves region {r}", [r])
        # tau must preserve curve families and cyclic orders (automorphism).
        for kind, orders in ((ALPHA, d.alpha_orders), (BETA, d.beta_orders)):
            for i, order in enumerate(orders):
                image = [self.tau_points[p] for p in order]
                pos = (d.alpha_pos if kind == ALPHA else d.beta_pos)
                curves = {pos[p][0] for p in image}
                if len(curves) != 1:
                    rep.fail("involution-curves",
                             f"tau image of {kind} {i} spans several curves")
                    continue
                target = orders[curves.pop()]
                key = d.region_multiset_key(image)
                if key != d.region_multiset_key(list(target)):
                    rep.fail("involution-curves",
                             f"tau image of {kind} {i} is not a cyclic order")
        return rep


def _shortest_dual_path(d, r_from, r_to):
    """Regions and crossing arcs of a shortest dual path (BFS, id order)."""
    adj = {}
    for arc in sorted(d.arcs):
        a = d.arc_side[(arc, 1)]
        b = d.arc_side[(arc, -1)]
        if a != b:
            adj.setdefault(a, []).append((b, arc))
            adj.setdefault(b, []).append((a, arc))
    parent = {r_from: None}
    queue = deque([r_from])
    while queue:
        r = queue.popleft()
        if r == r_to:
            break
        for nxt, arc in sorted(adj.get(r, [])):
            if nxt not in parent:
                parent[nxt] = (r, arc)
                queue.append(nxt)
    if r_to not in parent:
        raise InvalidDiagramError("no dual path between branch regions")
    arcs = []
    r = r_to
    while parent[r] is not None:
        r, arc = parent[r]
        arcs.append(arc)
    return set(arcs)


def branched_double_cover(d, z0, w0):
    """Branched double cover of d over the basepoints z0 and w0.

    The two named basepoints must lie in distinct regions; all other
    basepoints lift to two copies with ^1/^2 suffixes.  Returns an
    EquivariantDiagram whose diagram always passes validation.
    """
    rep = validate(d)
    if not rep.passed:
        raise InvalidDiagramError(
            f"cannot take cover of invalid diagram: {rep.failures[0]['detail']}")
    for bid, kind in ((z0, "z"), (w0, "w")):
        if bid not in d.basepoints:
            raise DanglingReferenceError(f"no basepoint {bid!r}")
        if d.basepoints[bid].kind != kind:
            raise InvalidDiagramError(f"basepoint {bid!r} is not of kind {kind!r}")
    rz = d.basepoints[z0].region
    rw = d.basepoints[w0].region
    if rz == rw:
        raise BranchPointsCoincideError(
            f"branch basepoints {z0!r}, {w0!r} share region {rz!r}")

    cut = _shortest_dual_path(d, rz, rw)
    omega = {arc: (1 if arc in cut else 0) for arc in d.arcs}

    def pname(pid, s):
        return f"{pid}^{s}"

    # Lift each curve twice by tracing arcs and tracking the sheet.
    cover_orders = {ALPHA: [], BETA: []}
    curve_lift_index = {}   # (kind, i, start_sheet) -> cover curve index
    arc_position = {}       # (quotient arc, tail sheet) -> (kind, index, pos)
    point_sheet_names = {}  # (pid, voltage sheet) -> cover point id
    for kind, orders in ((ALPHA, d.alpha_orders), (BETA, d.beta_orders)):
        for i, order in enumerate(orders):
            n = len(order)
            for start_sheet in (1, 2):
                if (kind, i, start_sheet) in curve_lift_index:
                    continue
                idx = len(cover_orders[kind])
                pts = []
                s = start_sheet
                pos = 0
                for p in range(n):
                    arc = (kind, i, p)
                    pts.append((order[p], s))
                    arc_position[(arc, s)] = (kind, idx, pos)
                    pos += 1
                    s = s ^ 3 if omega[arc] else s  # 1<->2 when crossing the cut
                if s != start_sheet:
                    raise InvalidDiagramError(
                        f"{kind} curve {i} separates the branch points; its "
                        "lift would be connected")
                curve_lift_index[(kind, i, start_sheet)] = idx
                # Mark the other lift as known only if it is genuinely the
                # same orbit (cannot happen: total voltage is even).
                cover_orders[kind].append(pts)

    # Point names: the lift of p on the alpha lift starting on sheet 1 gets
    # superscript 1 (paper convention: x^i lies on alpha_i^1 or alpha_i^2).
    for (kind, i, start_sheet), idx in curve_lift_index.items():
        if kind != ALPHA:
            continue
        for (pid, s) in cover_orders[ALPHA][idx]:
            point_sheet_names[(pid, s)] = pname(pid, start_sheet)

    cover_alpha_orders = [[point_sheet_names[t] for t in pts]
                          for pts in cover_orders[ALPHA]]
    cover_beta_orders = [[point_sheet_names[t] for t in pts]
                         for pts in cover_orders[BETA]]

    alpha_curve_of = {}
    for idx, pts in enumerate(cover_orders[ALPHA]):
        for t in pts:
            alpha_curve_of[point_sheet_names[t]] = idx
    beta_curve_of = {}
    for idx, pts in enumerate(cover_orders[BETA]):
        for t in pts:
            beta_curve_of[point_sheet_names[t]] = idx

    cover_points = []
    project_points = {}
    for pid, p in d.intersections.items():
        for s in (1, 2):
            cid = point_sheet_names[(pid, s)]
            cover_points.append(Intersection(
                cid, alpha_curve_of[cid], beta_curve_of[cid], p.sign))
            project_points[cid] = pid

    def lift_dart(dart, sheet):
        """Cover dart for a quotient dart leaving a vertex on ``sheet``."""
        arc, direction = dart
        if direction == 1:
            tail_sheet = sheet
        else:
            tail_sheet = sheet ^ 3 if omega[arc] else sheet
        kind, idx, pos = arc_position[(arc, tail_sheet)]
        return ((kind, idx, pos), direction)

    # Faces of the cover via the voltage walk.
    todo = set()
    for arc in d.arcs:
        for direction in (1, -1):
            for s in (1, 2):
                todo.add(((arc, direction), s))
    cover_regions = []
    project_regions = {}
    region_lift_count = Counter()
    done = set()
    for start in sorted(todo):
        if start in done:
            continue
        walk = []
        corners = []
        dart, s = start
        while True:
            done.add((dart, s))
            walk.append(lift_dart(dart, s))
            head_sheet = s ^ 3 if omega[dart[0]] else s
            nxt, (v, slot) = d.next_dart(dart)
            corners.append((point_sheet_names[(v, head_sheet)], slot))
            dart, s = nxt, head_sheet
            if (dart, s) == start:
                break
        corners = [corners[-1]] + corners[:-1]
        # Identify the quotient region this face lies over.
        q_side = d.arc_side[start[0]]
        n = region_lift_count[q_side]
        region_lift_count[q_side] += 1
        rid = f"{q_side}^{n + 1}"
        cover_regions.append(Region(rid, tuple(walk), tuple(corners)))
        project_regions[rid] = q_side

    # Branch regions lift once; rename them without a sheet suffix.
    renames = {}
    for rid, q in list(project_regions.items()):
        if region_lift_count[q] == 1:
            renames[rid] = q
    if renames:
        cover_regions = [
            Region(renames.get(r.id, r.id), r.boundary, r.corners)
            for r in cover_regions
        ]
        project_regions = {renames.get(c, c): q for c, q in project_regions.items()}
    branch_regions = {q for q, c in region_lift_count.items() if c == 1}
    if branch_regions != {rz, rw}:
        raise InvalidDiagramError(
            f"cut produced branch regions {sorted(branch_regions)}, expected "
            f"{sorted((rz, rw))}")
    if len({r.id for r in cover_regions}) != len(cover_regions):
        raise DuplicateIdError(
            "cover region names collide with quotient names; rename the "
            "quotient regions (avoid trailing ^1/^2 suffixes)")

    region_of_dart = {}
    for r in cover_regions:
        for seg in r.boundary:
            region_of_dart[seg] = r.id

    # Basepoints: each quotient face knows its lifts; assign each lifted
    # basepoint the sheet suffix of the alpha lift surrounding it (the
    # quotient convention pairs z_i, w_i inside alpha_i).
    lifts_of_region = {}
    for cid, q in project_regions.items():
        lifts_of_region.setdefault(q, []).append(cid)

    cover_basepoints = []
    basepoint_names = {}
    for b in d.basepoints.values():
        if b.id in (z0, w0):
            cover_basepoints.append(Basepoint(b.id, b.kind, b.region))
            basepoint_names[(b.id, 0)] = b.id
            continue
        for cid in lifts_of_region[b.region]:
            suffix = cid.rsplit("^", 1)[1]
            name = f"{b.id}^{suffix}"
            cover_basepoints.append(Basepoint(name, b.kind, cid))
            basepoint_names[(b.id, int(suffix))] = name

    # Normalize basepoint sheet names to follow the alpha-disk convention
    # where possible: the lift of z_i inside alpha_i^s is z_i^s.
    cover_components = []
    for comp in d.link_components:
        pairs = []
        for s in (1, 2):
            for z, w in comp.pairs:
                zs = basepoint_names.get((z, s), basepoint_names.get((z, 0)))
                ws = basepoint_names.get((w, s), basepoint_names.get((w, 0)))
                pairs.append((zs, ws))
        # A component whose only pair is the branch pair keeps one pair.
        uniq = []
        for pr in pairs:
            if pr not in uniq:
                uniq.append(pr)
        cover_components.append(LinkComponent(comp.name, tuple(uniq)))

    # Deck involution.
    tau_points = {}
    for pid in d.intersections:
        a, b = point_sheet_names[(pid, 1)], point_sheet_names[(pid, 2)]
        tau_points[a] = b
        tau_points[b] = a
    tau_regions = {}
    for q, lifts in lifts_of_region.items():
        if len(lifts) == 1:
            tau_regions[lifts[0]] = lifts[0]
        else:
            tau_regions[lifts[0]] = lifts[1]
            tau_regions[lifts[1]] = lifts[0]

    involution_raw = {
        "intersections": {p: q for p, q in tau_points.items()},
        "regions": dict(tau_regions),
        "fixed": [z0, w0],
    }
    cover = HeegaardDiagram(
        f"{d.name}~cover",
        cover_alpha_orders,
        cover_beta_orders,
        cover_points,
        cover_regions,
        cover_basepoints,
        cover_components,
        involution=involution_raw,
    )
    eq = EquivariantDiagram(cover, tau_points, tau_regions, (z0, w0),
                            quotient=d, project_points=project_points,
                            project_regions=project_regions)
    cover_rep = validate(cover)
    if not cover_rep.passed:
        raise InvalidDiagramError(
            f"internal error: cover failed validation: {cover_rep.failures}")
    inv_rep = eq.check()
    if not inv_rep.passed:
        raise InvalidDiagramError(
            f"internal error: cover involution invalid: {inv_rep.failures}")
    return eq


def equivariant_from_diagram(cover, quotient=None, project_points=None,
                             project_regions=None):
    """Wrap a parsed cover diagram (with involution data) equivariantly."""
    from .errors import NotInvolutionError

    if not cover.involution:
        raise NotInvolutionError(
            f"diagram {cover.name!r} carries no involution data")
    raw = cover.involution
    tau_points = dict(raw["intersections"])
    tau_regions = dict(raw["regions"])
    fixed = tuple(raw["fixed"])
    eq = EquivariantDiagram(cover, tau_points, tau_regions, fixed,
                            quotient=quotient,
                            project_points=project_points,
                            project_regions=project_regions)
    rep = eq.check()
    if not rep.passed:
        raise NotInvolutionError(
            f"involution data of {cover.name!r} is inconsistent: "
            f"{rep.failures[0]['detail']}")
    return eq


# ---------------------------------------------------------------------------
# Built-in example corpus
# ---------------------------------------------------------------------------


def _data_text(filename):
    from importlib.resources import files

    return files("equifloer.data").joinpath(filename).read_text()


def builtin_index():
    """Metadata for the built-in diagrams (name, pair, linking number)."""
    return json.loads(_data_text("index.json"))


def get_builtin(name):
    """Load one built-in diagram by name.

    Quotients come back as HeegaardDiagram; covers as EquivariantDiagram
    wired to their quotient with the covering projection.
    """
    entries = {e["name"]: e for e in builtin_index()}
    if name not in entries:
        raise DanglingReferenceError(
            f"no built-in diagram {name!r}; available: {sorted(entries)}")
    entry = entries[name]
    d = parse_diagram(_data_text(f"{name}.json"))
    if entry["kind"] == "quotient":
        return d
    quotient = parse_diagram(_data_text(f"{entry['quotient']}.json"))
    meta = d.extra.get("cover_of", {})
    project_points = dict(meta.get("points", {}))
    project_regions = dict(meta.get("regions", {}))
    return equivariant_from_diagram(d, quotient=quotient,
                                    project_points=project_points,
                                    project_regions=project_regions)


def builtin_examples():
    """All built-in diagrams as (name, diagram) pairs."""
    return [(e["name"], get_builtin(e["name"])) for e in builtin_index()]


# ---------------------------------------------------------------------------
# Isomorphism search (used to compare hand-encodings with constructions)
# ---------------------------------------------------------------------------


def diagrams_isomorphic(d1, d2):
    """Cell-level isomorphism respecting curves, orders, and signs.

    Returns a point-id mapping, or None.  Basepoint structure must
    correspond (kinds and link-component pair multisets); names are
    free to differ.
    """
    if (d1.alpha_count != d2.alpha_count or d1.beta_count != d2.beta_count
            or d1.point_count != d2.point_count
            or len(d1.regions) != len(d2.regions)):
        return None

    n_alpha = d1.alpha_count

    def try_assignment(curve_map, offsets):
        point_map = {}
        for i in range(n_alpha):
            src = d1.alpha_orders[i]
            tgt = d2.alpha_orders[curve_map[i]]
            if len(src) != len(tgt):
                return None
            off = offsets[i]
            for p, pid in enumerate(src):
                point_map[pid] = tgt[(p + off) % len(tgt)]
        # signs
        for pid, img in point_map.items():
            if d1.intersections[pid].sign != d2.intersections[img].sign:
                return None
        # beta consistency
        beta_map = {}
        for j, order in enumerate(d1.beta_orders):
            imgs = [point_map[p] for p in order]
            curves = {d2.beta_pos[p][0] for p in imgs}
            if len(curves) != 1:
                return None
            tj = curves.pop()
            if beta_map.get(tj) is not None:
                return None
            beta_map[tj] = j
            tgt = d2.beta_orders[tj]
            if len(tgt) != len(order):
                return None
            start = d2.beta_pos[imgs[0]][1]
            if [tgt[(start + k) % len(tgt)] for k in range(len(tgt))] != imgs:
                return None
        # regions: rotation systems now agree iff faces map to faces; check
        # the basepoint placement carries over.
        face_map = _induced_region_map(d1, d2, point_map, curve_map, offsets,
                                       d2_face_keys)
        if face_map is None:
            return None
        if not _basepoints_correspond(d1, d2, face_map):
            return None
        return point_map

    import itertools

    d2_face_keys = {d2.region_multiset_key(list(r.boundary)): r.id
                    for r in d2.regions}

    sizes = [len(o) for o in d1.alpha_orders]
    for curve_map in itertools.permutations(range(n_alpha)):
        if any(len(d2.alpha_orders[curve_map[i]]) != sizes[i] for i in range(n_alpha)):
            continue
        for offsets in itertools.product(*[range(len(o)) for o in d1.alpha_orders]):
            got = try_assignment(list(curve_map), list(offsets))
            if got is not None:
                return got
    return None


def _induced_region_map(d1, d2, point_map, alpha_map, alpha_offsets, d2_face_keys):
    """Map regions of d1 to regions of d2 under an arc correspondence."""
    beta_offsets = {}
    for j, order in enumerate(d1.beta_orders):
        img = point_map[order[0]]
        tj, tpos = d2.beta_pos[img]
        beta_offsets[j] = (tj, tpos)

    def map_arc(arc):
        kind, i, p = arc
        if kind == ALPHA:
            ti = alpha_map[i]
            return (ALPHA, ti, (p + alpha_offsets[i]) % len(d2.alpha_orders[ti]))
        tj, tpos = beta_offsets[i]
        return (BETA, tj, (p + tpos) % len(d2.beta_orders[tj]))

    out = {}
    for r in d1.regions:
        walk = [(map_arc(arc), direction) for arc, direction in r.boundary]
        target = d2_face_keys.get(d2.region_multiset_key(walk))
        if target is None:
            return None
        out[r.id] = target
    return out


def _basepoints_correspond(d1, d2, region_map):
    by_region_1 = {}
    for b in d1.basepoints.values():
        by_region_1.setdefault(region_map[b.region], []).append((b.kind,))
    by_region_2 = {}
    for b in d2.basepoints.values():
        by_region_2.setdefault(b.region, []).append((b.kind,))
    for rid, kinds in by_region_1.items():
        if sorted(kinds) != sorted(by_region_2.get(rid, [])):
            return False
    for rid in by_region_2:
        if rid not in by_region_1 and by_region_2[rid]:
            return False
    return True

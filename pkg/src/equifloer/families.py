"""Parametrized diagram family: quotients of (2, lam) torus knots.

A (2, lam) torus knot (lam odd) is doubly-periodic with unknotted
quotient; its quotient diagram is a one-bridge spiral winding lam times
around the axis basepoint.  The combinatorial pattern of the resulting
genus-0 diagram is regular in lam, so the whole family is generated
directly: 4*lam intersection points x0..x_{4lam-1} indexed from the
outer end of the bridge inward, with

* alpha order: odd indices descending, x0, even indices ascending,
  then the last point;
* beta order: the spiral wall order with paired passes;
* crossing signs + at indices 0, 3 mod 4 and - at 1, 2 mod 4.

lam = 1 and lam = 3 reproduce the built-in unknot and trefoil quotient
diagrams up to relabeling.  Regions are derived from the rotation
system; the four basepoint regions are the bigons at the bridge ends,
the spiral core, and the outer face.
"""

from __future__ import annotations

from .diagram import (
    Basepoint,
    HeegaardDiagram,
    Intersection,
    LinkComponent,
    Region,
    branched_double_cover,
    validate,
)
from .errors import InvalidDiagramError


def coil_diagram(lam):
    """Quotient diagram of the doubly-periodic (2, lam) torus knot.

    lam must be odd and positive; the diagram has 4*lam intersection
    points and 4*lam + 2 regions, and its branched double cover over
    (z0, w0) presents the torus knot together with its axis.
    """
    if lam <= 0 or lam % 2 == 0:
        raise InvalidDiagramError(f"coil parameter {lam} must be odd positive")
    n = 4 * lam

    def x(i):
        return f"x{i}"

    alpha = [x(i) for i in range(n - 3, 0, -2)] + [x(0)] + \
        [x(i) for i in range(2, n - 1, 2)] + [x(n - 1)]
    beta = [x(n - 2)]
    for k in range((n - 8) // 4, -1, -1):
        beta += [x(4 * k + 3), x(4 * k + 2)]
    beta += [x(0), x(1)]
    for k in range(1, (n - 8) // 4 + 2):
        beta += [x(4 * k), x(4 * k + 1)]
    beta += [x(n - 1)]

    points = [
        Intersection(x(i), 0, 0, 1 if i % 4 in (0, 3) else -1)
        for i in range(n)
    ]

    proto = HeegaardDiagram(f"coil-{lam}", [alpha], [beta], points, [], [], [])
    faces = proto.derive_faces()
    regions = [Region(f"r{k}", tuple(walk), tuple(corners))
               for k, (walk, corners) in enumerate(faces)]
    by_corner = {}
    for r in regions:
        for pid, q in r.corners:
            by_corner[(pid, q)] = r.id

    basepoints = [
        Basepoint("w0", "w", by_corner[(x(0), 3)]),
        Basepoint("z1", "z", by_corner[(x(0), 1)]),
        Basepoint("w1", "w", by_corner[(x(n - 1), 1)]),
        Basepoint("z0", "z", by_corner[(x(n - 1), 3)]),
    ]
    components = [
        LinkComponent("K", (("z1", "w1"),)),
        LinkComponent("U", (("z0", "w0"),)),
    ]
    d = HeegaardDiagram(f"coil-{lam}", [alpha], [beta], points, regions,
                        basepoints, components)
    rep = validate(d)
    if not rep.passed:
        raise InvalidDiagramError(
            f"coil construction failed validation: {rep.failures}")
    return d


def coil_pair(lam):
    """(quotient, equivariant cover) for the (2, lam) torus knot."""
    quo = coil_diagram(lam)
    return quo, branched_double_cover(quo, "z0", "w0")

"""Combinatorial link Floer homology for doubly-periodic knots.

Equivariant genus-0 Heegaard diagrams, branched double covers with
their deck involution, disk-count differentials over GF(2), the
localization spectral sequence over F2((theta)), and the classical
consequences: Murasugi's Alexander-polynomial congruence, the genus
bound for periodic knots, and fibredness transfer.
"""

from .diagram import (
    EquivariantDiagram,
    HeegaardDiagram,
    branched_double_cover,
    builtin_examples,
    builtin_index,
    diagrams_isomorphic,
    equivariant_from_diagram,
    get_builtin,
    parse_diagram,
    validate,
)
from .gradings import (
    Domain,
    GradingTable,
    check_admissibility,
    enumerate_generators,
    find_domain,
    lift_domain,
    maslov_index,
    partition_projection,
    periodic_domains,
    relative_gradings,
    total_lift,
)
from .complexes import (
    GradedComplex,
    HomologyResult,
    check_niceness,
    differential,
    homology,
)
from .tate import (
    Involution,
    TatePage,
    d_r_value,
    grading_correspondence,
    involution_map,
    snf_over_poly,
    tate_pages,
    tate_total_matrix,
)
from .invariants import (
    AbsolutePinning,
    LaurentPoly,
    PeriodicityConfig,
    alexander_from_euler,
    euler_characteristic,
    knot_polynomial_from_complex,
    murasugi_check,
    pin_absolute,
    pinned_homology,
    specialize_two_component,
    topology_report,
)
from .families import coil_diagram, coil_pair

__version__ = "1.0.0"

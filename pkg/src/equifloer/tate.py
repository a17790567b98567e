"""Localization spectral sequence of an involutive complex over F2((theta)).

The deck transformation of an equivariant cover permutes generators; on
a suitable diagram it is a chain map, and the double complex with total
differential d + theta(1 + tau) has a spectral sequence whose first
page is the homology of d.  Pages are computed by the staircase
cascade: a class survives to page r when its (1+tau)-image can be
pulled back through d r-1 times, and d_r is (1+tau) applied to the last
staircase entry, carrying theta^r.

Pages split along the Alexander gradings the flavor preserves (both
components for the link flavor, the knot component only for the knot
flavor).  A Smith normal form over F2[theta] of d + theta(1+tau) gives
certified stabilized ranks; the cascade must agree with it, and the
pair of algorithms cross-checks both implementations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CorrespondenceViolationError,
    NotChainMapError,
    NotInvolutionError,
)
from .linalg import Gf2Space, gf2_kernel, gf2_solve, p2_theta_valuation, \
    poly_smith_normal_form


@dataclass
class Involution:
    """Generator permutation induced by the deck transformation."""

    complex: object
    permutation: np.ndarray   # permutation[i] = index of tau(generator i)

    @property
    def matrix(self):
        n = len(self.permutation)
        M = np.zeros((n, n), dtype=np.uint8)
        for i, j in enumerate(self.permutation):
            M[j, i] = 1
        return M

    def apply(self, vec):
        out = np.zeros_like(vec)
        for i, j in enumerate(self.permutation):
            out[j] ^= vec[i]
        return out

    def fixed_generators(self):
        return [g for i, g in enumerate(self.complex.generators)
                if self.permutation[i] == i]


def involution_map(ed, cx):
    """The involution on a complex built from ed's cover diagram.

    Verifies that the permutation squares to the identity, preserves
    every grading, and commutes with the differential.
    """
    gens = cx.generators
    index = cx.index
    perm = np.zeros(len(gens), dtype=np.int64)
    for i, g in enumerate(gens):
        img = ed.tau_generator(g)
        if img not in index:
            raise NotInvolutionError(
                f"tau image of generator {g} is not a generator")
        perm[i] = index[img]
    for i in range(len(gens)):
        if perm[perm[i]] != i:
            raise NotInvolutionError(
                f"tau does not square to the identity on {gens[i]}")
    table = cx.table
    for i, g in enumerate(gens):
        h = gens[perm[i]]
        if table.maslov[g] != table.maslov[h] or \
                table.alexander[g] != table.alexander[h]:
            raise NotInvolutionError(
                f"tau moves {g} to {h} across gradings")
    inv = Involution(cx, perm)
    P = inv.matrix
    left = (P.astype(np.uint16) @ cx.matrix.astype(np.uint16)) % 2
    right = (cx.matrix.astype(np.uint16) @ P.astype(np.uint16)) % 2
    if (left != right).any():
        src = int(np.nonzero((left != right).any(axis=0))[0][0])
        raise NotChainMapError(
            f"tau fails to commute with d at generator {gens[src]}",
            generator=gens[src])
    return inv


# ---------------------------------------------------------------------------
# Pages
# ---------------------------------------------------------------------------


@dataclass
class TateBlock:
    grading: tuple            # Alexander values of the preserved components
    generators: list          # generator tuples spanning the block
    rank: int
    d_rank: int
    representatives: list     # generator-sum tuples spanning E_r
    Z: object = None          # Gf2Space of surviving cycles
    B: object = None          # Gf2Space of boundaries on this page
    pairs: object = None      # Gf2Space of staircase pairs [v | u] at this page
    T: object = None          # 1 + tau on the block

    def vector(self, gens):
        idx = {g: i for i, g in enumerate(self.generators)}
        v = np.zeros(len(self.generators), dtype=np.uint8)
        for g in gens:
            v[idx[g]] ^= 1
        return v

    def contains_class(self, gens):
        """Whether the generator sum survives to this page (lies in Z)."""
        return self.Z.contains(self.vector(gens))

    def classes_equal(self, gens_a, gens_b):
        return self.B.contains(self.vector(gens_a) ^ self.vector(gens_b))

    def is_zero_class(self, gens):
        return self.B.contains(self.vector(gens))

    def d_apply(self, v):
        """One value of d_r on a page-r cycle vector (defined mod B)."""
        basis = self.pairs.basis
        n = len(self.generators)
        if basis.size == 0:
            return None
        sol = gf2_solve(basis[:, :n].T, v)
        if sol is None:
            return None
        pair = (sol @ basis) % 2
        return (pair[n:] @ self.T.T) % 2


@dataclass
class TatePage:
    r: int
    blocks: dict              # grading tuple -> TateBlock
    stabilized: bool
    e_infinity_total: int

    @property
    def total_rank(self):
        return sum(b.rank for b in self.blocks.values())

    def block(self, grading):
        return self.blocks[tuple(grading)]

    def rank_at(self, grading):
        b = self.blocks.get(tuple(grading))
        return b.rank if b else 0

    def as_payload(self):
        from fractions import Fraction

        def fstr(v):
            f = Fraction(v)
            return str(f.numerator) if f.denominator == 1 else \
                f"{f.numerator}/{f.denominator}"

        return {
            "r": self.r,
            "blocks": [
                {"grading": [fstr(g) for g in key], "rank": b.rank,
                 "d_r_rank": b.d_rank}
                for key, b in sorted(self.blocks.items()) if b.rank
            ],
            "stabilized": self.stabilized,
            "e_infinity_total": self.e_infinity_total,
        }


class _BlockCascade:
    """Staircase spectral-sequence data for one Alexander block."""

    def __init__(self, gens, D, T):
        self.gens = gens
        self.n = len(gens)
        self.D = D
        self.T = T
        self.imD = Gf2Space((D.T if D.size else None), width=self.n)
        kernel = gf2_kernel(D)
        # W_1 = {(v, v) : v in ker D}
        rows = [np.concatenate([v, v]) for v in kernel]
        self.W = Gf2Space(rows if rows else None, width=2 * self.n)
        self.kerD = kernel
        self.prev_ends = None  # proj2 of W_{r-1}

    def step(self):
        """Advance W_r -> W_{r+1}; returns nothing."""
        n = self.n
        basis = self.W.basis
        self.prev_ends = basis[:, n:] if basis.size else np.zeros((0, n),
                                                                  np.uint8)
        if basis.size == 0:
            self.W = Gf2Space(width=2 * n)
            return
        residues = []
        for row in basis:
            u = row[n:]
            residues.append(self.imD.reduce(self.T @ u % 2))
        residues = np.array(residues, dtype=np.uint8)
        combos = gf2_kernel(residues.T) if residues.size else \
            np.eye(len(basis), dtype=np.uint8)
        new_rows = []
        for c in combos:
            pair = np.zeros(2 * n, dtype=np.uint8)
            for i, ci in enumerate(c):
                if ci:
                    pair ^= basis[i]
            v, u = pair[:n], pair[n:]
            w = gf2_solve(self.D, self.T @ u % 2)
            assert w is not None
            new_rows.append(np.concatenate([v, w]))
        for k in self.kerD:
            new_rows.append(np.concatenate([np.zeros(n, np.uint8), k]))
        self.W = Gf2Space(new_rows if new_rows else None, width=2 * n)

    def page_spaces(self):
        """(Z_r, B_r) for the current page."""
        n = self.n
        basis = self.W.basis
        Z = Gf2Space(basis[:, :n] if basis.size else None, width=n)
        B = self.imD
        if self.prev_ends is not None and self.prev_ends.size:
            tb = (self.prev_ends @ self.T.T) % 2
            B = B.extended(tb)
        return Z, B

    def d_targets(self):
        """Span of d_r images: T applied to the staircase ends."""
        basis = self.W.basis
        n = self.n
        if basis.size == 0:
            return np.zeros((0, n), dtype=np.uint8)
        return (basis[:, n:] @ self.T.T) % 2


def tate_total_matrix(cx, tau, block=None):
    """The matrix of d + theta(1 + tau) over F2[theta] (bitmask ints).

    With ``block`` a list of generators, restricts to their span.
    """
    gens = block if block is not None else list(cx.generators)
    idx = [cx.index[g] for g in gens]
    D = cx.matrix[np.ix_(idx, idx)]
    P = tau.matrix[np.ix_(idx, idx)]
    n = len(gens)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            val = int(D[i, j])
            t = (1 if i == j else 0) ^ int(P[i, j])
            out[i][j] = val | (t << 1)
    return out


def snf_over_poly(matrix):
    """Elementary divisors theta^k (bitmask ints) of an F2[theta] matrix."""
    return poly_smith_normal_form(matrix)


def _block_partition(cx, tau):
    by_block = {}
    for g in cx.generators:
        by_block.setdefault(cx.block_grading(g), []).append(g)
    # tau preserves the block gradings, so blocks are tau-closed.
    return dict(sorted(by_block.items()))


def tate_pages(cx, tau, r_max=None):
    """Pages E_1, E_2, ... of the localization spectral sequence.

    Stops early once every block rank equals the Smith-form rank of
    d + theta(1+tau) over F2((theta)); the returned pages carry a
    ``stabilized`` flag and certified E-infinity total.
    """
    if r_max is None:
        r_max = 2 * len(cx.generators)
    blocks = _block_partition(cx, tau)
    cascades = {}
    e_inf = {}
    for key, gens in blocks.items():
        idx = [cx.index[g] for g in gens]
        D = cx.matrix[np.ix_(idx, idx)]
        P = tau.matrix[np.ix_(idx, idx)]
        T = (np.eye(len(gens), dtype=np.uint8) ^ P)
        cascades[key] = _BlockCascade(gens, D, T)
        divisors = snf_over_poly(tate_total_matrix(cx, tau, gens))
        e_inf[key] = len(gens) - 2 * len(divisors)
    e_inf_total = sum(e_inf.values())

    pages = []
    r = 1
    while r <= max(r_max, 1):
        page_blocks = {}
        total = 0
        for key, casc in cascades.items():
            Z, B = casc.page_spaces()
            BZ = B.intersection(Z)
            rank = Z.dim - BZ.dim
            # boundaries should already be cycles on every page
            assert BZ.dim == B.dim, "page boundaries escaped the cycles"
            d_img = casc.d_targets()
            d_rank = B.extended(d_img).dim - B.dim if d_img.size else 0
            reps = []
            added = B
            for v in Z.basis:
                if not added.contains(v):
                    added = added.extended([v])
                    reps.append(tuple(casc.gens[i] for i in np.nonzero(v)[0]))
            page_blocks[key] = TateBlock(key, casc.gens, rank, d_rank, reps,
                                         Z=Z, B=B, pairs=casc.W, T=casc.T)
            total += rank
        stabilized = total == e_inf_total
        pages.append(TatePage(r, page_blocks, stabilized, e_inf_total))
        if stabilized:
            break
        for casc in cascades.values():
            casc.step()
        r += 1
    else:
        pass
    # Consistency: rank bookkeeping between consecutive pages.
    for a, b in zip(pages, pages[1:]):
        for key in a.blocks:
            drop = a.blocks[key].rank - b.blocks[key].rank
            assert drop == 2 * a.blocks[key].d_rank, \
                f"rank bookkeeping failed in block {key}"
    return pages


def d_r_value(page, grading, gens):
    """Apply d_r to a class on the given page.

    Returns (image generator sum, theta power).  The image is defined
    up to boundaries of the page; compare with TateBlock.classes_equal.
    """
    block = page.block(grading)
    v = block.vector(gens)
    img = block.d_apply(v)
    if img is None:
        raise CorrespondenceViolationError(
            f"{gens} does not survive to page {page.r}")
    out = tuple(block.generators[i] for i in np.nonzero(img)[0])
    return out, page.r


# ---------------------------------------------------------------------------
# Cover/quotient grading correspondence
# ---------------------------------------------------------------------------


def grading_correspondence(pages_cover, homology_quotient, lam, flavor,
                           axis="U"):
    """Check the stabilized page against the quotient homology.

    Both inputs must carry absolutely pinned gradings.  Link flavor:
    surviving cover gradings are (1/2 + 2a, b), matching quotient
    gradings (1/2 + a, b) at equal rank.  Knot flavor: 2a + (1-lam)/2
    matches a + (1-lam)/2.  Raises CorrespondenceViolationError on any
    mismatch; returns a per-grading report otherwise.
    """
    from fractions import Fraction

    last = pages_cover[-1]
    if not last.stabilized:
        raise CorrespondenceViolationError("cover pages are not stabilized")
    first = pages_cover[0]
    quot_ranks = {}
    cx = homology_quotient.complex
    comp_names = cx.block_components
    for b in homology_quotient.blocks:
        key = tuple(b.alexander[c] for c in comp_names)
        quot_ranks[key] = quot_ranks.get(key, 0) + b.rank

    lam = Fraction(lam)
    rows = []
    half = Fraction(1, 2)

    def map_grading(key):
        if flavor == "link":
            a1, rest = key[0], key[1:]
            a = (a1 - half) / 2
            if a.denominator != 1:
                return None
            return (half + a,) + rest
        a1 = key[0]
        base = (1 - lam) / 2
        a = (a1 - base) / 2
        if a.denominator != 1:
            return None
        return (base + a,) + key[1:]

    for key, block in sorted(last.blocks.items()):
        if block.rank == 0:
            continue
        target = map_grading(key)
        if target is None:
            raise CorrespondenceViolationError(
                f"surviving grading {key} is not of the allowed form",
                grading=key)
        qr = quot_ranks.get(target, 0)
        if qr != block.rank:
            raise CorrespondenceViolationError(
                f"rank {block.rank} at cover grading {key} vs rank {qr} at "
                f"quotient grading {target}", grading=key)
        e1 = first.rank_at(key)
        rows.append({"cover_grading": key, "quotient_grading": target,
                     "rank": block.rank, "e1_rank": e1,
                     "rank_inequality_ok": e1 >= block.rank})
    # Every nonzero quotient grading must be hit.
    hit = {tuple(r["quotient_grading"]) for r in rows}
    for key, qr in quot_ranks.items():
        if qr and key not in hit:
            raise CorrespondenceViolationError(
                f"quotient grading {key} (rank {qr}) has no surviving cover "
                "grading", grading=key)
    return {
        "flavor": flavor,
        "total_e_infinity": last.total_rank,
        "total_quotient": sum(quot_ranks.values()),
        "gradings": rows,
    }

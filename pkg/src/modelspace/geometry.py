"""Boundary arcs, Carleson windows, sub-level grids, and window scanners.

Everything on the circle is half-open: an arc is [start, start + length)
with normalized measure length / 2*pi.  The Carleson window over an arc I is

    S(I) = { |z| <= 1 : z/|z| in I, 1 - |z| <= m(I)/2 },

with its boundary included.  Scans run over the dyadic family of arcs with
lengths 2*pi*2^-k and centers at all multiples of half the length, which
approximates the continuum of arcs within a factor two in the window ratio;
a certified extremum is an extremum over that family only, and reports say
so in their resolution stamp.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .inner import InnerFunction, evaluate_modulus, _spectrum_cells
from .numerics import TWO_PI, adaptive_simpson


@dataclass(frozen=True)
class Arc:
    """Half-open boundary arc [start, start + length)."""

    start: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= TWO_PI):
            raise PreconditionError("arc length must lie in (0, 2*pi]")
        object.__setattr__(self, "start", float(self.start))
        object.__setattr__(self, "length", float(self.length))

    @property
    def measure(self) -> float:
        """Normalized measure m(I) = length / 2*pi."""
        return self.length / TWO_PI

    @property
    def center(self) -> float:
        return self.start + 0.5 * self.length

    def contains(self, angle) -> np.ndarray:
        angle = np.asarray(angle, dtype=float)
        rel = np.mod(angle - self.start, TWO_PI)
        full = self.length >= TWO_PI
        return full | (rel < self.length)

    def overlap_length(self, other: "Arc") -> float:
        """Length in radians of the intersection with another arc."""
        if self.length >= TWO_PI:
            return other.length
        if other.length >= TWO_PI:
            return self.length
        rel = np.mod(other.start - self.start, TWO_PI)
        total = 0.0
        # other may wrap past the end of self in two pieces
        total += max(0.0, min(self.length, rel + other.length) - rel)
        if rel + other.length > TWO_PI:
            total += max(0.0, min(self.length, rel + other.length - TWO_PI))
        return total


def arcs_total_measure(arcs) -> float:
    return sum(a.measure for a in arcs)


def window_contains(arc: Arc, z) -> np.ndarray:
    """Membership in the Carleson window S(I), boundary included."""
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    angle = np.angle(z)
    inside = (r <= 1.0 + 1e-12) & (r > 0.0)
    depth_ok = (1.0 - r) <= 0.5 * arc.measure + 1e-15
    return inside & depth_ok & arc.contains(angle)


def amplify(arc: Arc, n: float) -> Arc:
    """Arc with the same center and n times the length, clamped to the circle."""
    if n <= 0.0:
        raise PreconditionError("amplification factor must be positive")
    length = min(n * arc.length, TWO_PI)
    return Arc(arc.center - 0.5 * length, length)


def privalov_shadow(lam: complex, alpha: float = 1.0) -> Arc:
    """Arc centered at lam/|lam| of length alpha * (1 - |lam|)."""
    lam = complex(lam)
    if lam == 0.0 or abs(lam) >= 1.0:
        raise PreconditionError("shadow requires 0 < |lam| < 1")
    if alpha <= 0.0:
        raise PreconditionError("shadow amplification must be positive")
    length = alpha * (1.0 - abs(lam))
    return Arc(np.angle(lam) - 0.5 * length, length)


# ---------------------------------------------------------------------------
# Sub-level sets on a polar grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SublevelGrid:
    """Occupancy of {|Theta| < eps} on a polar grid refining toward T.

    Ring j (j = 1..J) sits at radius 1 - 2^-j and carries 2^(j+3) angular
    cells; a single extra cell at the origin keeps sub-level sets that
    contain the center connected through it.  Occupancy is decided at cell
    centers.
    """

    epsilon: float
    depth: int
    occupancy: tuple        # occupancy[j] is a bool array for ring j (index 0 = origin cell)

    @property
    def radial_levels(self) -> np.ndarray:
        return 1.0 - 2.0 ** (-np.arange(1, self.depth + 1, dtype=float))

    def angular_count(self, j: int) -> int:
        return 1 if j == 0 else 2 ** (j + 3)

    def ring_radius(self, j: int) -> float:
        return 0.0 if j == 0 else 1.0 - 2.0 ** (-j)

    def cell_centers(self, j: int) -> np.ndarray:
        count = self.angular_count(j)
        return self.ring_radius(j) * np.exp(1j * (np.arange(count) + 0.5) * TWO_PI / count)

    def occupied_points(self) -> np.ndarray:
        """Complex coordinates of all occupied cell centers."""
        points = []
        for j in range(self.depth + 1):
            mask = self.occupancy[j]
            if np.any(mask):
                points.append(self.cell_centers(j)[mask])
        if not points:
            return np.zeros(0, dtype=complex)
        return np.concatenate(points)

    def occupied_diagonals(self) -> np.ndarray:
        """Characteristic size of each occupied cell (radial gap + angular span)."""
        sizes = []
        for j in range(self.depth + 1):
            mask = self.occupancy[j]
            if not np.any(mask):
                continue
            if j == 0:
                cell = 0.5
            else:
                radial = 2.0 ** (-j) - (2.0 ** (-j - 1) if j < self.depth else 0.0)
                angular = TWO_PI / self.angular_count(j)
                cell = float(np.hypot(radial, angular))
            sizes.append(np.full(int(np.sum(mask)), cell))
        if not sizes:
            return np.zeros(0)
        return np.concatenate(sizes)


def sublevel_grid(theta: InnerFunction, epsilon: float, depth: int = 12) -> SublevelGrid:
    """Occupancy grid of the sub-level set L(Theta, eps) = {|Theta| < eps}."""
    if not (0.0 < epsilon < 1.0):
        raise PreconditionError("epsilon must lie in (0, 1)")
    if depth < 8:
        raise PreconditionError("grid depth must be at least 8")
    occupancy = [np.array([evaluate_modulus(theta, np.array([0.0 + 0.0j]))[0] < epsilon])]
    for j in range(1, depth + 1):
        count = 2 ** (j + 3)
        centers = (1.0 - 2.0 ** (-j)) * np.exp(1j * (np.arange(count) + 0.5) * TWO_PI / count)
        occupancy.append(evaluate_modulus(theta, centers) < epsilon)
    return SublevelGrid(epsilon=epsilon, depth=depth, occupancy=tuple(occupancy))


def cls_test(grid: SublevelGrid):
    """Connected-components test for the occupied cells.

    4-neighborhood: angular neighbors within a ring (with wraparound) and
    radial neighbors between ring j cell k and ring j+1 cells 2k, 2k+1.
    Returns (connected, component_count).
    """
    labels = []
    total = 0
    for j in range(grid.depth + 1):
        mask = grid.occupancy[j]
        lab = -np.ones(mask.shape[0], dtype=int)
        idx = np.flatnonzero(mask)
        lab[idx] = total + np.arange(idx.size)
        total += idx.size
        labels.append(lab)
    if total == 0:
        raise PreconditionError("epsilon below minimum modulus")

    parent = np.arange(total)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri

    for j in range(grid.depth + 1):
        lab = labels[j]
        count = grid.angular_count(j)
        occ = grid.occupancy[j]
        if count > 1:
            nxt = np.roll(occ, -1)
            for k in np.flatnonzero(occ & nxt):
                union(lab[k], lab[(k + 1) % count])
        if j < grid.depth:
            below = labels[j + 1]
            occ_below = grid.occupancy[j + 1]
            for k in np.flatnonzero(occ):
                for kk in ((2 * k, 2 * k + 1) if j > 0 else range(grid.angular_count(1))):
                    if occ_below[kk]:
                        union(lab[k], below[kk])
    roots = {find(i) for i in range(total)}
    return len(roots) == 1, len(roots)


# ---------------------------------------------------------------------------
# Whitney decomposition of the free boundary
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WhitneyArc:
    arc: Arc
    integral: float
    terminal: bool


def distance_to_sublevel(grid: SublevelGrid):
    """Distance function to the occupied cell centers (vectorized in angle).

    The resolution error is at most one cell diagonal of the nearest
    occupied cell; callers receive the diagonals alongside for stamping.
    """
    points = grid.occupied_points()
    if points.size == 0:
        raise PreconditionError("epsilon below minimum modulus")

    def dist(angle):
        z = np.exp(1j * np.atleast_1d(np.asarray(angle, dtype=float)))
        d = np.min(np.abs(z[:, None] - points[None, :]), axis=1)
        return d if d.size > 1 else float(d[0])

    return dist


def whitney_decompose(theta: InnerFunction, epsilon: float, delta: float,
                      resolution: float = TWO_PI / 512, depth: int = 14):
    """Arcs I_k tiling the free boundary with integral_{I_k} d_eps^{-1} dm = delta.

    The free boundary is the complement of the grid-scale spectrum estimate;
    each of its components is swept left to right, cutting an arc whenever
    the accumulated integral of the inverse distance to the sub-level grid
    reaches delta.  Component remainders with integral < delta are emitted
    flagged as terminal.
    """
    if not (0.0 < delta < 0.5):
        raise PreconditionError("delta must lie in (0, 1/2)")
    grid = sublevel_grid(theta, epsilon, depth)
    dist = distance_to_sublevel(grid)

    count = max(int(round(TWO_PI / resolution)), 64)
    flagged = _spectrum_cells(theta, count)
    if np.all(flagged):
        raise PreconditionError("no free boundary")
    components = _free_components(flagged, count)

    def integrand(t):
        return 1.0 / dist(t)

    out = []
    for lo, hi in components:
        remaining = adaptive_simpson(integrand, lo, hi, tol=1e-12) / TWO_PI
        pos = lo
        while pos < hi - 1e-13:
            if remaining < delta:
                out.append(WhitneyArc(Arc(pos, hi - pos), remaining, True))
                break
            cut = _locate_cut(integrand, pos, hi, delta)
            out.append(WhitneyArc(Arc(pos, cut - pos), delta, False))
            remaining -= delta
            pos = cut
    return out


def _free_components(flagged: np.ndarray, count: int):
    """Maximal unflagged runs of cells, as (start, end) angle intervals."""
    h = TWO_PI / count
    free = ~flagged
    if np.all(free):
        return [(0.0, TWO_PI)]
    idx = np.flatnonzero(free)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    runs = np.split(idx, breaks + 1)
    # circular merge: run touching the end wraps onto a run starting at 0
    if len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == count - 1:
        first = runs.pop(0)
        runs[-1] = np.concatenate([runs[-1], first + count])
    return [(h * run[0], h * (run[-1] + 1)) for run in runs]


def _locate_cut(integrand, start, limit, delta):
    """The t with integral_start^t f dm = delta, by incremental bisection.

    The integral up to the running left endpoint is accumulated, so each
    bisection step only integrates the shrinking [lo, mid] piece.
    """
    lo, hi = start, limit
    acc = 0.0
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        inc = adaptive_simpson(integrand, lo, mid, tol=1e-13) / TWO_PI
        if acc + inc < delta:
            lo = mid
            acc += inc
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Dyadic window scans
# ---------------------------------------------------------------------------

def dyadic_arcs(max_depth: int):
    """The dyadic family: lengths 2*pi*2^-k, centers at multiples of half-length."""
    for k in range(max_depth + 1):
        length = TWO_PI * 2.0 ** (-k)
        for j in range(2 ** (k + 1)):
            yield k, j, Arc(j * 0.5 * length - 0.5 * length, length)


def window_mass(mu, arc: Arc) -> float:
    """mu(S(I)): atom masses inside the window plus boundary-density overlap."""
    locs = np.array([x for x, _ in mu.atoms], dtype=complex)
    masses = np.array([w for _, w in mu.atoms])
    return _window_mass(arc, locs, masses, mu.density_pieces)


def _window_mass(arc, locs, masses, pieces) -> float:
    total = 0.0
    if locs.size:
        total += float(np.sum(masses[window_contains(arc, locs)]))
    for piece, d in pieces:
        if d > 0.0:
            total += d * arc.overlap_length(piece) / TWO_PI
    return total


def window_scan(mu, max_depth: int = 12, restriction=None, mode: str = "sup"):
    """Extremal ratio mu(S(I))/m(I) over the restricted dyadic family.

    ``restriction`` is None, ``("sublevel", theta, eps, n_amplify)`` per the
    reverse-embedding certificate (keep arcs whose amplified window meets the
    sub-level grid), or ``("meets_set", arcs)`` (keep arcs meeting the set).
    Returns ``(value, witness)`` where witness identifies the extremal arc;
    ties break toward the smallest (depth, center index).
    """
    if mode not in ("sup", "inf"):
        raise PreconditionError("mode must be 'sup' or 'inf'")
    admit = _restriction_test(restriction)
    locs = np.array([x for x, _ in mu.atoms], dtype=complex)
    masses = np.array([w for _, w in mu.atoms])
    best = None
    witness = None
    for k, j, arc in dyadic_arcs(max_depth):
        if not admit(arc):
            continue
        ratio = _window_mass(arc, locs, masses, mu.density_pieces) / arc.measure
        better = (best is None or (ratio > best if mode == "sup" else ratio < best))
        if better:
            best = ratio
            witness = {"depth": k, "index": j, "start": arc.start, "length": arc.length}
    if best is None:
        raise PreconditionError("empty family")
    return best, witness


def _restriction_test(restriction):
    if restriction is None:
        return lambda arc: True
    kind = restriction[0]
    if kind == "sublevel":
        _, theta, eps, n_amp = restriction
        grid = theta if isinstance(theta, SublevelGrid) else sublevel_grid(theta, eps)
        points = grid.occupied_points()

        def admit(arc):
            if points.size == 0:
                return False
            return bool(np.any(window_contains(amplify(arc, n_amp), points)))

        return admit
    if kind == "meets_set":
        arcs = restriction[1]

        def admit(arc):
            return any(arc.overlap_length(a) > 0.0 for a in arcs)

        return admit
    raise PreconditionError("unknown restriction kind")

"""Radial binning utilities shared by the integrator diagnostics and the
post-processing module.

Nodes at (numerically) equal radius form a *ring*; angular spread is always
measured within rings, so a radial field reports zero asymmetry on the
symmetric disk meshes produced by the generator.
"""

from dataclasses import dataclass

import numpy as np

_RING_DECIMALS = 9


@dataclass(frozen=True)
class RingStructure:
    """Groups of node indices at equal radius, sorted by radius."""

    radii: np.ndarray          # one entry per ring
    groups: tuple              # tuple of index arrays
    node_radii: np.ndarray
    weights: np.ndarray        # lumped-mass node weights


def ring_structure(mesh, weights=None):
    r = mesh.node_radii()
    if weights is None:
        from .assembly import assemble_mass

        weights = assemble_mass(mesh, lumped=True).diagonal()
    key = np.round(r, _RING_DECIMALS)
    order = np.argsort(key, kind="stable")
    uniq, starts = np.unique(key[order], return_index=True)
    groups = tuple(np.sort(g) for g in np.split(order, starts[1:]))
    return RingStructure(radii=uniq, groups=groups, node_radii=r, weights=weights)


@dataclass(frozen=True)
class RadialProfile:
    """Area-weighted radial bin means with per-bin angular spread."""

    r_centers: np.ndarray
    means: np.ndarray
    spread: np.ndarray       # max over rings in the bin of (ring max - min)
    bin_edges: np.ndarray    # left edges, plus final right edge
    merged: np.ndarray       # True where an empty bin was folded in

    @property
    def center_value(self):
        return float(self.means[0])

    @property
    def argmax_radius(self):
        return float(self.r_centers[int(np.argmax(self.means))])


def radial_profile(mesh, field, n_bins, rings=None):
    """Bin a nodal field into radial annuli.

    Bin means use lumped-mass weights; empty bins are merged into the
    previous nonempty bin and flagged.
    """
    if n_bins < 2:
        raise ValueError("need at least two radial bins")
    field = np.asarray(field, dtype=float)
    rings = rings or ring_structure(mesh)
    r = rings.node_radii
    w = rings.weights
    r_max = float(r.max())
    edges = np.linspace(0.0, r_max, n_bins + 1)
    idx = np.clip(np.searchsorted(edges, r, side="right") - 1, 0, n_bins - 1)

    wsum = np.bincount(idx, weights=w, minlength=n_bins)
    fsum = np.bincount(idx, weights=w * field, minlength=n_bins)
    rsum = np.bincount(idx, weights=w * r, minlength=n_bins)

    ring_bin = np.clip(
        np.searchsorted(edges, rings.radii, side="right") - 1, 0, n_bins - 1
    )
    spread_per_bin = np.zeros(n_bins)
    for ring_idx, g in enumerate(rings.groups):
        vals = field[g]
        s = float(vals.max() - vals.min())
        b = ring_bin[ring_idx]
        if s > spread_per_bin[b]:
            spread_per_bin[b] = s

    centers, means, spreads, lefts, merged = [], [], [], [], []
    pend_w = pend_f = pend_r = pend_s = 0.0
    pend_left = 0.0
    pend_merge = False
    for i in range(n_bins):
        pend_w += wsum[i]
        pend_f += fsum[i]
        pend_r += rsum[i]
        pend_s = max(pend_s, spread_per_bin[i])
        if wsum[i] == 0.0:
            pend_merge = True
            continue
        centers.append(pend_r / pend_w)
        means.append(pend_f / pend_w)
        spreads.append(pend_s)
        lefts.append(pend_left)
        merged.append(pend_merge)
        pend_w = pend_f = pend_r = pend_s = 0.0
        pend_left = edges[i + 1]
        pend_merge = False
    if pend_merge and centers:
        # trailing empty bins extend the last one
        merged[-1] = True
    lefts.append(r_max)
    return RadialProfile(
        r_centers=np.array(centers),
        means=np.array(means),
        spread=np.array(spreads),
        bin_edges=np.array(lefts),
        merged=np.array(merged, dtype=bool),
    )


def radial_phase_curve(mesh, u_field, v_field, n_bins, rings=None):
    """Bin-mean (u, v) pairs ordered from the boundary to the center."""
    rings = rings or ring_structure(mesh)
    pu = radial_profile(mesh, u_field, n_bins, rings=rings)
    pv = radial_profile(mesh, v_field, n_bins, rings=rings)
    return np.column_stack([pu.means[::-1], pv.means[::-1]])


def wavefront_radius(profile, fraction):
    """Smallest radius at which the profile reaches ``fraction`` of its peak.

    Returns the left edge of the first qualifying bin, or ``None`` for an
    all-zero profile (no wave).
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must lie in (0, 1)")
    peak = float(profile.means.max())
    if peak <= 0.0:
        return None
    qualifying = np.nonzero(profile.means >= fraction * peak)[0]
    return float(profile.bin_edges[qualifying[0]])


def asymmetry_index(mesh, field, n_bins=None, rings=None):
    """Max angular spread within any equal-radius ring, relative to the
    global field range. Exactly zero for radial fields; ~1 for a pure
    angular mode such as ``field = x``.
    """
    field = np.asarray(field, dtype=float)
    rings = rings or ring_structure(mesh)
    spread = 0.0
    for g in rings.groups:
        vals = field[g]
        s = float(vals.max() - vals.min())
        if s > spread:
            spread = s
    rng = float(field.max() - field.min())
    return spread / (rng + 1e-300)

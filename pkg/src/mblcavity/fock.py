"""Multi-particle sectors around a probe mode, their Hamiltonian and hopping trees.

A sector holds states with exactly one high photon (``k > j0``): the probe
photon itself, then the probe split into a lower high mode plus one or two low
photons. V conserves the high-photon number, so such a sector is closed under
V up to the energy window.
"""

import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .interaction import _amp
from .line import mode_spacing
from .numerics import eigh_symmetric
from .states import FockState

DEFAULT_WINDOW_SPACINGS = 4.0


@dataclass(frozen=True)
class FockSector:
    probe_k: int
    states: tuple
    max_particles: int
    energy_window: float
    energies: np.ndarray
    j0: int

    @property
    def size(self):
        return len(self.states)

    @property
    def generations(self):
        return np.array([s.n_particles for s in self.states])

    def index(self, state):
        return self.states.index(state)


def default_window(sp, probe_k, line, spacings=DEFAULT_WINDOW_SPACINGS):
    return spacings * mode_spacing(sp.f(probe_k), line)


def enumerate_sector(probe_k, sp, max_particles=2, energy_window=None, j0=None, line=None, complete=False):
    """Basis of up to ``max_particles`` photons around dressed mode ``probe_k``.

    Generation 2 holds ``a+_k' a+_i |0>`` with ``j0 < k' < probe_k`` and
    ``1 <= i <= j0``; generation 3 adds a second low photon ``i <= i'``
    (``i = i'`` included). States further than ``energy_window`` (GHz) from
    ``f_probe`` are dropped.

    :param energy_window: defaults to four local mode spacings (needs ``line``).
    :param complete: drop the ``k' < probe_k`` rule and add the other
        one-photon states to generation 1, giving every state V can reach
        from the probe within the particle cap. Only useful for exactness
        checks on toy systems.
    """
    j0 = sp.j0 if j0 is None else j0
    if probe_k <= j0:
        raise InputError(f"probe mode {probe_k} must exceed j0 = {j0}")
    if probe_k > sp.f_dressed.shape[0]:
        raise InputError(f"probe mode {probe_k} beyond the dressed ladder")
    if max_particles not in (1, 2, 3):
        raise InputError("max_particles must be 1, 2 or 3")
    if energy_window is None:
        if line is None:
            raise InputError("energy_window or line parameters required")
        energy_window = default_window(sp, probe_k, line)
    if not energy_window > 0:
        raise InputError("energy_window must be positive")
    f = sp.f_dressed
    f_probe = f[probe_k - 1]
    k_max = f.shape[0] if complete else probe_k - 1

    states = [FockState.of(probe_k)]
    energies = [f_probe]
    if complete:
        for k in range(j0 + 1, k_max + 1):
            if k != probe_k and abs(f[k - 1] - f_probe) <= energy_window:
                states.append(FockState.of(k))
                energies.append(f[k - 1])
    for gen in range(2, max_particles + 1):
        batch = []
        for kp in range(j0 + 1, k_max + 1):
            if kp == probe_k and not complete:
                continue
            for lows in _low_multisets(j0, gen - 1):
                e = f[kp - 1] + sum(f[i - 1] for i in lows)
                if abs(e - f_probe) <= energy_window:
                    batch.append((FockState.of(kp, *lows), e))
        batch.sort(key=lambda se: se[0])
        states.extend(s for s, _ in batch)
        energies.extend(e for _, e in batch)
    return FockSector(probe_k=probe_k, states=tuple(states), max_particles=max_particles,
                      energy_window=float(energy_window), energies=np.array(energies), j0=j0)


def _low_multisets(j0, n):
    if n == 1:
        return [(i,) for i in range(1, j0 + 1)]
    return [(i, i2) for i in range(1, j0 + 1) for i2 in range(i, j0 + 1)]


def _split(state, j0):
    low = tuple((k, n) for k, n in state.occupations if k <= j0)
    high = tuple((k, n) for k, n in state.occupations if k > j0)
    return low, high


def _add_low(low, j):
    d = dict(low)
    d[j] = d.get(j, 0) + 1
    return tuple(sorted(d.items()))


def _down_element(ip, n_occ, n_high, m_high, j):
    """``<m|V|n>`` for a down-conversion adding low photon ``j``.

    Terms are accumulated in the order ``apply_V`` uses, so both routes give
    identical floats.
    """
    nj = n_occ.get(j, 0)
    if n_high == m_high:
        acc = 0.0
        for k, nk in n_high:
            acc += _amp(ip, j, k, k, nk * nk * (nj + 1))
        return acc
    src = dict(n_high)
    dst = dict(m_high)
    lost = [k for k in src if dst.get(k, 0) == src[k] - 1]
    gained = [k for k in dst if dst[k] == src.get(k, 0) + 1]
    changed = set(src) | set(dst)
    if len(lost) != 1 or len(gained) != 1 or any(
            dst.get(k, 0) != src.get(k, 0) for k in changed - {lost[0], gained[0]}):
        return None
    k, kp = lost[0], gained[0]
    if kp not in ip.high_modes or k not in ip.high_modes:
        return None
    return 0.0 + _amp(ip, j, k, kp, src[k] * (src.get(kp, 0) + 1) * (nj + 1))


def assemble_hamiltonian(sector, ip):
    """Sector matrix: unperturbed energies on the diagonal, V elements off it."""
    n = sector.size
    h = np.zeros((n, n))
    h[np.diag_indices(n)] = sector.energies
    if ip.g_scale == 0.0 or n == 1:
        return h
    j0 = ip.j0
    by_low = defaultdict(list)
    parts = []
    for idx, s in enumerate(sector.states):
        low, high = _split(s, j0)
        parts.append((low, high))
        by_low[low].append(idx)
    for col, s in enumerate(sector.states):
        low, high = parts[col]
        occ = s.as_dict()
        for j in range(1, j0 + 1):
            for row in by_low.get(_add_low(low, j), ()):
                amp = _down_element(ip, occ, high, parts[row][1], j)
                if amp is not None:
                    h[row, col] = amp
                    h[col, row] = amp
    return h


@dataclass(frozen=True)
class ManyBodyEigensystem:
    frequencies: np.ndarray
    vectors: np.ndarray
    sp_weight: np.ndarray
    sector: FockSector

    def brightest(self):
        """Index of the eigenstate with the largest probe weight; ties go to the one nearest the probe."""
        f_probe = self.sector.energies[0]
        w = self.sp_weight
        best = np.flatnonzero(w == w.max())
        return int(best[np.argmin(np.abs(self.frequencies[best] - f_probe))])

    def components(self, i, count=5):
        v = self.vectors[:, i]
        order = np.argsort(-np.abs(v), kind="stable")[:count]
        return [(self.sector.states[m], float(v[m])) for m in order]

    def to_json(self, top=5):
        return {
            "probe_k": self.sector.probe_k,
            "energy_window_GHz": self.sector.energy_window,
            "states": [s.to_json() for s in self.sector.states],
            "eigenstates": [
                {"f_GHz": float(self.frequencies[i]), "sp_weight": float(self.sp_weight[i]),
                 "components": [{"state": s.to_json(), "amplitude": a}
                                for s, a in self.components(i, top)]}
                for i in range(self.frequencies.shape[0])
            ],
        }


def diagonalize_sector(h, sector):
    es = eigh_symmetric(h)
    vecs = es.vectors
    # fix the gauge so the probe component is nonnegative where present
    sign = np.where(vecs[0] < 0, -1.0, 1.0)
    vecs = vecs * sign
    return ManyBodyEigensystem(frequencies=es.values, vectors=vecs,
                               sp_weight=vecs[0] ** 2, sector=sector)


@dataclass(frozen=True)
class TreeEdge:
    parent: FockState
    child: FockState
    amplitude: float
    mismatch: float

    @property
    def strength(self):
        return abs(self.amplitude) / abs(self.mismatch) if self.mismatch else math.inf


@dataclass(frozen=True)
class HoppingTree:
    root: FockState
    nodes: tuple
    edges: tuple = field(default_factory=tuple)

    def children(self, node):
        return [e for e in self.edges if e.parent == node]

    def dominant_child(self, node):
        """Child with the largest amplitude-to-mismatch ratio, or None."""
        kids = self.children(node)
        return max(kids, key=lambda e: (e.strength, abs(e.amplitude))).child if kids else None

    def to_json(self):
        return {
            "root": self.root.to_json(),
            "nodes": [{"state": s.to_json(), "generation": g} for s, g in self.nodes],
            "edges": [{"parent": e.parent.to_json(), "child": e.child.to_json(),
                       "amplitude_GHz": e.amplitude, "mismatch_GHz": e.mismatch} for e in self.edges],
        }

    def render(self):
        lines = [f"{self.root}"]
        seen = set()

        def walk(node, depth):
            for e in sorted(self.children(node), key=lambda e: -e.strength):
                mark = "" if e.child not in seen else " (shared)"
                lines.append(f"{'  ' * depth}{e.child}  V={e.amplitude * 1e3:+.3f} MHz  "
                             f"dE={e.mismatch * 1e3:+.3f} MHz{mark}")
                if e.child not in seen:
                    seen.add(e.child)
                    walk(e.child, depth + 1)

        walk(self.root, 1)
        return "\n".join(lines) + "\n"


def build_tree(sector, h, root=0):
    """Breadth-first hopping tree: keep ``m -> n`` when ``|H_mn| > |H_mm - H_nn|``
    and ``n`` carries one photon more than ``m``."""
    gens = sector.generations
    diag = np.diag(h)
    nodes = [(sector.states[root], int(gens[root]))]
    edges = []
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for m in frontier:
            for n in np.flatnonzero(gens == gens[m] + 1):
                amp = h[m, n]
                mismatch = diag[n] - diag[m]
                if abs(amp) > abs(mismatch):
                    edges.append(TreeEdge(sector.states[m], sector.states[n], float(amp), float(mismatch)))
                    if n not in seen:
                        seen.add(n)
                        nxt.append(int(n))
                        nodes.append((sector.states[n], int(gens[n])))
        frontier = nxt
    return HoppingTree(root=sector.states[root], nodes=tuple(nodes), edges=tuple(edges))


def dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")

"""Redundancy lattice, MMI redundancy, Moebius inversion and coarse-graining.

Sources are the pasts of the N units, the target is the present network
state. Unit indices are 0-based in the API; atoms print 1-based, e.g.
``{1}{23}``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import ConsistencyError, InputError
from .gaussian_info import (
    InfoContext,
    predictive_information,
    subset_mutual_information,
    to_bits,
)

MAX_SOURCES = 5
IDENTITY_TOL = 1e-9
NEGATIVE_ATOM_TOL = 1e-10
SCHEMA = "predinfo.prid/1"


def _part_key(part: tuple) -> tuple:
    return (len(part), part)


@dataclass(frozen=True)
class Atom:
    """An antichain of non-empty source subsets, kept in canonical order."""

    parts: tuple

    def __post_init__(self):
        parts = tuple(sorted({tuple(sorted(set(int(i) for i in p))) for p in self.parts}, key=_part_key))
        if not parts or any(len(p) == 0 for p in parts):
            raise InputError("an atom needs at least one non-empty part")
        sets = [set(p) for p in parts]
        for i, a in enumerate(sets):
            for j, b in enumerate(sets):
                if i != j and a <= b:
                    raise InputError(f"parts {parts[i]} and {parts[j]} are nested")
        object.__setattr__(self, "parts", parts)

    @property
    def key(self) -> tuple:
        return tuple(_part_key(p) for p in self.parts)

    @property
    def n_singletons(self) -> int:
        return sum(len(p) == 1 for p in self.parts)

    def __str__(self) -> str:
        sep = "" if all(i < 9 for p in self.parts for i in p) else ","
        return "".join("{" + sep.join(str(i + 1) for i in p) + "}" for p in self.parts)


def atom_leq(a: Atom, b: Atom) -> bool:
    """``a`` lies below ``b``: every part of ``b`` contains some part of ``a``."""
    return all(any(set(r) <= set(q) for r in a.parts) for q in b.parts)


def _subsets_canonical(n: int) -> list:
    subs = []
    for mask in range(1, 1 << n):
        subs.append(tuple(i for i in range(n) if mask >> i & 1))
    return sorted(subs, key=_part_key)


def _antichains(n: int) -> list:
    subs = [frozenset(s) for s in _subsets_canonical(n)]
    out = []

    def extend(start, chosen):
        for k in range(start, len(subs)):
            s = subs[k]
            if all(not (s <= c or c <= s) for c in chosen):
                chosen.append(s)
                out.append(tuple(tuple(sorted(c)) for c in chosen))
                extend(k + 1, chosen)
                chosen.pop()

    extend(0, [])
    return out


@dataclass(frozen=True, eq=False)
class RedundancyLattice:
    """All atoms over ``n_sources`` with the order relation precomputed.

    ``leq[i, j]`` is true iff ``atoms[i] <= atoms[j]``. ``order`` is a linear
    extension (down-set size, then canonical key); ``indptr``/``indices``
    list the strict down-set of every atom in CSR form.
    """

    n_sources: int
    atoms: tuple
    leq: np.ndarray
    order: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    index: dict = field(repr=False)

    def __len__(self):
        return len(self.atoms)

    @property
    def top(self) -> Atom:
        return Atom((tuple(range(self.n_sources)),))

    @property
    def bottom(self) -> Atom:
        return Atom(tuple((i,) for i in range(self.n_sources)))

    def down_set(self, atom: Atom) -> list:
        i = self.index[atom]
        return [self.atoms[j] for j in np.flatnonzero(self.leq[:, i])]


def order_masks(n_sources: int, atoms) -> tuple:
    """Bitmask encoding of atoms over the nonempty subsets of the sources.

    ``parts_mask[i]`` has one bit per part of atom ``i``; ``up_mask[i]`` has
    one bit per subset containing some part of atom ``i``. Then ``a <= b``
    exactly when every part of ``b`` is in the up-set of ``a``.
    """
    subs = _subsets_canonical(n_sources)
    bit = {s: k for k, s in enumerate(subs)}
    # up[k]: bitmask of all subsets containing subset k
    sub_up = np.zeros(len(subs), dtype=np.int64)
    for k, s in enumerate(subs):
        for m, t in enumerate(subs):
            if set(s) <= set(t):
                sub_up[k] |= np.int64(1) << m
    parts_mask = np.zeros(len(atoms), dtype=np.int64)
    up_mask = np.zeros(len(atoms), dtype=np.int64)
    for i, a in enumerate(atoms):
        for p in a.parts:
            parts_mask[i] |= np.int64(1) << bit[p]
            up_mask[i] |= sub_up[bit[p]]
    return parts_mask, up_mask


@functools.lru_cache(maxsize=None)
def build_lattice(n_sources: int) -> RedundancyLattice:
    """Enumerate every atom over ``n_sources`` sources and their order."""
    if n_sources < 1:
        raise InputError("n_sources must be >= 1")
    if n_sources > MAX_SOURCES:
        raise InputError(
            f"n_sources={n_sources} exceeds the cap of {MAX_SOURCES}: the number of "
            "atoms grows as the Dedekind numbers (7579 at N=5, ~7.8e6 at N=6)"
        )
    atoms = sorted((Atom(p) for p in _antichains(n_sources)), key=lambda a: a.key)
    parts_mask, up_mask = order_masks(n_sources, atoms)
    leq = _kernels.leq_matrix(parts_mask, up_mask)
    leq.setflags(write=False)

    down_size = leq.sum(axis=0)
    order = np.array(sorted(range(len(atoms)), key=lambda i: (down_size[i], atoms[i].key)))
    strict = leq.copy()
    np.fill_diagonal(strict, False)
    cols = [np.flatnonzero(strict[:, i]) for i in range(len(atoms))]
    indptr = np.zeros(len(atoms) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(c) for c in cols])
    indices = np.concatenate(cols).astype(np.int64) if cols else np.zeros(0, np.int64)
    return RedundancyLattice(
        n_sources,
        tuple(atoms),
        leq,
        order,
        indptr,
        indices,
        {a: i for i, a in enumerate(atoms)},
    )


def mmi_redundancy(ctx: InfoContext, atom: Atom) -> float:
    """Minimum over the atom's parts of ``I(X_n; X^part_{<n})``."""
    return min(subset_mutual_information(ctx, p) for p in atom.parts)


def moebius_inversion(lattice: RedundancyLattice, red: Sequence[float]) -> np.ndarray:
    """Atom informations from cumulative redundancies: ``info(a) = red(a) - sum_{b < a} info(b)``."""
    red = np.asarray(red, dtype=float)
    if red.shape != (len(lattice),):
        raise InputError(f"need {len(lattice)} redundancy values, got {red.shape}")
    return _kernels.moebius(red, lattice.order, lattice.indptr, lattice.indices)


@dataclass(frozen=True)
class CoarseGrained:
    unique: tuple
    redundancy: float
    synergy: float


def atom_category(atom: Atom):
    """``"R"``, ``"S"`` or the 0-based source index the atom is unique to."""
    singles = [p[0] for p in atom.parts if len(p) == 1]
    if len(singles) >= 2:
        return "R"
    if len(singles) == 1:
        return singles[0]
    return "S"


def coarse_grain(lattice: RedundancyLattice, info: Sequence[float]) -> CoarseGrained:
    """First-order coarse-graining by the number of singleton parts of each atom.

    Two or more singletons go to redundancy, exactly one singleton ``{i}`` to
    the unique information of ``i``, none to synergy.
    """
    unique = [0.0] * lattice.n_sources
    red = syn = 0.0
    for atom, v in zip(lattice.atoms, info):
        cat = atom_category(atom)
        if cat == "R":
            red += v
        elif cat == "S":
            syn += v
        else:
            unique[cat] += v
    return CoarseGrained(tuple(unique), red, syn)


@dataclass(frozen=True)
class PridResult:
    """Whole-minus-sum and PID decompositions of the predictive information (nats)."""

    pi: float
    mi_single: tuple
    unique: tuple
    redundancy: float
    synergy: float
    delta_wms: float
    delta_pid: float
    atom_info: dict = field(default_factory=dict, compare=False)
    warnings: tuple = ()

    @property
    def n_sources(self) -> int:
        return len(self.mi_single)

    @property
    def synergy_positive(self) -> bool:
        return self.synergy > IDENTITY_TOL

    @property
    def net_synergy(self) -> bool:
        return self.delta_pid > 0

    def identity_residuals(self) -> dict:
        """Absolute residuals of the decomposition identities.

        ``pid_sum`` and ``wms_sum`` hold by construction. ``per_source`` and
        ``double_counting`` (the relation between the two balances) hold
        exactly for two sources but not in general for three or more.
        """
        n = self.n_sources
        return {
            "wms_sum": abs(self.pi - sum(self.mi_single) - self.delta_wms),
            "pid_sum": abs(self.pi - sum(self.unique) - self.redundancy - self.synergy),
            "atom_sum": abs(sum(self.atom_info.values()) - self.pi) if self.atom_info else 0.0,
            "per_source": max(
                abs(m - u - self.redundancy) for m, u in zip(self.mi_single, self.unique)
            ),
            "double_counting": abs(self.delta_wms - (self.synergy - (n - 1) * self.redundancy)),
        }

    def to_dict(self, units: str = "nats") -> dict:
        if units not in ("nats", "bits"):
            raise InputError(f"units must be 'nats' or 'bits', got {units!r}")
        conv = to_bits if units == "bits" else float
        return {
            "schema": SCHEMA,
            "units": units,
            "pi": conv(self.pi),
            "mi_single": [conv(v) for v in self.mi_single],
            "unique": [conv(v) for v in self.unique],
            "redundancy": conv(self.redundancy),
            "synergy": conv(self.synergy),
            "delta_wms": conv(self.delta_wms),
            "delta_pid": conv(self.delta_pid),
            "synergy_positive": bool(self.synergy_positive),
            "net_synergy": bool(self.net_synergy),
            "atoms": {k: conv(v) for k, v in self.atom_info.items()},
            "warnings": list(self.warnings),
        }


Redundancy = Callable[[InfoContext, Atom], float]


def decompose(ctx: InfoContext, redundancy: Redundancy = mmi_redundancy) -> PridResult:
    """Compute PI, single-source MIs, atom informations and both balances."""
    n = ctx.n_vars
    lattice = build_lattice(n)
    pi = predictive_information(ctx)
    # pre-pass over all 2^N - 1 subsets so atom evaluation only reads the cache
    for part in _subsets_canonical(n):
        subset_mutual_information(ctx, part)
    mi_single = tuple(subset_mutual_information(ctx, (i,)) for i in range(n))

    red = np.array([redundancy(ctx, a) for a in lattice.atoms])
    info = moebius_inversion(lattice, red)
    cg = coarse_grain(lattice, info)

    total = float(info.sum())
    tol = IDENTITY_TOL * max(1.0, abs(pi))
    if abs(total - pi) > tol:
        raise ConsistencyError(
            f"atom informations sum to {total!r} but the predictive information is {pi!r}"
        )

    warnings = list(ctx.warnings)
    negative = [str(a) for a, v in zip(lattice.atoms, info) if v < -NEGATIVE_ATOM_TOL]
    if negative:
        warnings.append(f"negative atom information at {', '.join(negative)}")

    return PridResult(
        pi=pi,
        mi_single=mi_single,
        unique=cg.unique,
        redundancy=cg.redundancy,
        synergy=cg.synergy,
        delta_wms=pi - sum(mi_single),
        delta_pid=cg.synergy - cg.redundancy,
        atom_info={str(a): float(v) for a, v in zip(lattice.atoms, info)},
        warnings=tuple(warnings),
    )


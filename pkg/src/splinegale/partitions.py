"""Interval partitions of [0,1] and nested filtrations of them.

Atoms follow the half-open convention [t_i, t_{i+1}), with the final atom
closed at 1; point lookups everywhere in the package break breakpoint ties
to the right-hand atom accordingly.  Breakpoints are stored exactly as
created and refinement checks compare stored values, never tolerances, so
that a chain built by `split_atom` never fails a refinement check through
rounding.
"""

import json
from dataclasses import dataclass

import numpy as np

from .errors import AtomTooSmall, NotARefinement

DEFAULT_MIN_ATOM = 1e-9


@dataclass(frozen=True)
class Partition:
    """Sorted breakpoints 0 = t_0 < t_1 < ... < t_m = 1 of the unit interval."""

    breakpoints: tuple
    min_atom: float = DEFAULT_MIN_ATOM

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        if len(bp) < 2:
            raise ValueError("a partition needs at least the endpoints 0 and 1")
        if bp[0] != 0.0 or bp[-1] != 1.0:
            raise ValueError("breakpoints must start at 0 and end at 1")
        if not (self.min_atom > 0.0):
            raise ValueError("min_atom must be positive")
        gaps = np.diff(bp)
        if np.any(gaps <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if gaps.min() < self.min_atom:
            raise AtomTooSmall(
                f"atom of length {gaps.min():.3e} below minimum {self.min_atom:.3e}"
            )

    @classmethod
    def unit(cls) -> "Partition":
        return cls((0.0, 1.0))

    @classmethod
    def uniform(cls, n_atoms: int) -> "Partition":
        if n_atoms < 1:
            raise ValueError("need at least one atom")
        return cls(tuple(np.linspace(0.0, 1.0, n_atoms + 1)))

    @property
    def num_atoms(self) -> int:
        return len(self.breakpoints) - 1

    def atoms(self):
        """Atoms [t_i, t_{i+1}) in order; the last one is closed at 1."""
        bp = self.breakpoints
        return [(bp[i], bp[i + 1]) for i in range(len(bp) - 1)]

    def atom_lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints))

    def atom_index(self, x: float) -> int:
        """Index of the atom containing x, half-open convention."""
        i = int(np.searchsorted(self.breakpoints, x, side="right")) - 1
        return min(max(i, 0), self.num_atoms - 1)

    def split_atom(self, atom_index: int, rel_pos: float) -> "Partition":
        """Insert one breakpoint at t_i + rel_pos * (t_{i+1} - t_i)."""
        if not 0 <= atom_index < self.num_atoms:
            raise IndexError(f"atom index {atom_index} out of range")
        if not 0.0 < rel_pos < 1.0:
            raise ValueError("rel_pos must lie strictly inside (0,1)")
        a, b = self.breakpoints[atom_index], self.breakpoints[atom_index + 1]
        cut = a + rel_pos * (b - a)
        if cut - a < self.min_atom or b - cut < self.min_atom:
            raise AtomTooSmall(
                f"split at {cut!r} leaves a child below {self.min_atom:.3e}"
            )
        bp = (
            self.breakpoints[: atom_index + 1]
            + (cut,)
            + self.breakpoints[atom_index + 1 :]
        )
        return Partition(bp, self.min_atom)

    def to_json(self) -> str:
        return json.dumps(list(self.breakpoints))

    @classmethod
    def from_json(cls, text: str) -> "Partition":
        return cls(tuple(json.loads(text)))


def is_refinement(fine: Partition, coarse: Partition) -> bool:
    """True iff every breakpoint of `coarse` occurs in `fine` (stored-value identity)."""
    return set(coarse.breakpoints) <= set(fine.breakpoints)


def common_refinement(a: Partition, b: Partition) -> Partition:
    if a.breakpoints == b.breakpoints:
        return a
    merged = tuple(sorted(set(a.breakpoints) | set(b.breakpoints)))
    gap = min(merged[i + 1] - merged[i] for i in range(len(merged) - 1))
    return Partition(merged, min_atom=min(a.min_atom, b.min_atom, gap))


@dataclass(frozen=True)
class Filtration:
    """A nested sequence of partitions; level n+1 refines level n."""

    levels: tuple
    elementary: bool = False

    def __post_init__(self):
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        if not levels:
            raise ValueError("a filtration needs at least one level")
        for n in range(len(levels) - 1):
            if not is_refinement(levels[n + 1], levels[n]):
                raise NotARefinement(f"level {n + 1} does not refine level {n}")
            if self.elementary and (
                len(levels[n + 1].breakpoints) != len(levels[n].breakpoints) + 1
            ):
                raise ValueError(
                    f"elementary filtration must add exactly one breakpoint "
                    f"per level, violated at level {n + 1}"
                )

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def finest(self) -> Partition:
        return self.levels[-1]

    def to_json(self) -> str:
        return json.dumps([list(p.breakpoints) for p in self.levels])

    @classmethod
    def from_json(cls, text: str, elementary: bool = False) -> "Filtration":
        data = json.loads(text)
        return cls(tuple(Partition(tuple(bp)) for bp in data), elementary)


def dyadic_filtration(depth: int) -> Filtration:
    """Uniform dyadic levels {0,1}, {0,1/2,1}, {0,1/4,...}, full split per level."""
    levels = [Partition.unit()]
    for d in range(depth):
        levels.append(Partition.uniform(2 ** (d + 1)))
    return Filtration(tuple(levels), elementary=False)

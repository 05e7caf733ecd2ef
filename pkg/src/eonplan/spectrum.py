"""Per-link frequency-slot occupancy and lightpath adjustment primitives.

A connection's slots form one contiguous block per link with identical
(start, width) on every link of its path (contiguity + continuity).  First-fit
assignment scans candidate paths shortest-first and picks the lowest feasible
start.  Expansion/reduction are hitless; only re-allocations that land on a
different (path, start) pair count as disruptions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .topology import Path, path_links

FREE = 0

# adjustment outcomes
EXPANDED = "expanded"
REDUCED = "reduced"
REALLOCATED = "reallocated"
SAME_SLOT = "same_slot"
PLACED = "placed"
BLOCKED = "blocked"
INFEASIBLE = "infeasible"
NOOP = "noop"


@dataclass
class Lightpath:
    """A connection's current allocation plus its disruption/blocking counters."""

    connection_id: str
    path: Path
    start_slot: int = 0
    width: int = 0
    bits_per_symbol: int = 1
    disruptions: int = 0
    blocked_events: int = 0

    @property
    def links(self) -> list[tuple[str, str]]:
        return path_links(self.path)


class Placement(NamedTuple):
    path: Path
    start_slot: int


class SpectrumGrid:
    """Occupancy of ``n_slots`` frequency slots on every directed link.

    Slot values: 0 free, otherwise the small integer registered for the owning
    connection id.  Single-writer: one simulation run mutates one grid.
    """

    def __init__(self, links: Iterable[tuple[str, str]], n_slots: int):
        if n_slots < 1:
            raise ValueError("n_slots must be >= 1")
        self.n_slots = n_slots
        self._occ: dict[tuple[str, str], np.ndarray] = {
            link: np.zeros(n_slots, dtype=np.int32) for link in links
        }
        self._ids: dict[str, int] = {}
        self._names: dict[int, str] = {}

    @property
    def links(self) -> list[tuple[str, str]]:
        return sorted(self._occ)

    def _code(self, connection_id: str) -> int:
        if connection_id not in self._ids:
            code = len(self._ids) + 1
            self._ids[connection_id] = code
            self._names[code] = connection_id
        return self._ids[connection_id]

    def occupancy(self, link: tuple[str, str]) -> np.ndarray:
        return self._occ[link].copy()

    def occupied_slot_count(self) -> int:
        return int(sum((arr != FREE).sum() for arr in self._occ.values()))

    def free_mask(self, path: Path) -> np.ndarray:
        """Slots simultaneously free on every link of the path."""
        mask = np.ones(self.n_slots, dtype=bool)
        for link in path_links(path):
            mask &= self._occ[link] == FREE
        return mask

    def is_free(self, path: Path, start: int, width: int) -> bool:
        if start < 0 or width < 0 or start + width > self.n_slots:
            return False
        return bool(self.free_mask(path)[start : start + width].all())

    def first_free_start(self, path: Path, width: int) -> int | None:
        """Lowest start index with ``width`` contiguous free slots on all links."""
        if width < 1 or width > self.n_slots:
            return None
        blocked = np.cumsum(~self.free_mask(path))
        runs = blocked[width - 1 :].copy()
        runs[1:] -= blocked[: self.n_slots - width]
        hits = np.flatnonzero(runs == 0)
        return int(hits[0]) if hits.size else None

    def allocate(self, connection_id: str, path: Path, start: int, width: int) -> None:
        if start < 0 or start + width > self.n_slots:
            raise ValueError(f"block [{start}, {start + width}) outside grid of {self.n_slots} slots")
        code = self._code(connection_id)
        segs = [self._occ[link][start : start + width] for link in path_links(path)]
        for link, seg in zip(path_links(path), segs):
            if np.any(seg != FREE):
                raise ValueError(f"slot collision on {link} for {connection_id}")
        for seg in segs:
            seg[:] = code

    def release(self, connection_id: str, path: Path, start: int, width: int) -> None:
        code = self._ids.get(connection_id)
        for link in path_links(path):
            seg = self._occ[link][start : start + width]
            if np.any(seg != code):
                raise ValueError(f"releasing slots not owned by {connection_id} on {link}")
            seg[:] = FREE

    def dump(self, free_char: str = ".") -> str:
        """Per-link text raster, one character per slot, for golden fixtures."""
        lines = []
        for link in self.links:
            chars = [
                free_char if v == FREE else self._names[int(v)][-1]
                for v in self._occ[link]
            ]
            lines.append(f"{link[0]}->{link[1]} |{''.join(chars)}|")
        return "\n".join(lines)


def first_fit(grid: SpectrumGrid, candidate_paths: list[Path], width: int) -> Placement | None:
    """First candidate path (in order) holding ``width`` contiguous slots free at
    the same indices on every link; lowest feasible start within that path.
    Returns None when no path fits (blocked is a value, not an error)."""
    if width < 1:
        raise ValueError("width must be >= 1")
    for path in candidate_paths:
        start = grid.first_free_start(path, width)
        if start is not None:
            return Placement(path, start)
    return None


def place(grid: SpectrumGrid, lp: Lightpath, candidate_paths: list[Path], width: int) -> str:
    """Initial (or dormant-revival) placement via first fit; never a disruption."""
    hit = first_fit(grid, candidate_paths, width)
    if hit is None:
        lp.blocked_events += 1
        return BLOCKED
    grid.allocate(lp.connection_id, hit.path, hit.start_slot, width)
    lp.path, lp.start_slot, lp.width = hit.path, hit.start_slot, width
    return PLACED


def reduce(grid: SpectrumGrid, lp: Lightpath, new_width: int) -> str:
    """Free the top of the block down to ``new_width`` slots; start stays anchored."""
    if new_width > lp.width or new_width < 0:
        raise ValueError(f"reduce requires 0 <= new_width <= width, got {new_width} vs {lp.width}")
    if new_width == lp.width:
        return NOOP
    grid.release(lp.connection_id, lp.path, lp.start_slot + new_width, lp.width - new_width)
    lp.width = new_width
    return REDUCED


def expand(grid: SpectrumGrid, lp: Lightpath, new_width: int) -> str:
    """Grow the block contiguously: upward first, then downward (start shifts
    down).  Hitless; on infeasible the grid is untouched."""
    if new_width <= lp.width:
        raise ValueError(f"expand requires new_width > width, got {new_width} vs {lp.width}")
    if lp.width == 0:
        raise ValueError("cannot expand a dormant lightpath; use place()")
    delta = new_width - lp.width
    top = lp.start_slot + lp.width
    if top + delta <= grid.n_slots and grid.is_free(lp.path, top, delta):
        grid.allocate(lp.connection_id, lp.path, top, delta)
        lp.width = new_width
        return EXPANDED
    bottom = lp.start_slot - delta
    if bottom >= 0 and grid.is_free(lp.path, bottom, delta):
        grid.allocate(lp.connection_id, lp.path, bottom, delta)
        lp.start_slot = bottom
        lp.width = new_width
        return EXPANDED
    return INFEASIBLE


def reallocate(grid: SpectrumGrid, lp: Lightpath, candidate_paths: list[Path], new_width: int) -> str:
    """Tear down and first-fit the connection at ``new_width``.

    Landing on the identical (path, start) keeps the central frequency and does
    not count as a disruption.  On failure the original allocation is restored
    exactly and a blocked event is recorded.
    """
    old = (lp.path, lp.start_slot, lp.width)
    if lp.width > 0:
        grid.release(lp.connection_id, lp.path, lp.start_slot, lp.width)
    hit = first_fit(grid, candidate_paths, new_width)
    if hit is None:
        if old[2] > 0:
            grid.allocate(lp.connection_id, old[0], old[1], old[2])
        lp.blocked_events += 1
        return BLOCKED
    grid.allocate(lp.connection_id, hit.path, hit.start_slot, new_width)
    moved = (hit.path, hit.start_slot) != (old[0], old[1])
    lp.path, lp.start_slot, lp.width = hit.path, hit.start_slot, new_width
    if moved:
        lp.disruptions += 1
        return REALLOCATED
    return SAME_SLOT


def audit(grid: SpectrumGrid, lightpaths: Iterable[Lightpath]) -> None:
    """Assert no-overlap, contiguity, continuity, and slot conservation.

    Rebuilds the expected occupancy from the lightpaths and compares it with
    the grid byte-for-byte; any discrepancy raises AssertionError.
    """
    expected = {link: np.zeros(grid.n_slots, dtype=np.int32) for link in grid.links}
    total = 0
    for lp in lightpaths:
        if lp.width == 0:
            continue
        assert 0 <= lp.start_slot and lp.start_slot + lp.width <= grid.n_slots, (
            f"{lp.connection_id}: block [{lp.start_slot}, {lp.start_slot + lp.width}) outside grid"
        )
        code = grid._ids.get(lp.connection_id)
        assert code is not None, f"{lp.connection_id} never registered with the grid"
        for link in lp.links:
            seg = expected[link][lp.start_slot : lp.start_slot + lp.width]
            assert np.all(seg == FREE), f"overlap on {link} at {lp.connection_id}"
            seg[:] = code
        total += lp.width * len(lp.links)
    for link in grid.links:
        assert np.array_equal(expected[link], grid._occ[link]), (
            f"occupancy mismatch on {link}:\n expected {expected[link]}\n actual   {grid._occ[link]}"
        )
    assert total == grid.occupied_slot_count(), (
        f"conservation violated: lightpaths claim {total} slot-links, grid holds {grid.occupied_slot_count()}"
    )

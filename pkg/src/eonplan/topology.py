"""Network graph, kappa-shortest-path routing, and distance-adaptive modulation.

Paths are totally ordered by (total km, node-id sequence) so that routing is
deterministic and agrees exactly with exhaustive simple-path enumeration under
the same order.
"""

from __future__ import annotations

import csv
import heapq
import math
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ParseError, ValidationError

Path = tuple[str, ...]


class Topology:
    """Directed graph with km edge lengths; undirected fibers appear as two
    directed links of equal length.  Immutable after construction; per-pair
    path lists are cached (safe for concurrent reads)."""

    def __init__(self, links: dict[tuple[str, str], float]):
        self._lengths: dict[tuple[str, str], float] = {}
        self._adj: dict[str, list[str]] = {}
        for (a, b), km in links.items():
            if km <= 0:
                raise ValidationError(f"link {a}->{b}: non-positive length {km}")
            if a == b:
                raise ValidationError(f"link {a}->{a}: self-loop")
            self._lengths[(a, b)] = float(km)
        for a, b in self._lengths:
            self._adj.setdefault(a, []).append(b)
            self._adj.setdefault(b, [])
        for nbrs in self._adj.values():
            nbrs.sort()
        self._path_cache: dict[tuple[str, str, int], list[Path]] = {}

    @classmethod
    def from_undirected(cls, edges: dict[tuple[str, str], float]) -> "Topology":
        links = {}
        for (a, b), km in edges.items():
            links[(a, b)] = km
            links[(b, a)] = km
        return cls(links)

    @property
    def nodes(self) -> list[str]:
        return sorted(self._adj)

    @property
    def links(self) -> list[tuple[str, str]]:
        return sorted(self._lengths)

    def length(self, a: str, b: str) -> float:
        return self._lengths[(a, b)]

    def neighbors(self, node: str) -> list[str]:
        return self._adj.get(node, [])

    def path_length(self, path: Path) -> float:
        return sum(self._lengths[(path[i], path[i + 1])] for i in range(len(path) - 1))

    def k_shortest_paths(self, src: str, dst: str, kappa: int) -> list[Path]:
        key = (src, dst, kappa)
        if key not in self._path_cache:
            self._path_cache[key] = k_shortest_paths(self, src, dst, kappa)
        return self._path_cache[key]


def path_links(path: Path) -> list[tuple[str, str]]:
    return [(path[i], path[i + 1]) for i in range(len(path) - 1)]


def _dijkstra(topo: Topology, src: str, dst: str,
              banned_nodes: frozenset[str] = frozenset(),
              banned_edges: frozenset[tuple[str, str]] = frozenset()) -> tuple[float, Path] | None:
    """Minimal path under the total order (cost, node sequence).

    With strictly positive weights the (cost, lex) minimum to the target
    extends (cost, lex) minima to intermediate nodes, so finalize-on-first-pop
    stays correct with path tuples as tie-breakers.
    """
    if src in banned_nodes or dst in banned_nodes:
        return None
    heap: list[tuple[float, Path]] = [(0.0, (src,))]
    done: set[str] = set()
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node in done:
            continue
        done.add(node)
        if node == dst:
            return cost, path
        for nxt in topo.neighbors(node):
            if nxt in done or nxt in banned_nodes or (node, nxt) in banned_edges:
                continue
            heapq.heappush(heap, (cost + topo.length(node, nxt), path + (nxt,)))
    return None


def k_shortest_paths(topo: Topology, src: str, dst: str, kappa: int) -> list[Path]:
    """Yen's loopless kappa-shortest paths, ascending (total km, node sequence).

    Returns fewer than kappa paths when the graph runs out of simple paths;
    an empty list for a disconnected pair (callers treat that as blocking).
    """
    if src == dst:
        raise ValidationError("src and dst must differ")
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    first = _dijkstra(topo, src, dst)
    if first is None:
        return []
    found: list[tuple[float, Path]] = [first]
    candidates: list[tuple[float, Path]] = []
    seen: set[Path] = {first[1]}
    while len(found) < kappa:
        _, prev_path = found[-1]
        for i in range(len(prev_path) - 1):
            spur_node = prev_path[i]
            root = prev_path[: i + 1]
            root_cost = topo.path_length(root)
            banned_edges = {
                (p[i], p[i + 1])
                for _, p in found
                if len(p) > i + 1 and p[: i + 1] == root
            }
            banned_nodes = frozenset(root[:-1])
            spur = _dijkstra(topo, spur_node, dst, banned_nodes, frozenset(banned_edges))
            if spur is None:
                continue
            spur_cost, spur_path = spur
            total = root + spur_path[1:]
            if total not in seen:
                seen.add(total)
                heapq.heappush(candidates, (root_cost + spur_cost, total))
        if not candidates:
            break
        found.append(heapq.heappop(candidates))
    return [p for _, p in found]


def all_simple_paths(topo: Topology, src: str, dst: str) -> list[tuple[float, Path]]:
    """Exhaustive enumeration sorted by (length, node sequence): the routing oracle."""
    out: list[tuple[float, Path]] = []

    def dfs(node: str, path: list[str], cost: float, visited: set[str]):
        if node == dst:
            out.append((cost, tuple(path)))
            return
        for nxt in topo.neighbors(node):
            if nxt in visited:
                continue
            visited.add(nxt)
            path.append(nxt)
            dfs(nxt, path, cost + topo.length(node, nxt), visited)
            path.pop()
            visited.remove(nxt)

    dfs(src, [src], 0.0, {src})
    out.sort()
    return out


# --- distance-adaptive modulation -------------------------------------------

@dataclass(frozen=True)
class ModulationEntry:
    name: str
    bits_per_symbol: int
    max_reach_km: float


class ModulationTable:
    """Ordered modulation formats; reach strictly decreases as bits/symbol grow."""

    def __init__(self, entries: list[ModulationEntry]):
        entries = sorted(entries, key=lambda e: e.bits_per_symbol)
        if not entries:
            raise ValidationError("empty modulation table")
        for lo, hi in zip(entries, entries[1:]):
            if hi.max_reach_km >= lo.max_reach_km:
                raise ValidationError(
                    f"reach must strictly decrease with bits/symbol: "
                    f"{hi.name} ({hi.max_reach_km} km) vs {lo.name} ({lo.max_reach_km} km)"
                )
        self.entries = entries

    def __iter__(self):
        return iter(self.entries)


# Reach table following the halving-per-format convention of distance-adaptive
# EON studies; override via ModulationTable/csv when modeling other hardware.
DEFAULT_MODULATIONS = ModulationTable(
    [
        ModulationEntry("BPSK", 1, 4000.0),
        ModulationEntry("QPSK", 2, 2000.0),
        ModulationEntry("8-QAM", 3, 1000.0),
        ModulationEntry("16-QAM", 4, 500.0),
    ]
)


class ModulationChoice(NamedTuple):
    bits_per_symbol: int
    name: str
    out_of_reach: bool


def select_modulation(distance_km: float, table: ModulationTable = DEFAULT_MODULATIONS) -> ModulationChoice:
    """Highest bits/symbol whose reach covers ``distance_km``.

    Beyond every reach the lowest format is returned with ``out_of_reach`` set,
    so arbitrary (e.g. desk-scale) topologies still run.
    """
    if distance_km <= 0:
        raise ValueError(f"distance must be > 0, got {distance_km}")
    feasible = [e for e in table if e.max_reach_km >= distance_km]
    if feasible:
        best = max(feasible, key=lambda e: e.bits_per_symbol)
        return ModulationChoice(best.bits_per_symbol, best.name, False)
    fallback = min(table, key=lambda e: e.bits_per_symbol)
    return ModulationChoice(fallback.bits_per_symbol, fallback.name, True)


def required_slots(bitrate_gbps: float, bits_per_symbol: int, baud_gbaud: float = 10.5,
                   guard_slots: int = 0) -> int:
    """Frequency slots for a bit-rate: ceil(rate / (baud * m)) plus guard band.

    A zero bit-rate needs no slots (guard omitted).  One slot carries a single
    carrier at ``baud_gbaud`` within the 12.5 GHz spacing.
    """
    if bitrate_gbps < 0:
        raise ValueError(f"bitrate must be >= 0, got {bitrate_gbps}")
    if bitrate_gbps == 0:
        return 0
    per_slot = baud_gbaud * bits_per_symbol
    # 1e-9 relative slack absorbs float noise in the division without
    # disturbing monotonicity (the adjusted quotient is still monotone).
    q = bitrate_gbps / per_slot
    return max(1, math.ceil(q - 1e-9)) + guard_slots


# --- file loading ------------------------------------------------------------

def load_topology_csv(path: str) -> Topology:
    """csv rows ``node_a,node_b,length_km`` (undirected, expanded to directed)."""
    edges: dict[tuple[str, str], float] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if [c.strip().lower() for c in row] == ["node_a", "node_b", "length_km"]:
                continue
            if len(row) != 3:
                raise ParseError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                km = float(row[2])
            except ValueError:
                raise ParseError(f"line {lineno}: unparseable length {row[2]!r}") from None
            edges[(row[0].strip(), row[1].strip())] = km
    if not edges:
        raise ParseError(f"{path}: no links")
    return Topology.from_undirected(edges)


def load_topology_sndlib_xml(path: str) -> Topology:
    """Network section of an SNDlib XML file; node coordinates give great-circle
    link lengths when no explicit lengths are present."""
    if not os.path.exists(path):
        raise ParseError(f"{path}: no such file")
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
    coords: dict[str, tuple[float, float]] = {}
    for elem in root.iter():
        if elem.tag.split("}")[-1] == "node":
            node_id = elem.attrib.get("id")
            x = _xml_float(elem, "x")
            y = _xml_float(elem, "y")
            if node_id and x is not None and y is not None:
                coords[node_id] = (x, y)
    edges: dict[tuple[str, str], float] = {}
    for elem in root.iter():
        if elem.tag.split("}")[-1] == "link":
            src = _xml_text(elem, "source")
            dst = _xml_text(elem, "target")
            if src is None or dst is None:
                raise ParseError(f"{path}: link missing source/target")
            if src not in coords or dst not in coords:
                raise ParseError(f"{path}: link {src}-{dst} references unknown node")
            edges[(src, dst)] = great_circle_km(coords[src], coords[dst])
    if not edges:
        raise ParseError(f"{path}: no links")
    return Topology.from_undirected(edges)


def _xml_text(elem: ET.Element, name: str) -> str | None:
    for child in elem.iter():
        if child.tag.split("}")[-1] == name:
            return (child.text or "").strip()
    return None


def _xml_float(elem: ET.Element, name: str) -> float | None:
    text = _xml_text(elem, name)
    if text is None:
        return None
    try:
        return float(text)
    except ValueError:
        return None


def load_modulation_csv(path: str) -> ModulationTable:
    """csv rows ``name,bits_per_symbol,max_reach_km``."""
    entries = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if [c.strip().lower() for c in row] == ["name", "bits_per_symbol", "max_reach_km"]:
                continue
            if len(row) != 3:
                raise ParseError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                entries.append(ModulationEntry(row[0].strip(), int(row[1]), float(row[2])))
            except ValueError:
                raise ParseError(f"line {lineno}: unparseable modulation entry") from None
    return ModulationTable(entries)


def great_circle_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Haversine distance between (longitude, latitude) points, km (R=6371)."""
    lon1, lat1 = map(math.radians, a)
    lon2, lat2 = map(math.radians, b)
    dlat, dlon = lat2 - lat1, lon2 - lon1
    h = math.sin(dlat / 2) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2) ** 2
    return 2 * 6371.0 * math.asin(math.sqrt(h))

"""Build systems from power topologies, geocoded assets, or at random."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import yaml

from .restricted import IdrClass
from .system import Idr, Minterm, System

BUS_KINDS = ("generator", "load", "neutral")
ASSET_KINDS = ("generator", "load", "transmission_line", "cell_tower",
               "fiber_lit_building", "fiber_link")


class InsufficientAssetsError(ValueError):
    pass


# ---------------------------------------------------------------------------
# power network


@dataclass(frozen=True)
class Bus:
    label: str
    kind: str

    def __post_init__(self):
        if self.kind not in BUS_KINDS:
            raise ValueError(f"bus {self.label}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class Line:
    label: str
    from_bus: str
    to_bus: str
    flow: str = "forward"  # power moves from_bus -> to_bus; "reverse" flips it

    def __post_init__(self):
        if self.flow not in ("forward", "reverse"):
            raise ValueError(f"line {self.label}: flow must be 'forward' or 'reverse'")

    @property
    def source(self) -> str:
        return self.from_bus if self.flow == "forward" else self.to_bus

    @property
    def sink(self) -> str:
        return self.to_bus if self.flow == "forward" else self.from_bus


@dataclass(frozen=True)
class PowerTopology:
    buses: tuple[Bus, ...]
    lines: tuple[Line, ...]

    def __post_init__(self):
        names = {b.label for b in self.buses}
        for ln in self.lines:
            for end in (ln.from_bus, ln.to_bus):
                if end not in names:
                    raise ValueError(f"line {ln.label}: unknown bus {end!r}")

    @classmethod
    def from_dict(cls, data: dict) -> "PowerTopology":
        buses = tuple(Bus(b["label"], b["kind"]) for b in data.get("buses", []))
        lines = tuple(
            Line(ln["label"], ln["from"], ln["to"], ln.get("flow", "forward"))
            for ln in data.get("lines", [])
        )
        return cls(buses, lines)

    def to_dict(self) -> dict:
        return {
            "buses": [{"label": b.label, "kind": b.kind} for b in self.buses],
            "lines": [{"label": ln.label, "from": ln.from_bus, "to": ln.to_bus, "flow": ln.flow}
                      for ln in self.lines],
        }


def gen_power_idrs(topo: PowerTopology) -> System:
    """One size-2 minterm ``(line, upstream bus)`` per line feeding a bus.

    Generators and lines only fail initially. A load or neutral bus without
    inflow also gets no relation and is reported with a warning.
    """
    inflow: dict[str, list[list[str]]] = {b.label: [] for b in topo.buses}
    for ln in topo.lines:
        inflow[ln.sink].append([ln.label, ln.source])
    relations = {}
    for b in topo.buses:
        if b.kind == "generator":
            continue
        if not inflow[b.label]:
            warnings.warn(f"bus {b.label} ({b.kind}) has no inflow; treated as a source",
                          stacklevel=2)
            continue
        relations[b.label] = inflow[b.label]
    labels = [b.label for b in topo.buses] + [ln.label for ln in topo.lines]
    return _system_in_order(labels, relations)


def _system_in_order(labels: Sequence[str], relations: dict) -> System:
    idx = {lab: i for i, lab in enumerate(labels)}
    idrs = [Idr(idx[t], tuple(Minterm(tuple(idx[x] for x in m)) for m in ms))
            for t, ms in relations.items()]
    return System(labels, idrs)


def nine_bus_topology() -> PowerTopology:
    """Three generators, four loads, two neutral buses, nine lines."""
    buses = [Bus(f"G{i}", "generator") for i in (1, 2, 3)]
    buses += [Bus(f"L{i}", "load") for i in (1, 2, 3, 4)]
    buses += [Bus(f"N{i}", "neutral") for i in (1, 2)]
    lines = [
        Line("T1", "G1", "L1"),
        Line("T2", "L1", "L2"),
        Line("T3", "L1", "L3"),
        Line("T4", "N1", "L3"),
        Line("T5", "G3", "N1"),
        Line("T6", "N1", "L4"),
        Line("T7", "N2", "L2"),
        Line("T8", "N2", "L4"),
        Line("T9", "G2", "N2"),
    ]
    return PowerTopology(tuple(buses), tuple(lines))


# ---------------------------------------------------------------------------
# interdependent power / communication network


@dataclass(frozen=True)
class GeoAsset:
    label: str
    kind: str
    x: float
    y: float
    endpoints: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ASSET_KINDS:
            raise ValueError(f"asset {self.label}: unknown kind {self.kind!r}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"asset {self.label}: non-finite position")
        object.__setattr__(self, "endpoints", tuple(self.endpoints))


def assets_from_dicts(rows: Iterable[dict]) -> list[GeoAsset]:
    """Parse asset records; lines and links without a position sit at their midpoint."""
    rows = list(rows)
    pos = {r["label"]: (r["x"], r["y"]) for r in rows if "x" in r and "y" in r}
    out = []
    for r in rows:
        ends = tuple(r.get("endpoints", ()))
        if "x" in r and "y" in r:
            x, y = float(r["x"]), float(r["y"])
        else:
            try:
                pts = [pos[e] for e in ends]
            except KeyError as exc:
                raise ValueError(f"asset {r['label']}: unresolved endpoint {exc}") from None
            if not pts:
                raise ValueError(f"asset {r['label']}: no position")
            x = sum(p[0] for p in pts) / len(pts)
            y = sum(p[1] for p in pts) / len(pts)
        out.append(GeoAsset(r["label"], r["kind"], x, y, ends))
    return out


def _dist(a: GeoAsset, b: GeoAsset) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def _nearest(ref: GeoAsset, pool: Sequence[GeoAsset], count: int = 1) -> list[GeoAsset]:
    return sorted(pool, key=lambda a: (_dist(ref, a), a.label))[:count]


def gen_interdep_idrs(assets: Sequence[GeoAsset], long_link_quantile: float = 0.75,
                      long_link_threshold: float | None = None) -> System:
    """Nearest-neighbour dependency rules between power and communication assets.

    * generator <- nearest cell tower + nearest fiber-lit building x its fiber link
    * cell tower, fiber-lit building, long fiber link
      <- g1 x line(g1) + g2 x line(g2) for the two nearest generators
    * loads and transmission lines have no relation

    A connecting line or link that does not exist in the data is synthesised
    (``T_<gen>_<asset>`` / ``F_<building>_<gen>``) as a source entity.
    """
    by_label = {a.label: a for a in assets}
    if len(by_label) != len(assets):
        raise ValueError("duplicate asset label")
    for a in assets:
        for e in a.endpoints:
            if e not in by_label:
                raise ValueError(f"asset {a.label}: unresolved endpoint {e!r}")

    def of(kind):
        return [a for a in assets if a.kind == kind]

    gens, towers, bldgs = of("generator"), of("cell_tower"), of("fiber_lit_building")
    lines, links = of("transmission_line"), of("fiber_link")
    if len(gens) < 2 or not towers or not bldgs:
        raise InsufficientAssetsError(
            "need at least two generators, one cell tower and one fiber-lit building"
        )

    extra: list[str] = []

    def connector(a: GeoAsset, b: GeoAsset, pool: Sequence[GeoAsset], prefix: str) -> str:
        """Element of ``pool`` joining ``a`` to ``b``; falls back to one leaving ``a`` towards ``b``."""
        direct = sorted(x.label for x in pool if set(x.endpoints) == {a.label, b.label})
        if direct:
            return direct[0]
        incident = [x for x in pool if a.label in x.endpoints and len(x.endpoints) == 2]
        if incident:
            def far_end(x):
                other = x.endpoints[1] if x.endpoints[0] == a.label else x.endpoints[0]
                return by_label[other]
            return min(incident, key=lambda x: (_dist(far_end(x), b), x.label)).label
        name = f"{prefix}_{a.label}_{b.label}"
        if name in by_label:
            raise ValueError(f"synthesised label {name!r} clashes with an asset")
        if name not in extra:
            extra.append(name)
        return name

    def fed_by_generators(consumer: GeoAsset) -> list[list[str]]:
        return [[g.label, connector(g, consumer, lines, "T")] for g in _nearest(consumer, gens, 2)]

    relations: dict[str, list[list[str]]] = {}
    for g in gens:
        tower = _nearest(g, towers)[0]
        bldg = _nearest(g, bldgs)[0]
        relations[g.label] = [[tower.label], [bldg.label, connector(bldg, g, links, "F")]]
    for c in towers + bldgs:
        relations[c.label] = fed_by_generators(c)

    lengths = {}
    for ln in links:
        if len(ln.endpoints) == 2:
            lengths[ln.label] = _dist(by_label[ln.endpoints[0]], by_label[ln.endpoints[1]])
    if lengths:
        cut = long_link_threshold
        if cut is None:
            cut = float(np.quantile(list(lengths.values()), long_link_quantile))
        for ln in links:
            if lengths.get(ln.label, 0.0) >= cut and lengths.get(ln.label, 0.0) > 0:
                relations[ln.label] = fed_by_generators(ln)

    labels = [a.label for a in assets] + extra
    return _system_in_order(labels, relations)


# ---------------------------------------------------------------------------
# random families


def gen_random(cls: IdrClass | str, n: int, seed: int = 0, *, max_minterms: int = 3,
               max_size: int = 3, idr_fraction: float = 0.8, prefix: str = "e") -> System:
    """Random system of ``n`` entities.

    ``CaseI`` gives each dependent entity one single-entity parent,
    ``CaseII`` up to ``max_minterms`` single-entity alternatives, and
    ``General`` up to ``max_minterms`` minterms of up to ``max_size`` entities.
    """
    cls = IdrClass(cls) if isinstance(cls, str) else cls
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    labels = [f"{prefix}{i}" for i in range(1, n + 1)]
    relations: dict[str, list[list[str]]] = {}
    for t in range(n):
        others = [j for j in range(n) if j != t]
        if not others or rng.random() >= idr_fraction:
            continue
        if cls is IdrClass.CASE_I:
            mts = [[int(rng.choice(others))]]
        elif cls is IdrClass.CASE_II:
            k = int(rng.integers(1, min(max_minterms, len(others)) + 1))
            mts = [[int(j)] for j in rng.choice(others, size=k, replace=False)]
        else:
            k = int(rng.integers(1, max_minterms + 1))
            mts, seen = [], set()
            for _ in range(k):
                size = int(rng.integers(1, min(max_size, len(others)) + 1))
                members = sorted(int(j) for j in rng.choice(others, size=size, replace=False))
                if frozenset(members) not in seen:
                    seen.add(frozenset(members))
                    mts.append(members)
        relations[labels[t]] = [[labels[j] for j in m] for m in mts]
    return _system_in_order(labels, relations)


# ---------------------------------------------------------------------------
# files


def load_topology(path) -> PowerTopology:
    with open(path, encoding="utf-8") as fh:
        return PowerTopology.from_dict(yaml.safe_load(fh) or {})


def load_assets(path) -> list[GeoAsset]:
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    rows = data["assets"] if isinstance(data, dict) else data
    return assets_from_dicts(rows)

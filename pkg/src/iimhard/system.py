"""Entities, dependency relations and the text format for IIM systems.

A system file holds one relation per line::

    # comment
    b3 <- a2 + a1 a3
    src_only

``+`` separates minterms (conjunctions), whitespace separates the entities
inside a minterm. A bare label declares a source entity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SystemFormatError(ValueError):
    """Malformed system text or an invariant violation."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnknownEntityError(KeyError):
    pass


class EntityId(NamedTuple):
    index: int
    label: str


@dataclass(frozen=True)
class Minterm:
    members: tuple[int, ...]
    mask: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.members:
            raise SystemFormatError("empty minterm")
        if len(set(self.members)) != len(self.members):
            raise SystemFormatError("duplicate entity inside a minterm")
        mask = 0
        for i in self.members:
            mask |= 1 << i
        object.__setattr__(self, "mask", mask)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class Idr:
    target: int
    minterms: tuple[Minterm, ...]

    def __post_init__(self):
        if not self.minterms:
            raise SystemFormatError("relation without minterms")
        for m in self.minterms:
            if self.target in m.members:
                raise SystemFormatError("target appears in its own minterm")


def natural_key(label: str):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", label)]


class System:
    """Immutable entity table plus one DNF relation per dependent entity.

    Entities are addressed by label in the public API; the dense index is
    used for bitset failure states (bit ``i`` set means entity ``i`` failed).
    """

    def __init__(self, labels: Sequence[str], idrs: Iterable[Idr] = ()):
        self.labels: tuple[str, ...] = tuple(labels)
        self.index: dict[str, int] = {}
        for i, lab in enumerate(self.labels):
            if not LABEL_RE.match(lab):
                raise SystemFormatError(f"invalid label {lab!r}")
            if lab in self.index:
                raise SystemFormatError(f"duplicate label {lab!r}")
            self.index[lab] = i
        n = len(self.labels)
        table: dict[int, Idr] = {}
        for idr in idrs:
            if idr.target in table:
                raise SystemFormatError(f"duplicate relation for {self.labels[idr.target]!r}")
            for m in idr.minterms:
                if any(not 0 <= j < n for j in m.members):
                    raise SystemFormatError("minterm references an unknown entity")
            if not 0 <= idr.target < n:
                raise SystemFormatError("relation target is not an entity")
            table[idr.target] = idr
        self.idrs: dict[int, Idr] = dict(sorted(table.items()))

        # precomputed views for the cascade kernels
        self._minterm_masks: tuple[tuple[int, ...] | None, ...] = tuple(
            tuple(m.mask for m in self.idrs[i].minterms) if i in self.idrs else None
            for i in range(n)
        )
        deps: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for t, idr in self.idrs.items():
            for k, m in enumerate(idr.minterms):
                for j in m.members:
                    deps[j].append((t, k))
        self._dependents = tuple(tuple(d) for d in deps)
        self._minterm_counts = [len(mm) if mm is not None else 0 for mm in self._minterm_masks]
        self.full_mask = (1 << n) - 1

    # -- construction ---------------------------------------------------
    @classmethod
    def from_relations(cls, relations: Mapping[str, Sequence[Sequence[str]]],
                       sources: Iterable[str] = ()) -> "System":
        """Build from ``{target: [[member, ...], ...]}`` keyed by label."""
        labels: list[str] = []
        seen: set[str] = set()

        def add(lab):
            if lab not in seen:
                seen.add(lab)
                labels.append(lab)

        for target, minterms in relations.items():
            add(target)
            for m in minterms:
                for lab in m:
                    add(lab)
        for lab in sources:
            add(lab)
        idx = {lab: i for i, lab in enumerate(labels)}
        idrs = [
            Idr(idx[t], tuple(Minterm(tuple(idx[x] for x in m)) for m in ms))
            for t, ms in relations.items()
        ]
        return cls(labels, idrs)

    # -- accessors ------------------------------------------------------
    def __len__(self):
        return len(self.labels)

    def __repr__(self):
        return f"System(n_entities={len(self)}, n_idrs={len(self.idrs)})"

    def __eq__(self, other):
        if not isinstance(other, System):
            return NotImplemented
        return set(self.labels) == set(other.labels) and self.relations() == other.relations()

    def __hash__(self):
        return hash(frozenset(self.labels))

    @property
    def entities(self) -> tuple[EntityId, ...]:
        return tuple(EntityId(i, lab) for i, lab in enumerate(self.labels))

    def relations(self) -> dict[str, frozenset[frozenset[str]]]:
        """Label-level view, order-insensitive; used for comparisons."""
        return {
            self.labels[t]: frozenset(
                frozenset(self.labels[j] for j in m.members) for m in idr.minterms
            )
            for t, idr in self.idrs.items()
        }

    def minterms_of(self, label: str) -> list[list[str]]:
        idr = self.idrs.get(self.index_of(label))
        if idr is None:
            return []
        return [[self.labels[j] for j in m.members] for m in idr.minterms]

    def is_source(self, label: str) -> bool:
        return self.index_of(label) not in self.idrs

    def index_of(self, item) -> int:
        if isinstance(item, EntityId):
            item = item.label
        if isinstance(item, str):
            try:
                return self.index[item]
            except KeyError:
                raise UnknownEntityError(item) from None
        i = int(item)
        if not 0 <= i < len(self.labels):
            raise UnknownEntityError(item)
        return i

    def mask(self, items: Iterable = ()) -> int:
        """Bitset of the given labels / indices."""
        if isinstance(items, str):
            items = [items]
        m = 0
        for it in items:
            m |= 1 << self.index_of(it)
        return m

    def decode(self, mask: int) -> frozenset[str]:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self.labels[i])
            mask >>= 1
            i += 1
        return frozenset(out)


# ---------------------------------------------------------------------------
# text format


def parse_system(text: str) -> System:
    relations: dict[str, list[list[str]]] = {}
    order: list[str] = []
    seen: set[str] = set()

    def mention(lab, lineno):
        if not LABEL_RE.match(lab):
            raise SystemFormatError(f"invalid entity label {lab!r}", lineno)
        if lab not in seen:
            seen.add(lab)
            order.append(lab)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "<-" not in line:
            toks = line.split()
            if len(toks) != 1:
                raise SystemFormatError("expected '<target> <- <minterms>' or a bare label", lineno)
            mention(toks[0], lineno)
            continue
        lhs, _, rhs = line.partition("<-")
        target = lhs.strip()
        if not target or len(target.split()) != 1:
            raise SystemFormatError("relation needs exactly one target", lineno)
        mention(target, lineno)
        if target in relations:
            raise SystemFormatError(f"duplicate relation for {target!r}", lineno)
        minterms = []
        for chunk in rhs.split("+"):
            members = chunk.split()
            if not members:
                raise SystemFormatError("empty minterm", lineno)
            for lab in members:
                mention(lab, lineno)
            if target in members:
                raise SystemFormatError(f"{target!r} depends on itself", lineno)
            if len(set(members)) != len(members):
                raise SystemFormatError("duplicate entity inside a minterm", lineno)
            minterms.append(members)
        relations[target] = minterms

    idx = {lab: i for i, lab in enumerate(order)}
    idrs = [
        Idr(idx[t], tuple(Minterm(tuple(idx[x] for x in m)) for m in ms))
        for t, ms in relations.items()
    ]
    return System(order, idrs)


def format_system(system: System) -> str:
    """Serialise to the text format.

    Lines are sorted by natural label order so that
    ``format_system(parse_system(format_system(s))) == format_system(s)``.
    """
    lines = []
    for t in sorted(system.idrs, key=lambda i: natural_key(system.labels[i])):
        idr = system.idrs[t]
        rhs = " + ".join(" ".join(system.labels[j] for j in m.members) for m in idr.minterms)
        lines.append(f"{system.labels[t]} <- {rhs}")
    mentioned = set(system.idrs)
    for idr in system.idrs.values():
        for m in idr.minterms:
            mentioned.update(m.members)
    loose = [lab for i, lab in enumerate(system.labels) if i not in mentioned]
    lines.extend(sorted(loose, key=natural_key))
    return "\n".join(lines) + ("\n" if lines else "")


def load_system(path) -> System:
    with open(path, encoding="utf-8") as fh:
        return parse_system(fh.read())

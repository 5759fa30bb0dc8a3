"""0-1 integer program for ENH / TEH, LP-file export and assignment checks.

Variables (all binary), with ``n = |E|`` and horizon ``d = 0..n-1``:

``g_<e>``
    1 if ``e`` fails initially; pinned by equality rows.
``q_<e>``
    1 if ``e`` is hardened.
``x_<e>_<d>``
    1 if ``e`` is failed at time ``d`` (cumulative).
``c_<e>_m<j>_<d>``
    1 if the ``j``-th minterm of ``e`` (size >= 2, in a relation with several
    minterms) has a member failed at ``d - 1``.

Rows are scaled so every coefficient is an integer: a lower bound such as
``x >= (x1 + x2 + x3) / 3 - q`` is stored as ``3 x - x1 - x2 - x3 + 3 q >= 0``.
Besides the lower bounds that drive the cascade, upper bounds pin every
variable to the cascade value once ``g`` and ``q`` are fixed, so a feasible
assignment is exactly a cascade trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

from .cascade import CascadeTrace
from .exact import EnhInstance, TehInstance
from .system import System, natural_key


@dataclass(frozen=True)
class IlpVar:
    name: str
    kind: str  # "g" | "q" | "x" | "c"
    indices: tuple


@dataclass(frozen=True)
class Constraint:
    name: str
    coeffs: tuple[tuple[str, int], ...]
    sense: str  # "<=" | ">=" | "="
    rhs: int

    def holds(self, assignment) -> bool:
        lhs = sum(c * assignment[v] for v, c in self.coeffs)
        if self.sense == "<=":
            return lhs <= self.rhs
        if self.sense == ">=":
            return lhs >= self.rhs
        return lhs == self.rhs


@dataclass
class IlpEncoding:
    labels: tuple[str, ...]
    vars: list[IlpVar] = field(default_factory=list)
    objective: dict[str, int] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    initial_failed: frozenset[str] = frozenset()
    problem: str = "enh"

    @property
    def time_horizon(self) -> int:
        return max(len(self.labels) - 1, 0)

    def var_names(self, kind: Optional[str] = None) -> list[str]:
        return [v.name for v in self.vars if kind is None or v.kind == kind]

    def objective_value(self, assignment) -> int:
        return sum(c * assignment[v] for v, c in self.objective.items())

    def violations(self, assignment) -> list[str]:
        missing = [v.name for v in self.vars if v.name not in assignment]
        if missing:
            raise ValueError(f"assignment misses {len(missing)} variables, e.g. {missing[0]}")
        return [c.name for c in self.constraints if not c.holds(assignment)]


def xname(label: str, d: int) -> str:
    return f"x_{label}_{d}"


def cname(label: str, j: int, d: int) -> str:
    return f"c_{label}_m{j}_{d}"


class _Builder:
    def __init__(self, system: System):
        self.system = system
        self.enc = IlpEncoding(labels=system.labels)

    def var(self, name, kind, *idx):
        self.enc.vars.append(IlpVar(name, kind, idx))

    def row(self, name, terms: dict, sense, rhs):
        coeffs = tuple((v, c) for v, c in terms.items() if c != 0)
        self.enc.constraints.append(Constraint(name, coeffs, sense, rhs))


def _add(terms: dict, var: str, coef: int):
    terms[var] = terms.get(var, 0) + coef


def _encode_common(system: System, seed: frozenset[str]) -> _Builder:
    b = _Builder(system)
    labels = system.labels
    n = len(labels)
    H = max(n - 1, 0)
    for lab in labels:
        b.var(f"g_{lab}", "g", lab)
    for lab in labels:
        b.var(f"q_{lab}", "q", lab)
    for lab in labels:
        for d in range(H + 1):
            b.var(xname(lab, d), "x", lab, d)

    # multi-entity minterms inside multi-minterm relations get an aux chain
    aux = {}
    for t, idr in system.idrs.items():
        if len(idr.minterms) < 2:
            continue
        for j, m in enumerate(idr.minterms, start=1):
            if len(m) >= 2:
                aux[(t, j)] = m
                for d in range(1, H + 1):
                    b.var(cname(labels[t], j, d), "c", labels[t], j, d)

    for lab in labels:
        b.row(f"fix_g_{lab}", {f"g_{lab}": 1}, "=", 1 if lab in seed else 0)

    # initial state: x_i0 >= g_i - q_i, tightened by x_i0 <= g_i
    for lab in labels:
        b.row(f"init_{lab}", {xname(lab, 0): 1, f"g_{lab}": -1, f"q_{lab}": 1}, ">=", 0)
        b.row(f"init_ub_{lab}", {xname(lab, 0): 1, f"g_{lab}": -1}, "<=", 0)
    # a hardened entity is never failed
    for lab in labels:
        for d in range(H + 1):
            b.row(f"hard_{lab}_{d}", {xname(lab, d): 1, f"q_{lab}": 1}, "<=", 1)
    # failures persist
    for lab in labels:
        for d in range(1, H + 1):
            b.row(f"persist_{lab}_{d}", {xname(lab, d): 1, xname(lab, d - 1): -1}, ">=", 0)

    for i, lab in enumerate(labels):
        idr = system.idrs.get(i)
        for d in range(1, H + 1):
            prev = xname(lab, d - 1)
            cur = xname(lab, d)
            if idr is None:
                # sources only fail initially
                b.row(f"src_{lab}_{d}", {cur: 1, prev: -1}, "<=", 0)
                continue
            if len(idr.minterms) == 1:
                members = [labels[j] for j in idr.minterms[0].members]
                N = len(members)
                # N x_id - sum x_j(d-1) + N q_i >= 0
                lo = {cur: N}
                for m in members:
                    _add(lo, xname(m, d - 1), -1)
                _add(lo, f"q_{lab}", N)
                b.row(f"single_lb_{lab}_{d}", lo, ">=", 0)
                # x_id <= sum x_j(d-1) + x_i(d-1)
                up = {cur: 1, prev: -1}
                for m in members:
                    _add(up, xname(m, d - 1), -1)
                b.row(f"single_ub_{lab}_{d}", up, "<=", 0)
                continue

            terms = []
            for j, m in enumerate(idr.minterms, start=1):
                if (i, j) in aux:
                    c = cname(lab, j, d)
                    members = [labels[k] for k in m.members]
                    N = len(members)
                    lo = {c: N}
                    for mm in members:
                        _add(lo, xname(mm, d - 1), -1)
                    b.row(f"aux_lb_{lab}_m{j}_{d}", lo, ">=", 0)
                    up = {c: 1}
                    for mm in members:
                        _add(up, xname(mm, d - 1), -1)
                    b.row(f"aux_ub_{lab}_m{j}_{d}", up, "<=", 0)
                    terms.append(c)
                else:
                    terms.append(xname(labels[m.members[0]], d - 1))
            M = len(terms)
            # x_id >= sum terms - (M-1) - q_i
            lo = {cur: 1}
            for v in terms:
                _add(lo, v, -1)
            _add(lo, f"q_{lab}", 1)
            b.row(f"multi_lb_{lab}_{d}", lo, ">=", 1 - M)
            # M x_id <= sum terms + M x_i(d-1)
            up = {cur: M, prev: -M}
            for v in terms:
                _add(up, v, -1)
            b.row(f"multi_ub_{lab}_{d}", up, "<=", 0)
    b.enc.initial_failed = frozenset(seed)
    return b


def encode_enh_ilp(inst: EnhInstance) -> IlpEncoding:
    system = inst.system
    b = _encode_common(system, inst.initial_failed)
    H = max(len(system) - 1, 0)
    ordered = sorted(system.labels, key=natural_key)
    budget = {f"q_{lab}": 1 for lab in ordered}
    if budget:
        b.enc.constraints.insert(0, Constraint("budget", tuple(budget.items()), "<=", inst.budget))
    b.enc.objective = {xname(lab, H): 1 for lab in ordered}
    b.enc.problem = "enh"
    return b.enc


def encode_teh_ilp(inst: TehInstance) -> IlpEncoding:
    system = inst.system
    b = _encode_common(system, inst.initial_failed)
    H = max(len(system) - 1, 0)
    ordered = sorted(system.labels, key=natural_key)
    for lab in ordered:
        if lab in inst.protect:
            b.row(f"protect_{lab}", {xname(lab, H): 1}, "=", 0)
    b.enc.objective = {f"q_{lab}": 1 for lab in ordered}
    b.enc.problem = "teh"
    return b.enc


# ---------------------------------------------------------------------------
# LP export


def _expr(coeffs) -> str:
    parts = []
    for v, c in coeffs:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = v if mag == 1 else f"{mag} {v}"
        if not parts:
            parts.append(term if c > 0 else f"- {term}")
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts) if parts else "0"


def format_lp(enc: IlpEncoding) -> str:
    out = [f"\\ {enc.problem.upper()} hardening program, {len(enc.labels)} entities",
           "Minimize"]
    obj = _expr(list(enc.objective.items())) if enc.objective else ""
    out.append(f" obj: {obj}".rstrip())
    out.append("Subject To")
    for c in enc.constraints:
        out.append(f" {c.name}: {_expr(c.coeffs)} {c.sense} {c.rhs}")
    out.append("Binary")
    for v in enc.vars:
        out.append(f" {v.name}")
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp(enc: IlpEncoding, out: IO[str]) -> None:
    out.write(format_lp(enc))


# ---------------------------------------------------------------------------
# trace substitution


def trace_assignment(enc: IlpEncoding, trace: CascadeTrace,
                     hardened: Optional[Iterable[str]] = None) -> dict[str, int]:
    """0/1 value of every variable implied by a cascade trace and a plan.

    ``hardened`` defaults to the plan the trace was produced with.
    """
    system = trace.system
    if tuple(system.labels) != tuple(enc.labels):
        raise ValueError("trace and encoding describe different entity tables")
    hard = trace.hardened_mask if hardened is None else system.mask(hardened)
    seed = system.mask(enc.initial_failed)
    H = enc.time_horizon
    val: dict[str, int] = {}
    for v in enc.vars:
        if v.kind == "g":
            val[v.name] = seed >> system.index[v.indices[0]] & 1
        elif v.kind == "q":
            val[v.name] = hard >> system.index[v.indices[0]] & 1
        elif v.kind == "x":
            lab, d = v.indices
            if d > H:
                raise ValueError("time index beyond horizon")
            val[v.name] = trace.state_at(d) >> system.index[lab] & 1
        else:
            lab, j, d = v.indices
            m = system.idrs[system.index[lab]].minterms[j - 1].mask
            val[v.name] = 1 if trace.state_at(d - 1) & m else 0
    return val


def check_trace_feasible(enc: IlpEncoding, trace: CascadeTrace,
                         hardened: Optional[Iterable[str]] = None) -> bool:
    return not enc.violations(trace_assignment(enc, trace, hardened))

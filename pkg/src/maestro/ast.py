"""Domain types shared by the parser, engine, checker, composer and emitter."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Optional, Union


class MaestroError(Exception):
    """Base class for all errors raised by this package."""


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int           # 1-based
    column: int         # 1-based
    end_column: Optional[int] = None

    def __str__(self) -> str:
        loc = f"{self.file}:{self.line}:{self.column}"
        if self.end_column is not None and self.end_column != self.column:
            loc += f"-{self.end_column}"
        return loc


@dataclass(frozen=True)
class Diagnostic:
    severity: str       # "error" | "warning"
    message: str
    span: Optional[SourceSpan] = None

    def __str__(self) -> str:
        where = f"{self.span}: " if self.span else ""
        return f"{where}{self.severity}: {self.message}"


@dataclass(frozen=True)
class BitVecValue:
    """Fixed-width unsigned value; all arithmetic wraps modulo 2**width."""

    width: int
    bits: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"bitvector width must be >= 1, got {self.width}")
        if not (0 <= self.bits < (1 << self.width)):
            raise ValueError(f"value {self.bits} out of range for {self.width} bits")

    @staticmethod
    def of(value: int, width: int) -> "BitVecValue":
        return BitVecValue(width, value & ((1 << width) - 1))

    def zext(self, width: int) -> "BitVecValue":
        if width < self.width:
            raise ValueError("zero-extension cannot narrow")
        return BitVecValue(width, self.bits)

    def add(self, other: "BitVecValue") -> "BitVecValue":
        w = max(self.width, other.width)
        return BitVecValue.of(self.bits + other.bits, w)

    def sub(self, other: "BitVecValue") -> "BitVecValue":
        w = max(self.width, other.width)
        return BitVecValue.of(self.bits - other.bits, w)

    def bit(self, index: int) -> int:
        return (self.bits >> index) & 1


# ---------------------------------------------------------------------------
# Expressions

@dataclass(frozen=True)
class Lit:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("literals are non-negative")

    @property
    def width(self) -> int:
        return max(1, self.value.bit_length())


@dataclass(frozen=True)
class StateRef:
    instance: str
    field: str
    primed: bool = False


@dataclass(frozen=True)
class DataRef:
    """Reference to a carried-data field of the evaluating event instance."""

    field: str


@dataclass(frozen=True)
class TimeRef:
    primed: bool = False


@dataclass(frozen=True)
class CountRef:
    """Number of deployed instances (status >= 1) of an event spec."""

    event: str


@dataclass(frozen=True)
class BinOp:
    op: str             # "+" | "-"
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, StateRef, DataRef, TimeRef, CountRef, BinOp]


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class Cmp:
    op: str             # "=", "!=", "<", "<=", ">", ">="
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Not:
    operand: "BoolExpr"


@dataclass(frozen=True)
class And:
    left: "BoolExpr"
    right: "BoolExpr"


@dataclass(frozen=True)
class Or:
    left: "BoolExpr"
    right: "BoolExpr"


BoolExpr = Union[BoolLit, Cmp, Not, And, Or]

TRUE = BoolLit(True)


def expr_atoms(e: Union[Expr, BoolExpr]) -> Iterator[Union[Expr, BoolExpr]]:
    """Yield every node of an expression tree, including the root."""
    yield e
    if isinstance(e, BinOp):
        yield from expr_atoms(e.left)
        yield from expr_atoms(e.right)
    elif isinstance(e, Cmp):
        yield from expr_atoms(e.left)
        yield from expr_atoms(e.right)
    elif isinstance(e, Not):
        yield from expr_atoms(e.operand)
    elif isinstance(e, (And, Or)):
        yield from expr_atoms(e.left)
        yield from expr_atoms(e.right)


def state_refs(e: Union[Expr, BoolExpr]) -> Iterator[StateRef]:
    for node in expr_atoms(e):
        if isinstance(node, StateRef):
            yield node


def data_refs(e: Union[Expr, BoolExpr]) -> Iterator[DataRef]:
    for node in expr_atoms(e):
        if isinstance(node, DataRef):
            yield node


def has_primed(e: Union[Expr, BoolExpr]) -> bool:
    for node in expr_atoms(e):
        if isinstance(node, StateRef) and node.primed:
            return True
        if isinstance(node, TimeRef) and node.primed:
            return True
    return False


def conjuncts(e: BoolExpr) -> Iterator[BoolExpr]:
    """Split a top-level conjunction into its parts."""
    if isinstance(e, And):
        yield from conjuncts(e.left)
        yield from conjuncts(e.right)
    else:
        yield e


# ---------------------------------------------------------------------------
# Model structure

@dataclass(frozen=True)
class StateDecl:
    """Machine state: hardware types and their named instances."""

    type_specs: dict        # type name -> tuple of (field name, width)
    instance_specs: dict    # instance name -> type name

    def fields_of(self, instance: str) -> tuple:
        return self.type_specs[self.instance_specs[instance]]

    def width_of(self, instance: str, fieldname: str) -> int:
        for name, width in self.fields_of(instance):
            if name == fieldname:
                return width
        raise KeyError(f"{instance}.{fieldname}")

    def all_fields(self) -> Iterator[tuple]:
        """Yield (instance, field, width) for every declared state field."""
        for inst, tname in self.instance_specs.items():
            for fname, width in self.type_specs[tname]:
                yield inst, fname, width

    def resolves(self, ref: StateRef) -> bool:
        tname = self.instance_specs.get(ref.instance)
        if tname is None or tname not in self.type_specs:
            return False
        return any(n == ref.field for n, _ in self.type_specs[tname])


@dataclass(frozen=True)
class TriggerClause:
    condition: BoolExpr
    target: str
    assignments: tuple = ()     # tuple of (field name, Expr)
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class StateChangeClause:
    condition: BoolExpr
    target: StateRef            # unprimed
    value: Expr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class EventSpec:
    name: str
    carried_data: tuple = ()    # tuple of (field name, width)
    triggers: tuple = ()        # tuple of TriggerClause
    state_changes: tuple = ()   # tuple of StateChangeClause
    delay: int = 0
    present_at_start: bool = False
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def data_width(self, fieldname: str) -> int:
        for name, width in self.carried_data:
            if name == fieldname:
                return width
        raise KeyError(fieldname)

    @property
    def effective_delay(self) -> int:
        # Present-at-start instances are forced to delay 0.
        return 0 if self.present_at_start else self.delay


class AssertionMode(IntEnum):
    ALWAYS = 0
    FINALLY = 1


@dataclass(frozen=True)
class Assertion:
    name: str
    mode: AssertionMode
    body: BoolExpr
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Model:
    state_decl: StateDecl
    events: tuple               # tuple of EventSpec
    assertions: tuple           # tuple of Assertion
    initial_constraints: tuple  # tuple of BoolExpr, unprimed, step-0
    max_steps: int
    int_width: int
    instance_caps: dict         # event spec name -> positive int

    def event(self, name: str) -> EventSpec:
        for spec in self.events:
            if spec.name == name:
                return spec
        raise KeyError(name)

    def event_names(self) -> set:
        return {spec.name for spec in self.events}

    def cap_of(self, name: str) -> int:
        return self.instance_caps.get(name, DEFAULT_INSTANCE_CAP)


DEFAULT_INSTANCE_CAP = 8


# ---------------------------------------------------------------------------
# Runtime objects (traces double as the counterexample format)

class Status(IntEnum):
    UNDEPLOYED = 0
    PENDING = 1
    ACTIVE = 2


NO_PARENT = -1      # parent_id / reason sentinel for present-at-start instances


@dataclass(frozen=True)
class EventInstance:
    spec: str
    status: Status
    appearance_time: int
    delay: int
    event_id: int
    reason: int                 # triggering clause index, NO_PARENT for start events
    parent_id: int
    data: tuple = ()            # tuple of (field name, BitVecValue)

    def datum(self, fieldname: str) -> BitVecValue:
        for name, value in self.data:
            if name == fieldname:
                return value
        raise KeyError(fieldname)

    @property
    def ready_time(self) -> int:
        return self.appearance_time + self.delay


@dataclass
class StepRecord:
    step_index: int
    time: int
    machine_state: dict         # (instance, field) -> BitVecValue
    instances: tuple            # tuple of EventInstance, ordered by event_id
    # Bookkeeping carried between steps; not part of the observable record.
    next_event_id: int = field(default=0, compare=False, repr=False)

    def deployed(self, spec: str) -> int:
        return sum(1 for e in self.instances if e.spec == spec)

    @property
    def is_busy(self) -> bool:
        return bool(self.instances)


@dataclass
class Trace:
    steps: list                 # list of StepRecord
    terminated_early: bool
    initial_assignment: dict    # (instance, field) -> BitVecValue

    @property
    def final(self) -> StepRecord:
        return self.steps[-1]

    def non_stutter_count(self) -> int:
        return sum(1 for s in self.steps if s.is_busy)

    def instance_by_id(self, event_id: int) -> Optional[EventInstance]:
        for step in self.steps:
            for inst in step.instances:
                if inst.event_id == event_id:
                    return inst
        return None


# ---------------------------------------------------------------------------
# Validation

def _check_bool_context(diags, decl, events_by_name, spec, expr, where, *, allow_data):
    for node in expr_atoms(expr):
        if isinstance(node, StateRef):
            if not decl.resolves(node):
                diags.append(Diagnostic(
                    "error", f"unresolved state reference {node.instance}.{node.field} in {where}",
                    spec.span if spec else None))
            if node.primed:
                diags.append(Diagnostic(
                    "error", f"primed reference illegal in {where}",
                    spec.span if spec else None))
        elif isinstance(node, DataRef):
            if not allow_data:
                diags.append(Diagnostic(
                    "error", f"carried-data reference self.{node.field} illegal in {where}",
                    spec.span if spec else None))
            elif spec is not None and not any(n == node.field for n, _ in spec.carried_data):
                diags.append(Diagnostic(
                    "error",
                    f"self.{node.field} is not carried data of event {spec.name} in {where}",
                    spec.span))
        elif isinstance(node, CountRef):
            if node.event not in events_by_name:
                diags.append(Diagnostic(
                    "error", f"count() of unknown event {node.event} in {where}",
                    spec.span if spec else None))
        elif isinstance(node, TimeRef) and node.primed:
            diags.append(Diagnostic(
                "error", f"primed time reference illegal in {where}",
                spec.span if spec else None))


def validate(model: Model) -> list:
    """Check every structural invariant; returns one Diagnostic per violation."""
    diags: list = []
    decl = model.state_decl

    seen_types: set = set()
    for tname, fields in decl.type_specs.items():
        if tname in seen_types:
            diags.append(Diagnostic("error", f"duplicate type name {tname}"))
        seen_types.add(tname)
        fieldnames = [n for n, _ in fields]
        if len(set(fieldnames)) != len(fieldnames):
            diags.append(Diagnostic("error", f"duplicate field name in type {tname}"))
        for fname, width in fields:
            if width < 1:
                diags.append(Diagnostic("error", f"{tname}.{fname}: width must be >= 1"))
    for iname, tname in decl.instance_specs.items():
        if tname not in decl.type_specs:
            diags.append(Diagnostic("error", f"instance {iname}: unknown type {tname}"))

    events_by_name: dict = {}
    for spec in model.events:
        if spec.name in events_by_name:
            diags.append(Diagnostic("error", f"duplicate event name {spec.name}", spec.span))
        events_by_name[spec.name] = spec

    for spec in model.events:
        datanames = [n for n, _ in spec.carried_data]
        if len(set(datanames)) != len(datanames):
            diags.append(Diagnostic("error", f"duplicate carried-data field in {spec.name}", spec.span))
        for _, width in spec.carried_data:
            if width < 1:
                diags.append(Diagnostic("error", f"{spec.name}: carried-data width must be >= 1", spec.span))
        if spec.delay < 0:
            diags.append(Diagnostic("error", f"{spec.name}: delay must be non-negative", spec.span))
        if spec.present_at_start and spec.delay != 0:
            diags.append(Diagnostic(
                "warning", f"{spec.name}: present-at-start event delay forced to 0", spec.span))

        for i, clause in enumerate(spec.triggers):
            where = f"trigger {i} of {spec.name}"
            _check_bool_context(diags, decl, events_by_name, spec, clause.condition, where,
                                allow_data=True)
            target = events_by_name.get(clause.target)
            if target is None:
                diags.append(Diagnostic(
                    "error", f"unresolved event {clause.target} in {where}",
                    clause.span or spec.span))
            else:
                target_fields = {n for n, _ in target.carried_data}
                for fname, value in clause.assignments:
                    if fname not in target_fields:
                        diags.append(Diagnostic(
                            "error",
                            f"{where} assigns unknown data field {fname} of {clause.target}",
                            clause.span or spec.span))
                    _check_bool_context(diags, decl, events_by_name, spec, value,
                                        f"assignment {fname} in {where}", allow_data=True)
        for i, clause in enumerate(spec.state_changes):
            where = f"state change {i} of {spec.name}"
            _check_bool_context(diags, decl, events_by_name, spec, clause.condition, where,
                                allow_data=True)
            if clause.target.primed:
                diags.append(Diagnostic("error", f"{where}: target must be unprimed",
                                        clause.span or spec.span))
            if not decl.resolves(clause.target):
                diags.append(Diagnostic(
                    "error",
                    f"unresolved state reference "
                    f"{clause.target.instance}.{clause.target.field} in {where}",
                    clause.span or spec.span))
            _check_bool_context(diags, decl, events_by_name, spec, clause.value,
                                f"value of {where}", allow_data=True)

    seen_assertions: set = set()
    for a in model.assertions:
        if a.name in seen_assertions:
            diags.append(Diagnostic("error", f"duplicate assertion name {a.name}", a.span))
        seen_assertions.add(a.name)
        for node in expr_atoms(a.body):
            if isinstance(node, StateRef):
                if not decl.resolves(node):
                    diags.append(Diagnostic(
                        "error",
                        f"unresolved state reference {node.instance}.{node.field} "
                        f"in assertion {a.name}", a.span))
                if node.primed and a.mode is AssertionMode.FINALLY:
                    diags.append(Diagnostic(
                        "error", f"primed reference illegal in FINALLY assertion {a.name}",
                        a.span))
            elif isinstance(node, TimeRef):
                if node.primed and a.mode is AssertionMode.FINALLY:
                    diags.append(Diagnostic(
                        "error", f"primed reference illegal in FINALLY assertion {a.name}",
                        a.span))
            elif isinstance(node, DataRef):
                diags.append(Diagnostic(
                    "error", f"carried-data reference illegal in assertion {a.name}", a.span))
            elif isinstance(node, CountRef):
                if node.event not in events_by_name:
                    diags.append(Diagnostic(
                        "error", f"count() of unknown event {node.event} in assertion {a.name}",
                        a.span))

    for i, c in enumerate(model.initial_constraints):
        _check_bool_context(diags, decl, events_by_name, None, c,
                            f"initial constraint {i + 1}", allow_data=False)
        for node in expr_atoms(c):
            if isinstance(node, (TimeRef, CountRef)):
                diags.append(Diagnostic(
                    "error", f"initial constraint {i + 1} may only reference machine state"))

    if model.max_steps < 1:
        diags.append(Diagnostic("error", "MaxSteps must be >= 1"))
    if model.int_width < 1:
        diags.append(Diagnostic("error", "IntWidth must be >= 1"))
    elif (1 << model.int_width) <= model.max_steps:
        diags.append(Diagnostic(
            "warning",
            f"2^IntWidth = {1 << model.int_width} does not exceed MaxSteps = {model.max_steps}"))

    for name, cap in model.instance_caps.items():
        if name not in events_by_name:
            diags.append(Diagnostic("error", f"MaxInstances names unknown event {name}"))
        if cap < 1:
            diags.append(Diagnostic("error", f"MaxInstances for {name} must be >= 1"))

    return diags


def errors_of(diags: list) -> list:
    return [d for d in diags if d.severity == "error"]


class ValidationError(MaestroError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))

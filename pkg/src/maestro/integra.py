"""Integra transform programs: parsing, order-independent composition, application."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Optional, Union

from .ast import (
    And,
    Assertion,
    AssertionMode,
    BinOp,
    BoolExpr,
    BoolLit,
    Cmp,
    CountRef,
    DataRef,
    EventSpec,
    Expr,
    Lit,
    MaestroError,
    Model,
    Not,
    Or,
    StateChangeClause,
    StateRef,
    TimeRef,
    TriggerClause,
    TRUE,
    errors_of,
    validate,
)
from .parser import (
    ParseError,
    parse_assertion_string,
    parse_boolexpr,
    parse_carried_data,
    parse_statechange_string,
    parse_trigger_string,
    render_bool,
    render_state_change,
    render_trigger_clause,
)


class IntegraError(MaestroError):
    pass


class ANDORConflict(IntegraError):
    def __init__(self, event: str):
        self.event = event
        super().__init__(f"event {event} is guarded with both AND and OR transforms")


class ApplyError(IntegraError):
    pass


# ---------------------------------------------------------------------------
# Transforms

@dataclass(frozen=True)
class AddTypeSpec:
    name: str
    fields: tuple               # tuple of (field name, width)


@dataclass(frozen=True)
class AddInstance:
    name: str
    type_name: str


@dataclass(frozen=True)
class AddEventSpec:
    spec: EventSpec


@dataclass(frozen=True)
class AddDataField:
    event: str
    field: str
    width: int


@dataclass(frozen=True)
class AddTriggerClause:
    event: str
    clause: TriggerClause


@dataclass(frozen=True)
class GuardConditionsAND:
    event: str
    guard: BoolExpr


@dataclass(frozen=True)
class GuardConditionsOR:
    event: str
    guard: BoolExpr


@dataclass(frozen=True)
class AddStateChange:
    event: str
    clause: StateChangeClause


@dataclass(frozen=True)
class AddDelay:
    event: str
    amount: int


@dataclass(frozen=True)
class AddAssertion:
    assertion: Assertion


@dataclass(frozen=True)
class AddInitialConstraint:
    constraint: BoolExpr


@dataclass(frozen=True)
class DuplicateStateForNI:
    suffix_a: str
    suffix_b: str


@dataclass(frozen=True)
class DuplicateEventsForNI:
    suffix_a: str
    suffix_b: str


@dataclass(frozen=True)
class SecretFree:
    """Leave a state field unconstrained across the two machines."""

    instance: str
    field: str


@dataclass(frozen=True)
class ObservableEqual:
    """Assert a state field always equal across the two machines."""

    instance: str
    field: str


Transform = Union[
    AddTypeSpec, AddInstance, AddEventSpec, AddDataField, AddTriggerClause,
    GuardConditionsAND, GuardConditionsOR, AddStateChange, AddDelay,
    AddAssertion, AddInitialConstraint, DuplicateStateForNI,
    DuplicateEventsForNI, SecretFree, ObservableEqual,
]


@dataclass(frozen=True)
class TransformProgram:
    name: str
    transforms: tuple

    def __len__(self) -> int:
        return len(self.transforms)


IDENTITY = TransformProgram("identity", ())


# Canonical application order: structural additions before guards would let a
# co-composed guard capture added clauses, so guards run right after the event
# set is complete and before any clause additions.
_STAGES = (
    AddTypeSpec, AddInstance, AddEventSpec, AddDataField,
    GuardConditionsAND, GuardConditionsOR,
    AddTriggerClause, AddStateChange, AddDelay,
    AddAssertion, AddInitialConstraint,
    DuplicateStateForNI, DuplicateEventsForNI, SecretFree, ObservableEqual,
)


def _sort_key(t: Transform):
    if isinstance(t, AddTypeSpec):
        return (t.name, t.fields)
    if isinstance(t, AddInstance):
        return (t.name, t.type_name)
    if isinstance(t, AddEventSpec):
        return (t.spec.name,)
    if isinstance(t, AddDataField):
        return (t.event, t.field, t.width)
    if isinstance(t, (GuardConditionsAND, GuardConditionsOR)):
        return (t.event, render_bool(t.guard))
    if isinstance(t, AddTriggerClause):
        return (t.event, render_trigger_clause(t.clause))
    if isinstance(t, AddStateChange):
        return (t.event, render_state_change(t.clause))
    if isinstance(t, AddDelay):
        return (t.event,)
    if isinstance(t, AddAssertion):
        return (t.assertion.name,)
    if isinstance(t, AddInitialConstraint):
        return (render_bool(t.constraint),)
    if isinstance(t, (DuplicateStateForNI, DuplicateEventsForNI)):
        return (t.suffix_a, t.suffix_b)
    if isinstance(t, (SecretFree, ObservableEqual)):
        return (t.instance, t.field)
    raise TypeError(f"not a transform: {t!r}")


def normalize(transforms) -> tuple:
    """Canonical normal form: dedup, sum delays, fixed stage order, sorted stages."""
    and_events = {t.event for t in transforms if isinstance(t, GuardConditionsAND)}
    or_events = {t.event for t in transforms if isinstance(t, GuardConditionsOR)}
    for event in sorted(and_events & or_events):
        raise ANDORConflict(event)

    delays: dict = {}
    buckets: dict = {stage: [] for stage in _STAGES}
    for t in transforms:
        if isinstance(t, AddDelay):
            delays[t.event] = delays.get(t.event, 0) + t.amount
        else:
            buckets[type(t)].append(t)
    buckets[AddDelay] = [AddDelay(event, amount) for event, amount in delays.items()]

    result = []
    for stage in _STAGES:
        seen = set()
        for t in sorted(buckets[stage], key=_sort_key):
            if t in seen:
                continue
            seen.add(t)
            result.append(t)
    return tuple(result)


def compose(programs) -> TransformProgram:
    """Collect programs into one canonical-normal-form program."""
    programs = list(programs)
    if not programs:
        return IDENTITY
    transforms = [t for p in programs for t in p.transforms]
    name = "+".join(sorted(p.name for p in programs))
    return TransformProgram(name, normalize(transforms))


# ---------------------------------------------------------------------------
# Parsing .integra files

def _split_args(text: str, where: str) -> list:
    args = []
    current = []
    in_quote = False
    for ch in text:
        if ch == '"':
            in_quote = not in_quote
            continue
        if ch == "," and not in_quote:
            args.append("".join(current).strip())
            current = []
            continue
        current.append(ch)
    if in_quote:
        raise IntegraError(f"{where}: unterminated quote")
    tail = "".join(current).strip()
    if tail or args:
        args.append(tail)
    return args


def _int_arg(text: str, where: str, minimum: int = 0) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise IntegraError(f"{where}: expected an integer, found {text!r}") from None
    if value < minimum:
        raise IntegraError(f"{where}: value must be >= {minimum}")
    return value


_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _name_arg(text: str, where: str) -> str:
    if not _NAME_RE.fullmatch(text):
        raise IntegraError(f"{where}: expected a name, found {text!r}")
    return text


def _field_ref_arg(text: str, where: str) -> tuple:
    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\.([A-Za-z_][A-Za-z0-9_]*)", text)
    if m is None:
        raise IntegraError(f"{where}: expected instance.field, found {text!r}")
    return m.group(1), m.group(2)


def parse_integra(text: str, name: str = "<program>") -> TransformProgram:
    """One directive per line, `#` comments, quoted bodies in mini-grammar syntax."""
    transforms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        where = f"{name}:{lineno}"
        head, _, rest = line.partition(" ")
        args = _split_args(rest, where) if rest.strip() else []

        def arity(n):
            if len(args) != n:
                raise IntegraError(
                    f"{where}: {head} takes {n} argument(s), found {len(args)}")

        try:
            if head == "ADD_TYPE_SPEC":
                if len(args) < 2:
                    raise IntegraError(f"{where}: ADD_TYPE_SPEC takes a name and fields")
                fields = []
                for part in args[1:]:
                    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(\d+)", part)
                    if m is None:
                        raise IntegraError(f"{where}: bad field {part!r} (want name:width)")
                    fields.append((m.group(1), int(m.group(2))))
                transforms.append(AddTypeSpec(_name_arg(args[0], where), tuple(fields)))
            elif head == "ADD_INSTANCE":
                arity(2)
                transforms.append(AddInstance(_name_arg(args[0], where),
                                              _name_arg(args[1], where)))
            elif head == "ADD_EVENT_SPEC":
                arity(4)
                if args[3] not in ("Yes", "No"):
                    raise IntegraError(f"{where}: PresentAtStart must be Yes or No")
                transforms.append(AddEventSpec(EventSpec(
                    name=_name_arg(args[0], where),
                    carried_data=parse_carried_data(args[1]),
                    delay=_int_arg(args[2], where),
                    present_at_start=(args[3] == "Yes"),
                )))
            elif head == "ADD_DATA_FIELD":
                arity(3)
                transforms.append(AddDataField(
                    _name_arg(args[0], where), _name_arg(args[1], where),
                    _int_arg(args[2], where, minimum=1)))
            elif head == "ADD_TRIGGER_CLAUSE":
                arity(2)
                for clause in parse_trigger_string(args[1]):
                    transforms.append(AddTriggerClause(_name_arg(args[0], where), clause))
            elif head == "GUARD_CONDITIONS_AND":
                arity(2)
                transforms.append(GuardConditionsAND(
                    _name_arg(args[0], where), parse_boolexpr(args[1])))
            elif head == "GUARD_CONDITIONS_OR":
                arity(2)
                transforms.append(GuardConditionsOR(
                    _name_arg(args[0], where), parse_boolexpr(args[1])))
            elif head == "ADD_STATE_CHANGE":
                arity(2)
                for clause in parse_statechange_string(args[1]):
                    transforms.append(AddStateChange(_name_arg(args[0], where), clause))
            elif head == "ADD_DELAY":
                arity(2)
                transforms.append(AddDelay(_name_arg(args[0], where),
                                           _int_arg(args[1], where)))
            elif head == "ADD_ASSERTION":
                arity(2)
                transforms.append(AddAssertion(
                    parse_assertion_string(args[1], name=_name_arg(args[0], where))))
            elif head == "ADD_INITIAL_CONSTRAINT":
                arity(1)
                transforms.append(AddInitialConstraint(parse_boolexpr(args[0])))
            elif head == "DUPLICATE_STATE_FOR_NI":
                arity(2)
                transforms.append(DuplicateStateForNI(
                    _name_arg(args[0], where), _name_arg(args[1], where)))
            elif head == "DUPLICATE_EVENTS_FOR_NI":
                arity(2)
                transforms.append(DuplicateEventsForNI(
                    _name_arg(args[0], where), _name_arg(args[1], where)))
            elif head == "SECRET_FREE":
                arity(1)
                transforms.append(SecretFree(*_field_ref_arg(args[0], where)))
            elif head == "OBSERVABLE_EQUAL":
                arity(1)
                transforms.append(ObservableEqual(*_field_ref_arg(args[0], where)))
            else:
                raise IntegraError(f"{where}: unknown directive {head!r}")
        except ParseError as exc:
            raise IntegraError(f"{where}: {exc.message}") from None
    return TransformProgram(name, tuple(transforms))


def parse_integra_file(path) -> TransformProgram:
    from pathlib import Path
    p = Path(path)
    with open(p, encoding="utf-8") as fh:
        return parse_integra(fh.read(), name=p.stem)


# ---------------------------------------------------------------------------
# Expression rewriting for the non-interference product

def _rewrite_expr(e: Expr, suffix: str, instances) -> Expr:
    if isinstance(e, StateRef):
        if e.instance in instances:
            return replace(e, instance=f"{e.instance}_{suffix}")
        return e
    if isinstance(e, BinOp):
        return BinOp(e.op, _rewrite_expr(e.left, suffix, instances),
                     _rewrite_expr(e.right, suffix, instances))
    if isinstance(e, CountRef):
        return CountRef(f"{e.event}_{suffix}")
    if isinstance(e, (Lit, DataRef, TimeRef)):
        return e
    raise TypeError(f"not an expression: {e!r}")


def _rewrite_bool(e: BoolExpr, suffix: str, instances) -> BoolExpr:
    if isinstance(e, BoolLit):
        return e
    if isinstance(e, Cmp):
        return Cmp(e.op, _rewrite_expr(e.left, suffix, instances),
                   _rewrite_expr(e.right, suffix, instances))
    if isinstance(e, Not):
        return Not(_rewrite_bool(e.operand, suffix, instances))
    if isinstance(e, And):
        return And(_rewrite_bool(e.left, suffix, instances),
                   _rewrite_bool(e.right, suffix, instances))
    if isinstance(e, Or):
        return Or(_rewrite_bool(e.left, suffix, instances),
                  _rewrite_bool(e.right, suffix, instances))
    raise TypeError(f"not a boolean expression: {e!r}")


def _rewrite_event(spec: EventSpec, suffix: str, instances) -> EventSpec:
    triggers = tuple(
        TriggerClause(
            condition=_rewrite_bool(c.condition, suffix, instances),
            target=f"{c.target}_{suffix}",
            assignments=tuple((f, _rewrite_expr(v, suffix, instances))
                              for f, v in c.assignments),
        )
        for c in spec.triggers)
    changes = tuple(
        StateChangeClause(
            condition=_rewrite_bool(c.condition, suffix, instances),
            target=_rewrite_expr(c.target, suffix, instances),
            value=_rewrite_expr(c.value, suffix, instances),
        )
        for c in spec.state_changes)
    return replace(spec, name=f"{spec.name}_{suffix}", triggers=triggers,
                   state_changes=changes)


def _build_product(model: Model, suffixes: tuple, secrets: set, observables) -> Model:
    a, b = suffixes
    instances = set(model.state_decl.instance_specs)
    new_instances = {}
    for iname, tname in model.state_decl.instance_specs.items():
        new_instances[f"{iname}_{a}"] = tname
        new_instances[f"{iname}_{b}"] = tname
    decl = replace(model.state_decl, instance_specs=new_instances)

    events = []
    caps = {}
    for spec in model.events:
        for suffix in (a, b):
            events.append(_rewrite_event(spec, suffix, instances))
        if spec.name in model.instance_caps:
            caps[f"{spec.name}_{a}"] = model.instance_caps[spec.name]
            caps[f"{spec.name}_{b}"] = model.instance_caps[spec.name]

    assertions = []
    for assertion in model.assertions:
        for suffix in (a, b):
            assertions.append(replace(
                assertion, name=f"{assertion.name}_{suffix}",
                body=_rewrite_bool(assertion.body, suffix, instances)))

    constraints = []
    for constraint in model.initial_constraints:
        for suffix in (a, b):
            constraints.append(_rewrite_bool(constraint, suffix, instances))
    # Everything that is not a secret starts equal on the two machines.
    for iname, fname, _ in sorted(model.state_decl.all_fields()):
        if (iname, fname) in secrets:
            continue
        constraints.append(Cmp("=", StateRef(f"{iname}_{a}", fname),
                               StateRef(f"{iname}_{b}", fname)))

    for iname, fname in observables:
        assertions.append(Assertion(
            name=f"NI_{iname}_{fname}",
            mode=AssertionMode.ALWAYS,
            body=Cmp("=", StateRef(f"{iname}_{a}", fname),
                     StateRef(f"{iname}_{b}", fname))))

    return Model(
        state_decl=decl,
        events=tuple(events),
        assertions=tuple(assertions),
        initial_constraints=tuple(constraints),
        max_steps=model.max_steps,
        int_width=model.int_width,
        instance_caps=caps,
    )


# ---------------------------------------------------------------------------
# Application

def apply(model: Model, program: TransformProgram) -> Model:
    """Apply a (normalized) program to a validated base model."""
    transforms = normalize(program.transforms)

    type_specs = dict(model.state_decl.type_specs)
    instance_specs = dict(model.state_decl.instance_specs)
    events = {spec.name: spec for spec in model.events}
    event_order = [spec.name for spec in model.events]
    base_events = set(event_order)
    assertions = list(model.assertions)
    constraints = list(model.initial_constraints)
    caps = dict(model.instance_caps)

    dup_state = []
    dup_events = []
    secrets = set()
    observables = []

    def require_event(name: str, t: Transform) -> EventSpec:
        if name not in events:
            raise ApplyError(f"{type(t).__name__} targets unknown event {name}")
        return events[name]

    for t in transforms:
        if isinstance(t, AddTypeSpec):
            if t.name in type_specs:
                if type_specs[t.name] != t.fields:
                    raise ApplyError(f"type {t.name} already declared with other fields")
            else:
                type_specs[t.name] = t.fields
        elif isinstance(t, AddInstance):
            if t.name in instance_specs:
                if instance_specs[t.name] != t.type_name:
                    raise ApplyError(f"instance {t.name} already declared with another type")
            else:
                if t.type_name not in type_specs:
                    raise ApplyError(f"instance {t.name}: unknown type {t.type_name}")
                instance_specs[t.name] = t.type_name
        elif isinstance(t, AddEventSpec):
            if t.spec.name in events:
                raise ApplyError(f"event {t.spec.name} already exists")
            events[t.spec.name] = t.spec
            event_order.append(t.spec.name)
        elif isinstance(t, AddDataField):
            spec = require_event(t.event, t)
            existing = dict(spec.carried_data)
            if t.field in existing:
                if existing[t.field] != t.width:
                    raise ApplyError(
                        f"data field {t.field} of {t.event} already has width "
                        f"{existing[t.field]}")
            else:
                events[t.event] = replace(
                    spec, carried_data=spec.carried_data + ((t.field, t.width),))
        elif isinstance(t, (GuardConditionsAND, GuardConditionsOR)):
            # Guards run before clause additions; they wrap the base clauses only.
            spec = require_event(t.event, t)
            combine = And if isinstance(t, GuardConditionsAND) else Or

            def wrap(cond: BoolExpr) -> BoolExpr:
                if cond == TRUE and isinstance(t, GuardConditionsAND):
                    return t.guard
                return combine(cond, t.guard)

            events[t.event] = replace(
                spec,
                triggers=tuple(replace(c, condition=wrap(c.condition))
                               for c in spec.triggers),
                state_changes=tuple(replace(c, condition=wrap(c.condition))
                                    for c in spec.state_changes))
        elif isinstance(t, AddTriggerClause):
            spec = require_event(t.event, t)
            if t.clause not in spec.triggers:
                events[t.event] = replace(spec, triggers=spec.triggers + (t.clause,))
        elif isinstance(t, AddStateChange):
            spec = require_event(t.event, t)
            if t.clause not in spec.state_changes:
                events[t.event] = replace(
                    spec, state_changes=spec.state_changes + (t.clause,))
        elif isinstance(t, AddDelay):
            spec = require_event(t.event, t)
            events[t.event] = replace(spec, delay=spec.delay + t.amount)
        elif isinstance(t, AddAssertion):
            if t.assertion not in assertions:
                assertions.append(t.assertion)
        elif isinstance(t, AddInitialConstraint):
            if t.constraint not in constraints:
                constraints.append(t.constraint)
        elif isinstance(t, DuplicateStateForNI):
            dup_state.append((t.suffix_a, t.suffix_b))
        elif isinstance(t, DuplicateEventsForNI):
            dup_events.append((t.suffix_a, t.suffix_b))
        elif isinstance(t, SecretFree):
            secrets.add((t.instance, t.field))
        elif isinstance(t, ObservableEqual):
            observables.append((t.instance, t.field))

    result = Model(
        state_decl=replace(model.state_decl, type_specs=type_specs,
                           instance_specs=instance_specs),
        events=tuple(events[name] for name in event_order),
        assertions=tuple(assertions),
        initial_constraints=tuple(constraints),
        max_steps=model.max_steps,
        int_width=model.int_width,
        instance_caps=caps,
    )

    if dup_state or dup_events or secrets or observables:
        if len(dup_state) != 1 or len(dup_events) != 1 or dup_state != dup_events:
            raise ApplyError(
                "non-interference transforms need exactly one matching "
                "DUPLICATE_STATE_FOR_NI / DUPLICATE_EVENTS_FOR_NI pair")
        for iname, fname in sorted(secrets) + sorted(observables):
            if not any(iname == i and fname == f
                       for i, f, _ in result.state_decl.all_fields()):
                raise ApplyError(f"unknown state field {iname}.{fname} in NI transform")
        result = _build_product(result, dup_state[0], secrets, observables)

    diags = validate(result)
    errors = errors_of(diags)
    if errors:
        raise ApplyError(
            "transformed model is invalid: " + "; ".join(d.message for d in errors))
    return result

"""Deterministic trace execution under the canonical minimal-time schedule."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Optional

from .ast import (
    And,
    BinOp,
    BitVecValue,
    BoolExpr,
    BoolLit,
    Cmp,
    CountRef,
    DataRef,
    EventInstance,
    Expr,
    Lit,
    MaestroError,
    Model,
    NO_PARENT,
    Not,
    Or,
    StateRef,
    Status,
    StepRecord,
    TimeRef,
    Trace,
)


class EngineError(MaestroError):
    pass


class IncompleteAssignment(EngineError):
    pass


class ConstraintViolated(EngineError):
    pass


class WriteConflict(EngineError):
    pass


class InstanceOverflow(EngineError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    max_steps: Optional[int] = None     # None: use the model's bound
    stutter_to_max: bool = True

    def __post_init__(self):
        if self.max_steps is not None and self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


# ---------------------------------------------------------------------------
# Expression evaluation

@dataclass
class EvalContext:
    state: dict                     # (instance, field) -> BitVecValue
    int_width: int
    data: Optional[dict] = None     # carried data of the evaluating instance
    time: int = 0
    counts: Optional[dict] = None   # event spec name -> deployed count
    next_state: Optional[dict] = None
    next_time: Optional[int] = None


def eval_expr(e: Expr, ctx: EvalContext) -> BitVecValue:
    if isinstance(e, Lit):
        return BitVecValue(max(1, e.value.bit_length()), e.value)
    if isinstance(e, StateRef):
        if e.primed:
            if ctx.next_state is None:
                raise EngineError(f"primed reference {e.instance}.{e.field}' has no successor")
            return ctx.next_state[(e.instance, e.field)]
        return ctx.state[(e.instance, e.field)]
    if isinstance(e, DataRef):
        if ctx.data is None or e.field not in ctx.data:
            raise EngineError(f"no carried data field {e.field} in this context")
        return ctx.data[e.field]
    if isinstance(e, TimeRef):
        if e.primed:
            if ctx.next_time is None:
                raise EngineError("primed time reference has no successor")
            return BitVecValue.of(ctx.next_time, ctx.int_width)
        return BitVecValue.of(ctx.time, ctx.int_width)
    if isinstance(e, CountRef):
        n = (ctx.counts or {}).get(e.event, 0)
        return BitVecValue.of(n, ctx.int_width)
    if isinstance(e, BinOp):
        left = eval_expr(e.left, ctx)
        right = eval_expr(e.right, ctx)
        return left.add(right) if e.op == "+" else left.sub(right)
    raise TypeError(f"not an expression: {e!r}")


def eval_bool(e: BoolExpr, ctx: EvalContext) -> bool:
    if isinstance(e, BoolLit):
        return e.value
    if isinstance(e, Cmp):
        left = eval_expr(e.left, ctx)
        right = eval_expr(e.right, ctx)
        w = max(left.width, right.width)
        a, b = left.zext(w).bits, right.zext(w).bits
        if e.op == "=":
            return a == b
        if e.op == "!=":
            return a != b
        if e.op == "<":
            return a < b
        if e.op == "<=":
            return a <= b
        if e.op == ">":
            return a > b
        if e.op == ">=":
            return a >= b
        raise ValueError(f"unknown comparison {e.op}")
    if isinstance(e, Not):
        return not eval_bool(e.operand, ctx)
    if isinstance(e, And):
        return eval_bool(e.left, ctx) and eval_bool(e.right, ctx)
    if isinstance(e, Or):
        return eval_bool(e.left, ctx) or eval_bool(e.right, ctx)
    raise TypeError(f"not a boolean expression: {e!r}")


def deployed_counts(record: StepRecord) -> dict:
    counts: dict = {}
    for inst in record.instances:
        counts[inst.spec] = counts.get(inst.spec, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Assignments

def normalize_assignment(model: Model, assignment: dict) -> dict:
    """Coerce an {(instance, field) | "instance.field": value} map to BitVecValues."""
    state: dict = {}
    for key, value in assignment.items():
        if isinstance(key, str):
            instance, _, fieldname = key.partition(".")
            key = (instance, fieldname)
        instance, fieldname = key
        try:
            width = model.state_decl.width_of(instance, fieldname)
        except KeyError:
            raise IncompleteAssignment(f"unknown state field {instance}.{fieldname}") from None
        if isinstance(value, BitVecValue):
            if value.width != width:
                raise IncompleteAssignment(
                    f"{instance}.{fieldname}: expected width {width}, got {value.width}")
            state[key] = value
        else:
            if not (0 <= int(value) < (1 << width)):
                raise IncompleteAssignment(
                    f"{instance}.{fieldname}: value {value} out of range for {width} bits")
            state[key] = BitVecValue(width, int(value))
    return state


def initial_step(model: Model, assignment: dict) -> StepRecord:
    """Build step 0: time 0, present-at-start instances Active with delay forced to 0."""
    state = normalize_assignment(model, assignment)
    for instance, fieldname, _ in model.state_decl.all_fields():
        if (instance, fieldname) not in state:
            raise IncompleteAssignment(f"assignment missing {instance}.{fieldname}")

    ctx = EvalContext(state=state, int_width=model.int_width)
    for i, constraint in enumerate(model.initial_constraints, start=1):
        if not eval_bool(constraint, ctx):
            from .parser import render_bool
            raise ConstraintViolated(
                f"initial constraint {i} violated: {render_bool(constraint)}")

    instances = []
    next_id = 0
    for spec in model.events:
        if spec.present_at_start:
            data = tuple((name, BitVecValue(width, 0)) for name, width in spec.carried_data)
            instances.append(EventInstance(
                spec=spec.name, status=Status.ACTIVE, appearance_time=0, delay=0,
                event_id=next_id, reason=NO_PARENT, parent_id=NO_PARENT, data=data))
            next_id += 1
    return StepRecord(step_index=0, time=0, machine_state=state,
                      instances=tuple(instances), next_event_id=next_id)


# ---------------------------------------------------------------------------
# Stepping

def step(model: Model, current: StepRecord) -> StepRecord:
    """Advance one step: triggers, state updates, completion, maintenance, time."""
    active = [e for e in current.instances if e.status is Status.ACTIVE]
    pending = [e for e in current.instances if e.status is Status.PENDING]
    counts = deployed_counts(current)

    # Rule 1: trigger evaluation deploys children into step x+1.
    deployments = []        # (target EventSpec, reason index, parent id, data tuple)
    for inst in active:
        spec = model.event(inst.spec)
        data = dict(inst.data)
        ctx = EvalContext(state=current.machine_state, int_width=model.int_width,
                          data=data, time=current.time, counts=counts)
        for i, clause in enumerate(spec.triggers):
            if not eval_bool(clause.condition, ctx):
                continue
            target = model.event(clause.target)
            assigned = dict()
            for fieldname, value_expr in clause.assignments:
                width = target.data_width(fieldname)
                value = eval_expr(value_expr, ctx)
                assigned[fieldname] = BitVecValue.of(value.bits, width)
            child_data = tuple(
                (name, assigned.get(name, BitVecValue(width, 0)))
                for name, width in target.carried_data)
            deployments.append((target, i, inst.event_id, child_data))

    # Rule 2: state updates land in step x+1; conflicting writes are an error.
    writes: dict = {}
    for inst in active:
        spec = model.event(inst.spec)
        data = dict(inst.data)
        ctx = EvalContext(state=current.machine_state, int_width=model.int_width,
                          data=data, time=current.time, counts=counts)
        for clause in spec.state_changes:
            if not eval_bool(clause.condition, ctx):
                continue
            key = (clause.target.instance, clause.target.field)
            width = model.state_decl.width_of(*key)
            value = BitVecValue.of(eval_expr(clause.value, ctx).bits, width)
            prior = writes.get(key)
            if prior is not None and prior[0] != value:
                raise WriteConflict(
                    f"step {current.step_index}: {key[0]}.{key[1]} written with both "
                    f"{prior[0].bits} (by {prior[1]}) and {value.bits} (by {spec.name})")
            writes[key] = (value, spec.name)
    next_state = dict(current.machine_state)
    for key, (value, _) in writes.items():
        next_state[key] = value

    # Rule 5: canonical time advance.
    deployed_or_active = bool(deployments) or bool(active)
    if deployed_or_active:
        next_time = current.time + 1
    elif pending:
        next_time = max(current.time + 1, min(e.ready_time for e in pending))
    else:
        next_time = current.time + 1    # quiescent stutter

    # Rules 3 and 4: active instances complete; pending ones carry forward.
    next_instances = []
    for inst in pending:
        status = Status.ACTIVE if next_time >= inst.ready_time else Status.PENDING
        next_instances.append(replace(inst, status=status))
    next_id = current.next_event_id
    for target, reason, parent_id, child_data in deployments:
        delay = target.effective_delay
        status = Status.ACTIVE if delay == 0 else Status.PENDING
        next_instances.append(EventInstance(
            spec=target.name, status=status, appearance_time=next_time, delay=delay,
            event_id=next_id, reason=reason, parent_id=parent_id, data=child_data))
        next_id += 1

    new_counts = deployed_counts(StepRecord(0, 0, {}, tuple(next_instances)))
    for spec_name, n in new_counts.items():
        cap = model.cap_of(spec_name)
        if n > cap:
            raise InstanceOverflow(
                f"step {current.step_index + 1}: {n} concurrent {spec_name} instances "
                f"exceed the cap of {cap}")

    next_instances.sort(key=lambda e: e.event_id)
    return StepRecord(
        step_index=current.step_index + 1,
        time=next_time,
        machine_state=next_state,
        instances=tuple(next_instances),
        next_event_id=next_id,
    )


def is_quiescent(record: StepRecord) -> bool:
    return not record.instances


def run_trace(model: Model, assignment: dict,
              config: Optional[EngineConfig] = None) -> Trace:
    """Run to the step bound (stuttering as needed), or to the first quiescent step."""
    cfg = config or EngineConfig()
    bound = cfg.max_steps if cfg.max_steps is not None else model.max_steps
    steps = [initial_step(model, assignment)]
    terminated_early = False
    while len(steps) < bound:
        if not cfg.stutter_to_max and is_quiescent(steps[-1]):
            terminated_early = True
            break
        steps.append(step(model, steps[-1]))
    return Trace(
        steps=steps,
        terminated_early=terminated_early,
        initial_assignment=dict(steps[0].machine_state),
    )


# ---------------------------------------------------------------------------
# Trace serialization

def _state_items(state: dict):
    return sorted(state.items())


def trace_to_text(trace: Trace) -> str:
    out = []
    for rec in trace.steps:
        out.append(f"step {rec.step_index}  time {rec.time}")
        bindings = "  ".join(f"{i}.{f}={v.bits}" for (i, f), v in _state_items(rec.machine_state))
        out.append(f"  state: {bindings if bindings else '(none)'}")
        for e in rec.instances:
            data = ", ".join(f"{n}={v.bits}" for n, v in e.data)
            out.append(
                f"  ({e.spec}, {e.event_id}, {e.status.name.title()}, "
                f"{e.parent_id}, {e.reason}, {{{data}}})")
    if trace.terminated_early:
        out.append("terminated early (quiescent)")
    return "\n".join(out) + "\n"


def trace_to_dict(trace: Trace) -> dict:
    return {
        "steps": [
            {
                "step": rec.step_index,
                "time": rec.time,
                "state": {f"{i}.{f}": v.bits for (i, f), v in _state_items(rec.machine_state)},
                "instances": [
                    {
                        "spec": e.spec,
                        "id": e.event_id,
                        "status": int(e.status),
                        "appearance_time": e.appearance_time,
                        "delay": e.delay,
                        "parent": e.parent_id,
                        "reason": e.reason,
                        "data": {n: v.bits for n, v in e.data},
                    }
                    for e in rec.instances
                ],
            }
            for rec in trace.steps
        ],
        "terminated_early": trace.terminated_early,
        "initial": {f"{i}.{f}": v.bits for (i, f), v in _state_items(trace.initial_assignment)},
    }


def trace_to_json(trace: Trace) -> str:
    return json.dumps(trace_to_dict(trace), indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------------------
# Event-tree rendering

def _first_steps(trace: Trace) -> dict:
    """event_id -> (appearance step record, activation step record or None)."""
    seen: dict = {}
    for rec in trace.steps:
        for inst in rec.instances:
            appeared, activated = seen.get(inst.event_id, (None, None))
            if appeared is None:
                appeared = rec
            if activated is None and inst.status is Status.ACTIVE:
                activated = rec
            seen[inst.event_id] = (appeared, activated)
    return seen


def render_event_forest(trace: Trace, only_specs=None) -> str:
    """ASCII forest of the trace's event tree (parent edges by trigger)."""
    latest: dict = {}
    for rec in trace.steps:
        for inst in rec.instances:
            latest[inst.event_id] = inst
    steps_of = _first_steps(trace)
    children: dict = {}
    roots = []
    for event_id in sorted(latest):
        inst = latest[event_id]
        if only_specs is not None and inst.spec not in only_specs:
            continue
        if inst.parent_id == NO_PARENT or inst.parent_id not in latest:
            roots.append(event_id)
        else:
            children.setdefault(inst.parent_id, []).append(event_id)

    out = []

    def emit(event_id: int, depth: int):
        inst = latest[event_id]
        appeared, activated = steps_of[event_id]
        where = f"deployed step {appeared.step_index} (t={appeared.time})"
        if activated is not None and activated.step_index != appeared.step_index:
            where += f", active step {activated.step_index} (t={activated.time})"
        elif activated is None:
            where += ", never active"
        out.append(f"{'  ' * depth}- {inst.spec}#{event_id} [{where}]")
        for child in children.get(event_id, []):
            emit(child, depth + 1)

    for root in roots:
        emit(root, 0)
    return "\n".join(out) + ("\n" if out else "")

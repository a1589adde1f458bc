"""Bounded checking: exhaustive enumeration of admitted initial assignments."""

from __future__ import annotations

import json
import time as _time
from dataclasses import dataclass, field
from typing import Optional

from .ast import (
    AssertionMode,
    BitVecValue,
    Cmp,
    Lit,
    MaestroError,
    Model,
    StateRef,
    Trace,
    conjuncts,
    errors_of,
    has_primed,
    validate,
    ValidationError,
)
from .engine import (
    EngineConfig,
    EngineError,
    EvalContext,
    deployed_counts,
    eval_bool,
    render_event_forest,
    run_trace,
    trace_to_dict,
)

DEFAULT_LIMIT = 1 << 16


class EnumerationOverflow(MaestroError):
    pass


@dataclass(frozen=True)
class FreeBit:
    instance: str
    field: str
    bit: int            # bit position, 0 = least significant

    def __str__(self) -> str:
        return f"{self.instance}.{self.field}[{self.bit}]"


def pinned_fields(model: Model) -> dict:
    """Syntactic pass: fields fixed by a top-level `ref = literal` initial equality."""
    pins: dict = {}
    for constraint in model.initial_constraints:
        for part in conjuncts(constraint):
            if not isinstance(part, Cmp) or part.op != "=":
                continue
            ref: Optional[StateRef] = None
            lit: Optional[Lit] = None
            if isinstance(part.left, StateRef) and isinstance(part.right, Lit):
                ref, lit = part.left, part.right
            elif isinstance(part.right, StateRef) and isinstance(part.left, Lit):
                ref, lit = part.right, part.left
            if ref is None or ref.primed:
                continue
            key = (ref.instance, ref.field)
            width = model.state_decl.width_of(*key)
            if lit.value < (1 << width) and key not in pins:
                pins[key] = lit.value
    return pins


def free_bits(model: Model) -> list:
    """State bits to enumerate, ordered by (instance, field), most significant first.

    The full constraint set is re-checked per assignment; this pass only
    decides what must be enumerated.
    """
    pins = pinned_fields(model)
    bits = []
    for inst, name, width in sorted(model.state_decl.all_fields()):
        if (inst, name) in pins:
            continue
        for b in range(width - 1, -1, -1):
            bits.append(FreeBit(inst, name, b))
    return bits


def enumerate_assignments(model: Model, limit: int = DEFAULT_LIMIT):
    """Yield admitted assignments in lexicographic order over the free bits."""
    bits = free_bits(model)
    raw = 1 << len(bits)
    if raw > limit:
        raise EnumerationOverflow(
            f"free space of 2^{len(bits)} assignments exceeds the limit of {limit}")
    pins = pinned_fields(model)
    fields = sorted((inst, name, width) for inst, name, width in model.state_decl.all_fields())
    for index in range(raw):
        values: dict = {}
        for j, fb in enumerate(bits):
            bitval = (index >> (len(bits) - 1 - j)) & 1
            key = (fb.instance, fb.field)
            values[key] = values.get(key, 0) | (bitval << fb.bit)
        assignment = {}
        for inst, name, width in fields:
            key = (inst, name)
            assignment[key] = BitVecValue(width, pins.get(key, values.get(key, 0)))
        ctx = EvalContext(state=assignment, int_width=model.int_width)
        if all(eval_bool(c, ctx) for c in model.initial_constraints):
            yield assignment


# ---------------------------------------------------------------------------
# Assertion evaluation over a trace

def assertion_failure_step(model: Model, trace: Trace, assertion) -> Optional[int]:
    """First step where the assertion body is false, or None.

    ALWAYS bodies with primed references read the real successor and stop one
    step short of the horizon, matching the generated `step < N-1` guard;
    unprimed ALWAYS bodies are checked at every step. FINALLY is checked at
    the last step.
    """
    steps = trace.steps
    if assertion.mode is AssertionMode.FINALLY:
        last = steps[-1]
        ctx = EvalContext(state=last.machine_state, int_width=model.int_width,
                          time=last.time, counts=deployed_counts(last))
        return None if eval_bool(assertion.body, ctx) else last.step_index
    primed = has_primed(assertion.body)
    horizon = len(steps) - 1 if primed else len(steps)
    for x in range(horizon):
        rec = steps[x]
        nxt = steps[x + 1] if x + 1 < len(steps) else None
        ctx = EvalContext(
            state=rec.machine_state, int_width=model.int_width, time=rec.time,
            counts=deployed_counts(rec),
            next_state=nxt.machine_state if nxt is not None else None,
            next_time=nxt.time if nxt is not None else None)
        if not eval_bool(assertion.body, ctx):
            return x
    return None


# ---------------------------------------------------------------------------
# Reports

@dataclass
class AssertionVerdict:
    name: str
    holds: bool
    configs_explored: int
    failing_step: Optional[int] = None
    witness: Optional[Trace] = None
    witness_assignment: Optional[dict] = None

    def summary(self) -> str:
        if self.holds:
            return f"{self.name}: HOLDS ({self.configs_explored} configurations)"
        where = ", ".join(f"{i}.{f}={v.bits}"
                          for (i, f), v in sorted(self.witness_assignment.items()))
        return f"{self.name}: FAILS at step {self.failing_step} with {where}"


@dataclass
class CheckReport:
    verdicts: list
    configurations: int
    raw_space: int
    free_bits: list
    wall_time_s: float
    model: Model = field(repr=False, compare=False, default=None)

    @property
    def all_hold(self) -> bool:
        return all(v.holds for v in self.verdicts)

    def verdict(self, name: str) -> AssertionVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def to_text(self) -> str:
        out = []
        for v in self.verdicts:
            out.append(v.summary())
        out.append(
            f"{self.configurations} of {self.raw_space} configurations admitted; "
            f"free bits: {', '.join(str(b) for b in self.free_bits) or '(none)'}; "
            f"wall time {self.wall_time_s:.3f}s")
        out.append("RESULT: " + ("all assertions hold" if self.all_hold
                                 else "assertion failure (counterexample found)"))
        return "\n".join(out) + "\n"

    def to_dict(self) -> dict:
        return {
            "verdicts": [
                {
                    "name": v.name,
                    "holds": v.holds,
                    "configs_explored": v.configs_explored,
                    "failing_step": v.failing_step,
                    "witness_assignment": (
                        None if v.witness_assignment is None else
                        {f"{i}.{f}": bv.bits
                         for (i, f), bv in sorted(v.witness_assignment.items())}),
                    "witness": None if v.witness is None else trace_to_dict(v.witness),
                }
                for v in self.verdicts
            ],
            "configurations": self.configurations,
            "raw_space": self.raw_space,
            "free_bits": [str(b) for b in self.free_bits],
            "wall_time_s": round(self.wall_time_s, 6),
            "all_hold": self.all_hold,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def check(model: Model, limit: int = DEFAULT_LIMIT) -> CheckReport:
    """Run every assertion over every admitted assignment; first failure wins."""
    started = _time.perf_counter()
    diags = validate(model)
    errors = errors_of(diags)
    if errors:
        raise ValidationError(errors)

    bits = free_bits(model)
    raw = 1 << len(bits)
    verdicts = {a.name: AssertionVerdict(a.name, True, 0) for a in model.assertions}
    explored = 0
    for assignment in enumerate_assignments(model, limit=limit):
        explored += 1
        try:
            trace = run_trace(model, assignment, EngineConfig(stutter_to_max=True))
        except EngineError as exc:
            exc.assignment = dict(assignment)
            raise
        for assertion in model.assertions:
            verdict = verdicts[assertion.name]
            if not verdict.holds:
                continue
            failing = assertion_failure_step(model, trace, assertion)
            if failing is not None:
                verdict.holds = False
                verdict.failing_step = failing
                verdict.witness = trace
                verdict.witness_assignment = dict(assignment)
    for verdict in verdicts.values():
        verdict.configs_explored = explored
    return CheckReport(
        verdicts=[verdicts[a.name] for a in model.assertions],
        configurations=explored,
        raw_space=raw,
        free_bits=bits,
        wall_time_s=_time.perf_counter() - started,
        model=model,
    )


# ---------------------------------------------------------------------------
# Counterexample explanation

def _machine_suffixes(model: Model) -> Optional[tuple]:
    """Detect a two-machine product by instance-name suffix convention."""
    tails = set()
    for name in model.state_decl.instance_specs:
        if "_" not in name:
            return None
        tails.add(name.rsplit("_", 1)[1])
    if len(tails) != 2:
        return None
    a, b = sorted(tails)
    bases_a = {n.rsplit("_", 1)[0] for n in model.state_decl.instance_specs
               if n.endswith("_" + a)}
    bases_b = {n.rsplit("_", 1)[0] for n in model.state_decl.instance_specs
               if n.endswith("_" + b)}
    if bases_a != bases_b:
        return None
    return a, b


def _side_by_side(left: str, right: str, left_title: str, right_title: str) -> str:
    left_lines = [left_title] + (left.rstrip("\n").split("\n") if left.strip() else [])
    right_lines = [right_title] + (right.rstrip("\n").split("\n") if right.strip() else [])
    width = max(len(line) for line in left_lines) + 4
    out = []
    for i in range(max(len(left_lines), len(right_lines))):
        lcol = left_lines[i] if i < len(left_lines) else ""
        rcol = right_lines[i] if i < len(right_lines) else ""
        out.append(f"{lcol:<{width}}{rcol}".rstrip())
    return "\n".join(out) + "\n"


def explain(report: CheckReport) -> str:
    """Render witness event trees; side by side for non-interference products."""
    if report.all_hold:
        return "no counterexample: all assertions hold within bounds\n"
    model = report.model
    out = []
    for verdict in report.verdicts:
        if verdict.holds:
            continue
        trace = verdict.witness
        failing_rec = trace.steps[verdict.failing_step]
        out.append(f"assertion {verdict.name} fails at step {verdict.failing_step} "
                   f"(time {failing_rec.time})")
        assigned = ", ".join(f"{i}.{f}={v.bits}"
                             for (i, f), v in sorted(verdict.witness_assignment.items()))
        out.append(f"initial assignment: {assigned}")
        suffixes = _machine_suffixes(model) if model is not None else None
        if suffixes:
            a, b = suffixes
            specs_a = {s.name for s in model.events if s.name.endswith("_" + a)}
            specs_b = {s.name for s in model.events if s.name.endswith("_" + b)}
            out.append(_side_by_side(
                render_event_forest(trace, only_specs=specs_a),
                render_event_forest(trace, only_specs=specs_b),
                f"machine {a}:", f"machine {b}:").rstrip("\n"))
        else:
            out.append(render_event_forest(trace).rstrip("\n"))
        out.append(f"first divergence from the assertion body at step {verdict.failing_step}, "
                   f"time {failing_rec.time}")
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"

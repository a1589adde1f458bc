"""Brute-force verdict oracle: nested loops over assignments, straight-line evaluation.

Kept deliberately naive and separate from the checker so the two can disagree.
Shares only the engine's trace execution and expression evaluator.
"""

from __future__ import annotations

from itertools import product

from maestro.ast import (
    AssertionMode,
    BitVecValue,
    Cmp,
    Lit,
    Model,
    StateRef,
    conjuncts,
    has_primed,
)
from maestro.engine import EvalContext, deployed_counts, eval_bool, run_trace


def oracle_pins(model: Model) -> dict:
    """Fields pinned by a top-level `ref = literal` (or flipped) initial equality."""
    pins = {}
    for constraint in model.initial_constraints:
        for part in conjuncts(constraint):
            if not isinstance(part, Cmp) or part.op != "=":
                continue
            ref, lit = None, None
            if isinstance(part.left, StateRef) and isinstance(part.right, Lit):
                ref, lit = part.left, part.right
            elif isinstance(part.right, StateRef) and isinstance(part.left, Lit):
                ref, lit = part.right, part.left
            if ref is None or ref.primed:
                continue
            width = model.state_decl.width_of(ref.instance, ref.field)
            if lit.value < (1 << width) and (ref.instance, ref.field) not in pins:
                pins[(ref.instance, ref.field)] = lit.value
    return pins


def oracle_assignments(model: Model):
    """Yield every admitted initial assignment, free fields counted in value order."""
    pins = oracle_pins(model)
    fields = sorted((inst, name, width) for inst, name, width in model.state_decl.all_fields())
    free = [(inst, name, width) for inst, name, width in fields if (inst, name) not in pins]
    domains = [range(1 << width) for _, _, width in free]
    for values in product(*domains):
        assignment = {}
        for inst, name, width in fields:
            if (inst, name) in pins:
                assignment[(inst, name)] = BitVecValue(width, pins[(inst, name)])
        for (inst, name, width), value in zip(free, values):
            assignment[(inst, name)] = BitVecValue(width, value)
        ctx = EvalContext(state=assignment, int_width=model.int_width)
        if all(eval_bool(c, ctx) for c in model.initial_constraints):
            yield assignment


def oracle_assertion_failure(model: Model, trace, assertion):
    """Failing step index, or None. Primed ALWAYS bodies stop one step short."""
    steps = trace.steps
    if assertion.mode is AssertionMode.FINALLY:
        last = steps[-1]
        ctx = EvalContext(state=last.machine_state, int_width=model.int_width,
                          time=last.time, counts=deployed_counts(last))
        return None if eval_bool(assertion.body, ctx) else last.step_index
    horizon = len(steps) - 1 if has_primed(assertion.body) else len(steps)
    for x in range(horizon):
        rec = steps[x]
        nxt = steps[x + 1] if x + 1 < len(steps) else None
        ctx = EvalContext(
            state=rec.machine_state, int_width=model.int_width, time=rec.time,
            counts=deployed_counts(rec),
            next_state=nxt.machine_state if nxt else None,
            next_time=nxt.time if nxt else None)
        if not eval_bool(assertion.body, ctx):
            return x
    return None


def oracle_check(model: Model) -> dict:
    """Assertion name -> (holds, first failing assignment or None, failing step or None)."""
    results = {a.name: (True, None, None) for a in model.assertions}
    explored = 0
    for assignment in oracle_assignments(model):
        explored += 1
        trace = run_trace(model, assignment)
        for assertion in model.assertions:
            holds, _, _ = results[assertion.name]
            if not holds:
                continue
            failing = oracle_assertion_failure(model, trace, assertion)
            if failing is not None:
                results[assertion.name] = (False, dict(assignment), failing)
    return {"verdicts": results, "explored": explored}

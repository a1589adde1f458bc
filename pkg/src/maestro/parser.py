"""YAML front-end for model files and the embedded expression mini-grammar."""

from __future__ import annotations

import re
from typing import Optional

import yaml

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
    Diagnostic,
    EventSpec,
    Expr,
    Lit,
    MaestroError,
    Model,
    Not,
    Or,
    SourceSpan,
    StateChangeClause,
    StateDecl,
    StateRef,
    TimeRef,
    TriggerClause,
    TRUE,
    errors_of,
    validate,
    ValidationError,
)

MAX_EXPR_DEPTH = 64
_MAX_NODE_DEPTH = 32


class ParseError(MaestroError):
    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        self.span = span or SourceSpan("<input>", 1, 1)
        super().__init__(f"{self.span}: {message}")
        self.message = message


# ---------------------------------------------------------------------------
# Tokenizer for the expression mini-grammar

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|>=|!=|<-|[=<>+\-(){},;:.'])
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "column")

    def __init__(self, kind: str, text: str, column: int):
        self.kind = kind        # "int" | "name" | "op" | "eof"
        self.text = text
        self.column = column    # 1-based within the string


def _tokenize(text: str, span: SourceSpan) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                _shift(span, pos))
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append(_Token(kind, m.group(), m.start() + 1))
    tokens.append(_Token("eof", "", len(text) + 1))
    return tokens


def _shift(span: SourceSpan, offset: int) -> SourceSpan:
    return SourceSpan(span.file, span.line, span.column + offset)


class _ExprParser:
    """Recursive-descent parser over a token list.

    Grammar:
        boolexpr   := conj ('or' conj)*
        conj       := negation ('and' negation)*
        negation   := 'not' negation | 'true' | 'false' | group | comparison
        comparison := sum ('=' | '!=' | '<' | '<=' | '>' | '>=') sum
        sum        := atom (('+' | '-') atom)*
        atom       := INT | 'time' [prime] | 'count' '(' NAME ')'
                    | 'self' '.' NAME | NAME '.' NAME [prime] | '(' sum ')'
    A parenthesized group is tried as a boolean group first and re-parsed as an
    arithmetic group when a comparison operator follows it.
    """

    def __init__(self, text: str, span: SourceSpan):
        self.text = text
        self.span = span
        self.tokens = _tokenize(text, span)
        self.pos = 0
        self.depth = 0

    # -- plumbing

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at(self, kind: str, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: Optional[str] = None) -> _Token:
        tok = self.peek()
        if not self.at(kind, text):
            want = text if text is not None else kind
            raise self.error(f"expected {want!r}, found {tok.text or 'end of input'!r}")
        return self.next()

    def error(self, message: str) -> ParseError:
        return ParseError(message, _shift(self.span, self.peek().column - 1))

    def _enter(self):
        self.depth += 1
        if self.depth > MAX_EXPR_DEPTH:
            raise self.error("expression too deeply nested")

    def _leave(self):
        self.depth -= 1

    def done(self) -> bool:
        return self.at("eof")

    def expect_end(self):
        if not self.done():
            raise self.error(f"unexpected trailing input {self.peek().text!r}")

    # -- boolean level

    def boolexpr(self) -> BoolExpr:
        self._enter()
        left = self.conj()
        while self.at("name", "or"):
            self.next()
            left = Or(left, self.conj())
        self._leave()
        return left

    def conj(self) -> BoolExpr:
        left = self.negation()
        while self.at("name", "and"):
            self.next()
            left = And(left, self.negation())
        return left

    def negation(self) -> BoolExpr:
        if self.at("name", "not"):
            self.next()
            return Not(self.negation())
        if self.at("name", "true"):
            self.next()
            return BoolLit(True)
        if self.at("name", "false"):
            self.next()
            return BoolLit(False)
        if self.at("op", "("):
            # Boolean group unless a comparison operator follows the closing paren.
            saved = self.pos
            try:
                self.next()
                inner = self.boolexpr()
                self.expect("op", ")")
                if self.peek().kind == "op" and self.peek().text in _CMP_OPS:
                    raise self.error("arithmetic group")
                return inner
            except ParseError:
                self.pos = saved
        return self.comparison()

    def comparison(self) -> BoolExpr:
        left = self.sum()
        tok = self.peek()
        if tok.kind == "op" and tok.text in _CMP_OPS:
            self.next()
            return Cmp(tok.text, left, self.sum())
        raise self.error("expected a comparison operator")

    # -- arithmetic level

    def sum(self) -> Expr:
        self._enter()
        left = self.atom()
        while self.at("op", "+") or self.at("op", "-"):
            op = self.next().text
            left = BinOp(op, left, self.atom())
        self._leave()
        return left

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return Lit(int(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.next()
            self._enter()
            inner = self.sum()
            self._leave()
            self.expect("op", ")")
            return inner
        if tok.kind == "name":
            if tok.text == "time":
                self.next()
                primed = self._maybe_prime()
                return TimeRef(primed)
            if tok.text == "count":
                self.next()
                self.expect("op", "(")
                name = self.expect("name").text
                self.expect("op", ")")
                return CountRef(name)
            if tok.text == "self":
                self.next()
                self.expect("op", ".")
                fieldname = self.expect("name").text
                return DataRef(fieldname)
            self.next()
            self.expect("op", ".")
            fieldname = self.expect("name").text
            primed = self._maybe_prime()
            return StateRef(tok.text, fieldname, primed)
        raise self.error(f"expected a value, found {tok.text or 'end of input'!r}")

    def _maybe_prime(self) -> bool:
        if self.at("op", "'"):
            self.next()
            return True
        return False

    def state_ref(self) -> StateRef:
        inst = self.expect("name").text
        self.expect("op", ".")
        fieldname = self.expect("name").text
        return StateRef(inst, fieldname, self._maybe_prime())


_CMP_OPS = {"=", "!=", "<", "<=", ">", ">="}

_DEFAULT_SPAN = SourceSpan("<string>", 1, 1)


# ---------------------------------------------------------------------------
# Mini-grammar entry points

def parse_boolexpr(text: str, span: SourceSpan = _DEFAULT_SPAN) -> BoolExpr:
    p = _ExprParser(text, span)
    result = p.boolexpr()
    p.expect_end()
    return result


def parse_trigger_string(text: str, span: SourceSpan = _DEFAULT_SPAN) -> list:
    """Parse a TriggersEvent field into TriggerClause values; "None" yields []."""
    if text.strip() == "None":
        return []
    p = _ExprParser(text, span)
    clauses = []
    while True:
        cond: BoolExpr = TRUE
        if p.at("name", "IF"):
            p.next()
            cond = p.boolexpr()
            p.expect("op", ":")
        p.expect("name", "Trigger")
        target = p.expect("name").text
        p.expect("op", "{")
        assignments = []
        if p.at("name", "NONE"):
            p.next()
        else:
            while True:
                fieldname = p.expect("name").text
                p.expect("op", "=")
                assignments.append((fieldname, p.sum()))
                if p.at("op", ","):
                    p.next()
                    continue
                break
        p.expect("op", "}")
        clauses.append(TriggerClause(cond, target, tuple(assignments), span=span))
        if p.at("op", ";"):
            p.next()
            continue
        break
    p.expect_end()
    return clauses


def parse_statechange_string(text: str, span: SourceSpan = _DEFAULT_SPAN) -> list:
    """Parse a StateChanges field into StateChangeClause values; "None" yields []."""
    if text.strip() == "None":
        return []
    p = _ExprParser(text, span)
    clauses = []
    while True:
        cond: BoolExpr = TRUE
        if p.at("name", "IF"):
            p.next()
            cond = p.boolexpr()
            p.expect("op", ":")
        p.expect("name", "SC")
        target = p.state_ref()
        if target.primed:
            raise ParseError("state-change target must be unprimed", span)
        p.expect("op", "<-")
        value = p.sum()
        clauses.append(StateChangeClause(cond, target, value, span=span))
        if p.at("op", ";"):
            p.next()
            continue
        break
    p.expect_end()
    return clauses


def parse_assertion_string(text: str, name: str = "assertion",
                           span: SourceSpan = _DEFAULT_SPAN) -> Assertion:
    p = _ExprParser(text, span)
    if p.at("name", "ALWAYS"):
        p.next()
        mode = AssertionMode.ALWAYS
    elif p.at("name", "FINALLY"):
        p.next()
        mode = AssertionMode.FINALLY
    else:
        raise p.error("assertion must start with ALWAYS or FINALLY")
    body = p.boolexpr()
    p.expect_end()
    assertion = Assertion(name, mode, body, span=span)
    if mode is AssertionMode.FINALLY:
        from .ast import has_primed
        if has_primed(body):
            raise ParseError("primed reference illegal in FINALLY", span)
    return assertion


def parse_carried_data(text: str, span: SourceSpan = _DEFAULT_SPAN) -> tuple:
    """Parse a CarriesData field: "None" or "name:width, name:width"."""
    if text.strip() == "None":
        return ()
    fields = []
    for part in text.split(","):
        part = part.strip()
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(\d+)", part)
        if m is None:
            raise ParseError(f"bad carried-data field {part!r} (want name:width)", span)
        width = int(m.group(2))
        if width < 1:
            raise ParseError(f"carried-data width must be >= 1 in {part!r}", span)
        fields.append((m.group(1), width))
    return tuple(fields)


# ---------------------------------------------------------------------------
# YAML model files

def _mark_span(mark, filename: str) -> SourceSpan:
    return SourceSpan(filename, mark.line + 1, mark.column + 1)


def _node_span(node, filename: str) -> SourceSpan:
    return _mark_span(node.start_mark, filename)


def _scalar_span(node, filename: str) -> SourceSpan:
    # Point inside the scalar's content; quoted scalars start one column later.
    span = _node_span(node, filename)
    if getattr(node, "style", None) in ('"', "'"):
        return SourceSpan(span.file, span.line, span.column + 1)
    return span


def _expect_scalar(node, what: str, filename: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise ParseError(f"expected a scalar for {what}", _node_span(node, filename))
    return node.value


def _expect_int(node, what: str, filename: str) -> int:
    text = _expect_scalar(node, what, filename).strip()
    try:
        return int(text, 10)
    except ValueError:
        raise ParseError(f"expected an integer for {what}, found {text!r}",
                         _node_span(node, filename)) from None


def _expect_sequence(node, what: str, filename: str) -> list:
    if not isinstance(node, yaml.SequenceNode):
        raise ParseError(f"expected a list for {what}", _node_span(node, filename))
    return node.value


def _expect_mapping(node, what: str, filename: str) -> list:
    if not isinstance(node, yaml.MappingNode):
        raise ParseError(f"expected a mapping for {what}", _node_span(node, filename))
    return node.value


def _mapping_items(node, what: str, filename: str, depth: int = 0) -> list:
    if depth > _MAX_NODE_DEPTH:
        raise ParseError("document nested too deeply", _node_span(node, filename))
    items = []
    seen = set()
    for key_node, value_node in _expect_mapping(node, what, filename):
        key = _expect_scalar(key_node, f"key in {what}", filename)
        if key in seen:
            raise ParseError(f"duplicate key {key!r} in {what}", _node_span(key_node, filename))
        seen.add(key)
        items.append((key, key_node, value_node))
    return items


_BV_RE = re.compile(r"BV\[(\d+)\]")

_EVENT_FIELDS = ("Name", "CarriesData", "TriggersEvent", "StateChanges",
                 "TimingDelay", "PresentAtStart")


def _parse_machine_state(node, filename: str) -> StateDecl:
    type_specs: dict = {}
    instance_specs: dict = {}
    for entry in _expect_sequence(node, "MachineState", filename):
        items = _mapping_items(entry, "MachineState entry", filename)
        if len(items) != 1 or items[0][0] not in ("TypeSpec", "InstanceSpec"):
            raise ParseError("MachineState entries must be TypeSpec or InstanceSpec",
                             _node_span(entry, filename))
        section, _, body = items[0]
        if section == "TypeSpec":
            for tentry in _expect_sequence(body, "TypeSpec", filename):
                titems = _mapping_items(tentry, "TypeSpec entry", filename)
                if len(titems) != 1:
                    raise ParseError("each TypeSpec entry declares one type",
                                     _node_span(tentry, filename))
                tname, tkey, tbody = titems[0]
                if tname in type_specs:
                    raise ParseError(f"duplicate type {tname}", _node_span(tkey, filename))
                fields = []
                for fname, fkey, fnode in _mapping_items(tbody, f"type {tname}", filename):
                    text = _expect_scalar(fnode, f"width of {tname}.{fname}", filename).strip()
                    m = _BV_RE.fullmatch(text)
                    if m is None:
                        raise ParseError(f"expected \"BV[width]\" for {tname}.{fname}, "
                                         f"found {text!r}", _node_span(fnode, filename))
                    width = int(m.group(1))
                    if width < 1:
                        raise ParseError(f"width of {tname}.{fname} must be >= 1",
                                         _node_span(fnode, filename))
                    fields.append((fname, width))
                type_specs[tname] = tuple(fields)
        else:
            for ientry in _expect_sequence(body, "InstanceSpec", filename):
                iitems = _mapping_items(ientry, "InstanceSpec entry", filename)
                if len(iitems) != 1:
                    raise ParseError("each InstanceSpec entry declares one instance",
                                     _node_span(ientry, filename))
                iname, ikey, inode = iitems[0]
                if iname in instance_specs:
                    raise ParseError(f"duplicate instance {iname}", _node_span(ikey, filename))
                instance_specs[iname] = _expect_scalar(inode, f"type of {iname}", filename).strip()
    return StateDecl(type_specs, instance_specs)


def _parse_event(node, filename: str) -> tuple:
    """Returns (EventSpec, MaxInstances or None)."""
    span = _node_span(node, filename)
    fields = {}
    nodes = {}
    for key, _, value in _mapping_items(node, "event", filename):
        if key not in _EVENT_FIELDS and key != "MaxInstances":
            raise ParseError(f"unknown event field {key!r}", _node_span(value, filename))
        fields[key] = value
        nodes[key] = value
    for required in _EVENT_FIELDS:
        if required not in fields:
            raise ParseError(f"event is missing required field {required}", span)

    name = _expect_scalar(fields["Name"], "Name", filename).strip()
    carried = parse_carried_data(
        _expect_scalar(fields["CarriesData"], "CarriesData", filename),
        _scalar_span(nodes["CarriesData"], filename))
    triggers = parse_trigger_string(
        _expect_scalar(fields["TriggersEvent"], "TriggersEvent", filename),
        _scalar_span(nodes["TriggersEvent"], filename))
    changes = parse_statechange_string(
        _expect_scalar(fields["StateChanges"], "StateChanges", filename),
        _scalar_span(nodes["StateChanges"], filename))
    delay = _expect_int(fields["TimingDelay"], "TimingDelay", filename)
    if delay < 0:
        raise ParseError("TimingDelay must be non-negative",
                         _node_span(fields["TimingDelay"], filename))
    present_text = _expect_scalar(fields["PresentAtStart"], "PresentAtStart", filename).strip()
    if present_text not in ("Yes", "No"):
        raise ParseError(f"PresentAtStart must be \"Yes\" or \"No\", found {present_text!r}",
                         _node_span(fields["PresentAtStart"], filename))
    cap = None
    if "MaxInstances" in fields:
        cap = _expect_int(fields["MaxInstances"], "MaxInstances", filename)
        if cap < 1:
            raise ParseError("MaxInstances must be >= 1",
                             _node_span(fields["MaxInstances"], filename))
    spec = EventSpec(
        name=name,
        carried_data=carried,
        triggers=tuple(triggers),
        state_changes=tuple(changes),
        delay=delay,
        present_at_start=(present_text == "Yes"),
        span=span,
    )
    return spec, cap


_SECTIONS = ("MachineState", "Events", "Assertions", "InitialState", "MaxSteps", "IntWidth")


def parse_model(text: str, filename: str = "<string>") -> Model:
    """Parse a Maestro model document; raises ParseError or ValidationError."""
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        span = _mark_span(mark, filename) if mark else SourceSpan(filename, 1, 1)
        raise ParseError(exc.problem or "malformed YAML", span) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed YAML: {exc}", SourceSpan(filename, 1, 1)) from None
    if root is None:
        raise ParseError("empty document", SourceSpan(filename, 1, 1))

    sections = {}
    for key, key_node, value in _mapping_items(root, "model document", filename):
        if key not in _SECTIONS:
            raise ParseError(f"unknown section {key!r}", _node_span(key_node, filename))
        sections[key] = value
    for required in ("MachineState", "Events", "MaxSteps", "IntWidth"):
        if required not in sections:
            raise ParseError(f"missing section {required}", _node_span(root, filename))

    state_decl = _parse_machine_state(sections["MachineState"], filename)

    events = []
    caps: dict = {}
    event_entries = _expect_sequence(sections["Events"], "Events", filename)
    if not event_entries:
        raise ParseError("at least one event required", _node_span(sections["Events"], filename))
    for entry in event_entries:
        spec, cap = _parse_event(entry, filename)
        events.append(spec)
        if cap is not None:
            caps[spec.name] = cap

    assertions = []
    if "Assertions" in sections:
        for entry in _expect_sequence(sections["Assertions"], "Assertions", filename):
            items = dict((k, v) for k, _, v in _mapping_items(entry, "assertion", filename))
            if set(items) != {"Name", "Assert"}:
                raise ParseError("assertions need exactly Name and Assert fields",
                                 _node_span(entry, filename))
            name = _expect_scalar(items["Name"], "assertion Name", filename).strip()
            assertions.append(parse_assertion_string(
                _expect_scalar(items["Assert"], "Assert", filename),
                name=name, span=_scalar_span(items["Assert"], filename)))

    constraints = []
    if "InitialState" in sections:
        for entry in _expect_sequence(sections["InitialState"], "InitialState", filename):
            items = _mapping_items(entry, "InitialState entry", filename)
            if len(items) != 1:
                raise ParseError("each InitialState entry holds one constraint",
                                 _node_span(entry, filename))
            _, _, cnode = items[0]
            constraints.append(parse_boolexpr(
                _expect_scalar(cnode, "initial constraint", filename),
                _scalar_span(cnode, filename)))

    max_steps = _expect_int(sections["MaxSteps"], "MaxSteps", filename)
    if max_steps < 1:
        raise ParseError("MaxSteps must be >= 1", _node_span(sections["MaxSteps"], filename))
    int_width = _expect_int(sections["IntWidth"], "IntWidth", filename)
    if int_width < 1:
        raise ParseError("IntWidth must be >= 1", _node_span(sections["IntWidth"], filename))

    model = Model(
        state_decl=state_decl,
        events=tuple(events),
        assertions=tuple(assertions),
        initial_constraints=tuple(constraints),
        max_steps=max_steps,
        int_width=int_width,
        instance_caps=caps,
    )
    diags = validate(model)
    errors = errors_of(diags)
    if errors:
        fallback = SourceSpan(filename, 1, 1)
        errors = [d if d.span else Diagnostic(d.severity, d.message, fallback) for d in errors]
        raise ValidationError(errors)
    return model


def parse_model_file(path) -> Model:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), filename=str(path))


# ---------------------------------------------------------------------------
# Canonical pretty-printing and model serialization

def render_expr(e: Expr, parent: Optional[str] = None) -> str:
    if isinstance(e, Lit):
        return str(e.value)
    if isinstance(e, StateRef):
        return f"{e.instance}.{e.field}" + ("'" if e.primed else "")
    if isinstance(e, DataRef):
        return f"self.{e.field}"
    if isinstance(e, TimeRef):
        return "time'" if e.primed else "time"
    if isinstance(e, CountRef):
        return f"count({e.event})"
    if isinstance(e, BinOp):
        left = render_expr(e.left)
        right = render_expr(e.right)
        if isinstance(e.right, BinOp):
            right = f"({right})"
        text = f"{left} {e.op} {right}"
        return text
    raise TypeError(f"not an expression: {e!r}")


def render_bool(e: BoolExpr) -> str:
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, Cmp):
        return f"{render_expr(e.left)} {e.op} {render_expr(e.right)}"
    if isinstance(e, Not):
        inner = render_bool(e.operand)
        if isinstance(e.operand, BoolLit):
            return f"not {inner}"
        return f"not ({inner})"
    if isinstance(e, And):
        parts = []
        for side in (e.left, e.right):
            text = render_bool(side)
            if isinstance(side, Or):
                text = f"({text})"
            parts.append(text)
        return " and ".join(parts)
    if isinstance(e, Or):
        return f"{render_bool(e.left)} or {render_bool(e.right)}"
    raise TypeError(f"not a boolean expression: {e!r}")


def render_trigger_clause(clause: TriggerClause) -> str:
    if clause.assignments:
        inner = ", ".join(f"{name} = {render_expr(value)}" for name, value in clause.assignments)
    else:
        inner = "NONE"
    text = f"Trigger {clause.target}{{{inner}}}"
    if clause.condition != TRUE:
        text = f"IF {render_bool(clause.condition)} : {text}"
    return text


def render_trigger_clauses(clauses) -> str:
    if not clauses:
        return "None"
    return "; ".join(render_trigger_clause(c) for c in clauses)


def render_state_change(clause: StateChangeClause) -> str:
    text = (f"SC {clause.target.instance}.{clause.target.field} "
            f"<- {render_expr(clause.value)}")
    if clause.condition != TRUE:
        text = f"IF {render_bool(clause.condition)} : {text}"
    return text


def render_state_changes(clauses) -> str:
    if not clauses:
        return "None"
    return "; ".join(render_state_change(c) for c in clauses)


def render_assertion(a: Assertion) -> str:
    keyword = "ALWAYS" if a.mode is AssertionMode.ALWAYS else "FINALLY"
    return f"{keyword} {render_bool(a.body)}"


def render_carried_data(carried: tuple) -> str:
    if not carried:
        return "None"
    return ", ".join(f"{name}:{width}" for name, width in carried)


def serialize_model(model: Model) -> str:
    """Write a model in the canonical file format; parse(serialize(m)) == m."""
    out = ["MachineState:"]
    out.append("  - TypeSpec:")
    for tname, fields in model.state_decl.type_specs.items():
        body = ", ".join(f"{n}: \"BV[{w}]\"" for n, w in fields)
        out.append(f"      - {tname}: {{{body}}}")
    out.append("  - InstanceSpec:")
    for iname, tname in model.state_decl.instance_specs.items():
        out.append(f"      - {iname}: {tname}")
    out.append("Events:")
    for spec in model.events:
        out.append(f"  - Name: \"{spec.name}\"")
        out.append(f"    CarriesData: \"{render_carried_data(spec.carried_data)}\"")
        out.append(f"    TriggersEvent: \"{render_trigger_clauses(spec.triggers)}\"")
        out.append(f"    StateChanges: \"{render_state_changes(spec.state_changes)}\"")
        out.append(f"    TimingDelay: \"{spec.delay}\"")
        out.append(f"    PresentAtStart: \"{'Yes' if spec.present_at_start else 'No'}\"")
        if spec.name in model.instance_caps:
            out.append(f"    MaxInstances: {model.instance_caps[spec.name]}")
    if model.assertions:
        out.append("Assertions:")
        for a in model.assertions:
            out.append(f"  - Name: \"{a.name}\"")
            out.append(f"    Assert: \"{render_assertion(a)}\"")
    if model.initial_constraints:
        out.append("InitialState:")
        for i, c in enumerate(model.initial_constraints, start=1):
            out.append(f"  - Constraint{i}: \"{render_bool(c)}\"")
    out.append(f"MaxSteps: {model.max_steps}")
    out.append(f"IntWidth: {model.int_width}")
    return "\n".join(out) + "\n"

"""Reader and writer for the plain-text map format.

::

    setting: mixed
    vars: z1 z2
    map:
    G1 = z1 + conj(z2)
    G2 = z1 - conj(z2)

Expressions use ``+ - * / ^`` and parentheses, integer literals, ``conj(v)``
(mixed setting only) and ``i`` for the imaginary unit (complex and mixed).
Division is only allowed by a nonzero constant.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from typing import Sequence

from .errors import ConjInNonMixed, InputError, NonzeroConstantTerm, PolySyntaxError
from .poly import (
    I_UNIT,
    QI,
    PolyMap,
    Polynomial,
    Setting,
    raw_add,
    raw_constant,
    raw_is_constant,
    raw_mul,
    raw_pow,
    raw_variable,
)

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


class _ExprParser:
    def __init__(self, text, variables, setting, line=None, col0=0):
        self.text = text
        self.vars = {v: i for i, v in enumerate(variables)}
        self.n = len(variables)
        self.setting = setting
        self.line = line
        self.col0 = col0
        self.tokens = self._tokenize()
        self.pos = 0

    def _error(self, msg, col=None):
        raise PolySyntaxError(msg, self.line, None if col is None else col + self.col0 + 1)

    def _tokenize(self):
        out, i = [], 0
        text = self.text
        while i < len(text):
            if text[i:].strip() == "":
                break
            m = _TOKEN.match(text, i)
            if not m:
                j = i
                while text[j].isspace():
                    j += 1
                self._error(f"unexpected character {text[j]!r}", j)
            kind = "int" if m.group(1) else "name" if m.group(2) else "op"
            val = m.group(1) or m.group(2) or m.group(3)
            out.append((kind, "^" if val == "**" else val, m.start(m.lastindex)))
            i = m.end()
        out.append(("end", "", len(text)))
        return out

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, val):
        tok = self.take()
        if tok[1] != val:
            self._error(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            self._error("empty expression", 0)
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self._error(f"unexpected token {tok[1]!r}", tok[2])
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            value = raw_add(value, rhs, QI(1 if op == "+" else -1))
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ("*", "/"):
            _, op, col = self.take()
            rhs = self.unary()
            if op == "*":
                value = raw_mul(value, rhs)
            else:
                if not raw_is_constant(rhs) or not rhs:
                    self._error("division is only allowed by a nonzero constant", col)
                (c,) = rhs.values()
                value = {k: v / c for k, v in value.items()}
        return value

    def unary(self):
        if self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            value = self.unary()
            return value if op == "+" else {k: -v for k, v in value.items()}
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                self._error("exponent must be a nonnegative integer literal", tok[2])
            base = raw_pow(base, int(tok[1]), self.n)
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "int":
            return raw_constant(int(val), self.n)
        if val == "(":
            value = self.expr()
            self.expect(")")
            return value
        if kind == "name":
            if val == "conj":
                if self.setting is not Setting.MIXED:
                    exc = ConjInNonMixed("conj() is only allowed in the mixed setting")
                    exc.line = self.line
                    raise exc
                self.expect("(")
                kind2, name, col2 = self.take()
                if name not in self.vars:
                    self._error(f"conj() takes a declared variable, got {name!r}", col2)
                self.expect(")")
                return raw_variable(self.vars[name], self.n, conj=True)
            if val == "i" and self.setting is not Setting.REAL:
                return raw_constant(I_UNIT, self.n)
            if val in self.vars:
                return raw_variable(self.vars[val], self.n)
            self._error(f"unknown variable {val!r}", col)
        self._error(f"unexpected token {val or 'end of input'!r}", col)


def _split_constant(raw, n):
    zero = ((0,) * n, (0,) * n)
    const = raw.pop(zero, QI(0))
    return raw, const


def parse_polynomial(
    text: str,
    variables: Sequence[str],
    setting: Setting | str = Setting.REAL,
    *,
    translate_constants: bool = False,
) -> Polynomial:
    """Parse a single expression over the given variables."""
    setting = Setting(setting)
    raw = _ExprParser(text, list(variables), setting).parse()
    raw, const = _split_constant(raw, len(variables))
    if const and not translate_constants:
        raise NonzeroConstantTerm(text.strip(), const)
    return Polynomial(setting, len(variables), raw)


def parse_polynomial_map(
    text: str,
    setting: Setting | str | None = None,
    *,
    translate_constants: bool = False,
) -> PolyMap:
    """Parse a map file.

    ``setting`` may be given by the caller, by a ``setting:`` header, or
    both (then they must agree).  With ``translate_constants`` a nonzero
    constant term is subtracted instead of rejected; the shift is kept in
    ``PolyMap.shifts``.
    """
    header_setting = None
    variables = None
    in_map = False
    entries = []
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0]
        if not line.strip():
            continue
        stripped = line.strip()
        low = stripped.lower()
        if not in_map:
            if low.startswith("setting:"):
                value = stripped.split(":", 1)[1].strip().lower()
                try:
                    header_setting = Setting(value)
                except ValueError:
                    raise PolySyntaxError(f"unknown setting {value!r}", lineno) from None
            elif low.startswith("vars:"):
                names = stripped.split(":", 1)[1].replace(",", " ").split()
                for v in names:
                    if not _IDENT.match(v) or v == "conj":
                        raise PolySyntaxError(f"invalid variable name {v!r}", lineno)
                if len(set(names)) != len(names):
                    raise PolySyntaxError("duplicate variable name", lineno)
                variables = names
            elif low.startswith("map:"):
                in_map = True
                rest = stripped.split(":", 1)[1].strip()
                if rest:
                    raise PolySyntaxError("components go on their own lines after 'map:'", lineno)
            else:
                raise PolySyntaxError(f"unexpected header line {stripped!r}", lineno)
            continue
        if "=" not in line:
            raise PolySyntaxError("expected '<name> = <expression>'", lineno)
        name, expr = line.split("=", 1)
        name = name.strip()
        if not _IDENT.match(name):
            raise PolySyntaxError(f"invalid component name {name!r}", lineno)
        entries.append((lineno, name, expr, len(line) - len(expr)))

    if setting is not None:
        setting = Setting(setting)
        if header_setting is not None and header_setting is not setting:
            raise InputError(f"setting mismatch: header says {header_setting.value}, caller asked {setting.value}")
    setting = setting or header_setting
    if setting is None:
        raise PolySyntaxError("missing 'setting:' header")
    if variables is None:
        raise PolySyntaxError("missing 'vars:' header")
    if setting is not Setting.REAL and "i" in variables:
        raise PolySyntaxError("'i' is the imaginary unit and cannot name a variable")
    if not entries:
        raise PolySyntaxError("no components after 'map:'")
    if len({name for _, name, _, _ in entries}) != len(entries):
        raise PolySyntaxError("duplicate component name")

    comps, names, shifts = [], [], {}
    for lineno, name, expr, col0 in entries:
        raw = _ExprParser(expr, variables, setting, line=lineno, col0=col0).parse()
        raw, const = _split_constant(raw, len(variables))
        if const:
            if not translate_constants:
                raise NonzeroConstantTerm(name, const, line=lineno)
            shifts[name] = const
        comps.append(Polynomial(setting, len(variables), raw))
        names.append(name)
    return PolyMap(comps, variables, names, shifts=shifts)


def format_polynomial_map(F: PolyMap) -> str:
    """Canonical text; ``parse_polynomial_map`` inverts it exactly."""
    return F.canonical_text()

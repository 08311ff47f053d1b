"""Script language for the batch front end.

A script declares one field backend, binds named objects (twisted
polynomials, matrices, varieties, point lists, maps, module
structures), and issues commands against them:

    field q=3 func;
    let P = T*t^0 + t^1;
    let M = [[P, t^1], [t^1, P]];
    diag M;
    torsion a=T-1;

Parsing is recursive descent with exact line/column error positions;
declarations are evaluated while parsing, so unknown names, duplicate
names, and backend mismatches all surface as ParseError.
"""

from . import fields
from .amodules import AModuleStructure
from .errors import AlgebraError, ParseError
from .fields import APoly
from .linalg import OreMatrix
from .ore import OrePoly
from .varieties import Morphism, full_space, zeros

_PUNCT = set(";=,{}[]()+-*^/")

_COMMANDS = {
    "diag": ("matrix",),
    "hermite": ("matrix",),
    "radical": ("matrix",),
    "zeros": ("matrix",),
    "annihilator": ("points",),
    "dim": ("variety",),
    "tangent": ("variety",),
    "image": ("map",),
    "kernel": ("map",),
    "preimage": ("map", "variety"),
    "sum": ("variety", "variety"),
    "intersect": ("variety", "variety"),
    "quotient": ("variety", "variety"),
    "separable": ("ore_or_map",),
}

_RESERVED = frozenset(
    {"t", "T", "g", "u", "S", "let", "field", "Z", "points", "map",
     "amodule", "q", "delta", "PhiT"})

# keyword-argument commands act on a module structure
_MODULE_COMMANDS = {
    "torsion": {"a": "apoly"},
    "torsionpoints": {"a": "apoly"},
    "rank": {"budget": "int?"},
    "tate": {"pi": "apoly", "n": "int"},
    "jacobian": {"H": "variety"},
    "gmax": {"H": "variety"},
}


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r})"


def tokenize(text):
    toks = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            toks.append(Token("int", int(text[start:i]), line, col))
            col += i - start
            continue
        if c.isalpha() or c == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            toks.append(Token("name", text[start:i], line, col))
            col += i - start
            continue
        if c in _PUNCT:
            toks.append(Token(c, c, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {c!r}", line=line, col=col)
    toks.append(Token("eof", None, line, col))
    return toks


class Command:
    """One parsed command: its name, resolved arguments, and the raw
    source text it came from."""

    __slots__ = ("name", "args", "echo", "line", "col")

    def __init__(self, name, args, echo, line, col):
        self.name = name
        self.args = args
        self.echo = echo
        self.line = line
        self.col = col


class Script:
    __slots__ = ("desc", "bindings", "commands")

    def __init__(self, desc, bindings, commands):
        self.desc = desc
        self.bindings = bindings
        self.commands = commands


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = tokenize(text)
        self.pos = 0
        self.desc = None
        self.bindings = {}
        self.commands = []

    # -- token plumbing

    def peek(self, ahead=0):
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, line=tok.line, col=tok.col)

    def expect(self, kind, what=None):
        t = self.peek()
        if t.kind != kind:
            self.fail(f"expected {what or kind}, got {t.value!r}")
        return self.next()

    def expect_name(self, word):
        t = self.peek()
        if t.kind != "name" or t.value != word:
            self.fail(f"expected {word!r}, got {t.value!r}")
        return self.next()

    def at_name(self, word):
        t = self.peek()
        return t.kind == "name" and t.value == word

    # -- script structure

    def parse(self):
        self.parse_field_decl()
        while self.peek().kind != "eof":
            if self.at_name("let"):
                self.parse_let()
            else:
                self.parse_command()
        return Script(self.desc, self.bindings, self.commands)

    def parse_field_decl(self):
        self.expect_name("field")
        self.expect_name("q")
        self.expect("=")
        qtok = self.expect("int", "a prime power")
        q = qtok.value
        kind = "finite"
        ext_m = None
        while self.peek().kind == "name":
            word = self.next()
            if word.value == "ext":
                self.expect_name("m")
                self.expect("=")
                ext_m = self.expect("int").value
            elif word.value == "func":
                kind = "func"
            elif word.value == "perfect":
                kind = "perfect"
            else:
                self.fail(f"unknown field modifier {word.value!r}", word)
        self.expect(";")
        try:
            if ext_m is not None:
                if kind != "finite":
                    self.fail("ext cannot be combined with func or perfect",
                              qtok)
                self.desc = fields.extension_field(q, ext_m)
            elif kind == "func":
                self.desc = fields.rational_function_field(q)
            elif kind == "perfect":
                self.desc = fields.perfect_closure(q)
            else:
                self.desc = fields.base_field(q)
        except AlgebraError as e:
            self.fail(str(e), qtok)

    def parse_let(self):
        self.expect_name("let")
        nametok = self.expect("name", "a binding name")
        name = nametok.value
        if name in self.bindings:
            self.fail(f"name already bound: {name}", nametok)
        if name in _RESERVED:
            self.fail(f"{name!r} is reserved", nametok)
        self.expect("=")
        self.bindings[name] = self.parse_value()
        self.expect(";")

    # -- values

    def parse_value(self):
        t = self.peek()
        if t.kind == "[":
            return ("matrix", self.parse_matrix())
        if t.kind == "name":
            if t.value == "Z" and self.peek(1).kind == "{":
                self.next()
                self.next()
                mat = self.parse_matrix_value()
                self.expect("}")
                return ("variety", zeros(mat))
            if t.value == "points":
                return ("points", self.parse_points())
            if t.value == "map":
                return ("map", self.parse_map())
            if t.value == "amodule":
                return ("amodule", self.parse_amodule())
            if t.value in self.bindings and self.peek(1).kind in (";", ")"):
                return self.bindings[self.next().value]
        return ("ore", self.parse_ore())

    def lookup(self, want):
        tok = self.expect("name", f"a {want} name")
        bound = self.bindings.get(tok.value)
        if bound is None:
            self.fail(f"unknown name: {tok.value}", tok)
        if bound[0] != want:
            self.fail(f"{tok.value} is a {bound[0]}, not a {want}", tok)
        return bound[1]

    def parse_matrix_value(self):
        t = self.peek()
        if t.kind == "name":
            bound = self.bindings.get(t.value)
            if bound is None:
                self.fail(f"unknown name: {t.value}", t)
            if bound[0] != "matrix":
                self.fail(f"{t.value} is a {bound[0]}, not a matrix", t)
            self.next()
            return bound[1]
        return self.parse_matrix()

    def parse_matrix(self):
        open_tok = self.expect("[")
        rows = []
        while True:
            rows.append(self.parse_row())
            if self.peek().kind == ",":
                self.next()
                continue
            break
        self.expect("]")
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            self.fail("matrix rows have unequal lengths", open_tok)
        return OreMatrix(self.desc, rows, ncols=widths.pop())

    def parse_row(self):
        self.expect("[")
        entries = [self.parse_ore()]
        while self.peek().kind == ",":
            self.next()
            entries.append(self.parse_ore())
        self.expect("]")
        return entries

    def parse_points(self):
        self.expect_name("points")
        self.expect("{")
        pts = []
        while self.peek().kind != "}":
            self.expect("(")
            pt = [self.parse_scalar()]
            while self.peek().kind == ",":
                self.next()
                pt.append(self.parse_scalar())
            self.expect(")")
            pts.append(tuple(pt))
            if self.peek().kind == ",":
                self.next()
        self.expect("}")
        return pts

    def parse_map(self):
        self.expect_name("map")
        self.expect("{")
        dom = self.lookup("variety")
        self.expect(",")
        cod = self.lookup("variety")
        self.expect(",")
        mattok = self.peek()
        mat = self.parse_matrix_value()
        self.expect("}")
        try:
            return Morphism(dom, cod, mat)
        except AlgebraError as e:
            self.fail(str(e), mattok)

    def parse_amodule(self):
        head = self.expect_name("amodule")
        self.expect("{")
        if self.at_name("q"):
            self.next()
            self.expect("=")
            qtok = self.expect("int")
            if qtok.value != self.desc.q:
                self.fail(
                    f"module is over F_{qtok.value} but the field backend "
                    f"has q = {self.desc.q}", qtok)
            self.expect(";")
        self.expect_name("delta")
        self.expect("=")
        delta = self.parse_scalar()
        self.expect(";")
        self.expect_name("PhiT")
        self.expect("=")
        mat = self.parse_matrix_value()
        if self.peek().kind == ";":
            self.next()
        self.expect("}")
        if mat.nrows != mat.ncols:
            self.fail("PhiT must be square", head)
        try:
            carrier = full_space(self.desc, mat.nrows)
            return AModuleStructure(carrier, mat, delta)
        except AlgebraError as e:
            self.fail(str(e), head)

    # -- twisted polynomial expressions

    def parse_scalar(self):
        tok = self.peek()
        p = self.parse_ore()
        if p.degree > 0:
            self.fail("expected a constant (no t allowed here)", tok)
        return p.coeff(0)

    def parse_ore(self):
        left = self.parse_term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            right = self.parse_term()
            left = left + right if op == "+" else left - right
        return left

    def parse_term(self):
        left = self.parse_factor()
        while self.peek().kind in ("*", "/"):
            op = self.next()
            right = self.parse_factor()
            if op.kind == "*":
                left = left * right
            else:
                if left.degree > 0 or right.degree > 0:
                    self.fail("division is only defined between constants",
                              op)
                if right.is_zero:
                    self.fail("division by zero", op)
                num = left.coeff(0) / right.coeff(0)
                left = OrePoly.scalar(num)
        return left

    def parse_factor(self):
        if self.peek().kind == "-":
            self.next()
            return -self.parse_factor()
        base = self.parse_atom()
        while self.peek().kind == "^":
            self.next()
            e = self.expect("int", "an exponent").value
            acc = OrePoly.one(self.desc)
            for _ in range(e):
                acc = acc * base
            base = acc
        return base

    def parse_atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return OrePoly.scalar(fields.from_int(self.desc, tok.value))
        if tok.kind == "(":
            self.next()
            inner = self.parse_ore()
            self.expect(")")
            return inner
        if tok.kind != "name":
            self.fail(f"expected a value, got {tok.value!r}")
        if tok.value == "t":
            self.next()
            return OrePoly.tau(self.desc)
        if tok.value == "T":
            if self.desc.kind not in ("rational", "perfect"):
                self.fail("T needs a function field backend (func/perfect)",
                          tok)
            self.next()
            return OrePoly.scalar(fields.t_element(self.desc))
        if tok.value == "S":
            if self.desc.kind != "perfect":
                self.fail("S{k} needs the perfect closure backend", tok)
            self.next()
            self.expect("{")
            k = self.expect("int").value
            self.expect("}")
            return OrePoly.scalar(fields.s_element(self.desc, k))
        if tok.value == "g":
            if self.desc.kind != "ext":
                self.fail("g needs an extension field backend (ext m=...)",
                          tok)
            self.next()
            return OrePoly.scalar(fields.generator(self.desc))
        if tok.value == "u":
            if self.desc.l == 1:
                self.fail("u needs q to be a proper prime power", tok)
            self.next()
            return OrePoly.scalar(fields.base_generator(self.desc))
        bound = self.bindings.get(tok.value)
        if bound is not None:
            if bound[0] != "ore":
                self.fail(f"{tok.value} is a {bound[0]}, not a polynomial",
                          tok)
            self.next()
            return bound[1]
        self.fail(f"unknown name: {tok.value}", tok)

    # -- polynomials in T over F_q (module arguments)

    def parse_apoly(self):
        return self._apoly_sum()

    def _apoly_sum(self):
        left = self._apoly_term()
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            right = self._apoly_term()
            left = left + right if op == "+" else left - right
        return left

    def _apoly_term(self):
        left = self._apoly_factor()
        while self.peek().kind == "*":
            self.next()
            left = left * self._apoly_factor()
        return left

    def _apoly_factor(self):
        if self.peek().kind == "-":
            self.next()
            return -self._apoly_factor()
        base = self._apoly_atom()
        while self.peek().kind == "^":
            self.next()
            e = self.expect("int", "an exponent").value
            base = base ** e
        return base

    def _apoly_atom(self):
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            return APoly.of(self.desc.q, tok.value)
        if tok.kind == "(":
            self.next()
            inner = self._apoly_sum()
            self.expect(")")
            return inner
        if tok.kind == "name" and tok.value == "T":
            self.next()
            return APoly.tvar(self.desc.q)
        self.fail("expected a polynomial in T over F_q")

    # -- commands

    def parse_command(self):
        tok = self.expect("name", "a command")
        name = tok.value
        start = self.pos - 1
        if name in _COMMANDS:
            args = [self.parse_arg(want) for want in _COMMANDS[name]]
            self.expect(";")
            self.commands.append(
                Command(name, {"args": args}, self.echo_from(start),
                        tok.line, tok.col))
            return
        if name in _MODULE_COMMANDS:
            self.parse_module_command(name, tok, start)
            return
        self.fail(f"unknown command: {name}", tok)

    _TIGHT = set("([{^*/=+-")

    def echo_from(self, start_tok_index):
        # reconstruct the command text from its tokens
        out = []
        prev = None
        for t in self.toks[start_tok_index:self.pos - 1]:
            word = str(t.value)
            if out and prev not in self._TIGHT \
                    and word not in ")]},^*/=+-":
                out.append(" ")
            out.append(word)
            prev = word
        return "".join(out)

    def parse_arg(self, want):
        tok = self.peek()
        if want == "ore_or_map":
            if tok.kind == "name" and tok.value in self.bindings:
                kind, obj = self.bindings[tok.value]
                if kind in ("ore", "map"):
                    self.next()
                    return (kind, obj)
                self.fail(f"{tok.value} is a {kind}; expected a polynomial "
                          f"or a map", tok)
            return ("ore", self.parse_ore())
        if tok.kind == "name" and tok.value in self.bindings:
            kind, obj = self.bindings[tok.value]
            if kind == want:
                self.next()
                return (kind, obj)
            if not (kind == "ore" and want == "matrix"):
                self.fail(f"{tok.value} is a {kind}, not a {want}", tok)
        val = self.parse_value()
        kind, obj = val
        if kind == "ore" and want == "matrix":
            return ("matrix", OreMatrix(self.desc, [[obj]], ncols=1))
        if kind != want:
            self.fail(f"expected a {want}, got a {kind}", tok)
        return val

    def parse_module_command(self, name, tok, start):
        spec = _MODULE_COMMANDS[name]
        target = None
        t = self.peek()
        if t.kind == "name" and t.value in self.bindings \
                and self.peek(1).kind != "=":
            kind, obj = self.bindings[t.value]
            if kind != "amodule":
                self.fail(f"{t.value} is a {kind}, not a module structure",
                          t)
            target = obj
            self.next()
        if target is None:
            mods = [v for k, v in self.bindings.values() if k == "amodule"]
            if len(mods) != 1:
                self.fail(
                    f"{name} needs a module structure: declare exactly one "
                    f"amodule or name one explicitly", tok)
            target = mods[0]
        kwargs = {}
        while self.peek().kind != ";":
            key = self.expect("name", "an argument name")
            if key.value not in spec:
                self.fail(f"{name} takes "
                          f"{', '.join(sorted(spec))}; got {key.value!r}",
                          key)
            if key.value in kwargs:
                self.fail(f"duplicate argument {key.value!r}", key)
            self.expect("=")
            want = spec[key.value]
            if want == "apoly":
                kwargs[key.value] = self.parse_apoly()
            elif want in ("int", "int?"):
                kwargs[key.value] = self.expect("int").value
            elif want == "variety":
                kwargs[key.value] = self.parse_arg("variety")[1]
        for key, want in spec.items():
            if not want.endswith("?") and key not in kwargs:
                self.fail(f"{name} needs {key}=...", tok)
        self.expect(";")
        kwargs["module"] = target
        self.commands.append(
            Command(name, kwargs, self.echo_from(start), tok.line, tok.col))


def parse(text):
    """Parse a script; declarations are evaluated eagerly."""
    return _Parser(text).parse()

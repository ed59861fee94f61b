"""Free-input wrapper module synthesis.

Every free identifier of an assertion is declared in a module named
``sva_check`` so the assertion can be linted on its own. Kinds are decided in
a fixed order (clock, parameter, function stub, multi-dimensional array,
wire); the clock test comes first so an ALL_CAPS clock stays a clock.
"""

from __future__ import annotations

import dataclasses
import enum
import re
from dataclasses import dataclass, field

from .errors import SvaError, WrapError
from .syntax import free_identifiers, identifier_occurrences, parse, render
from .syntax.nodes import (
    Clocked,
    Identifier,
    Labeled,
    Segment,
    SignalRef,
    walk,
)

MODULE_NAME = "sva_check"
PARAM_DEFAULT = "32'd4"
STUB_ARITY = 8

# SystemVerilog reserved words that may show up as scraped signal names.
SV_KEYWORDS = frozenset(
    """
    alias always always_comb always_ff always_latch and assert assign assume automatic before begin bind
    bins binsof bit break buf bufif0 bufif1 byte case casex casez cell chandle checker class clocking cmos
    config const constraint context continue cover covergroup coverpoint cross deassign default defparam
    design disable dist do edge else end endcase endchecker endclass endclocking endconfig endfunction
    endgenerate endgroup endinterface endmodule endpackage endprimitive endprogram endproperty endspecify
    endsequence endtable endtask enum event eventually expect export extends extern final first_match for
    force foreach forever fork forkjoin function generate genvar global highz0 highz1 if iff ifnone
    ignore_bins illegal_bins implements implies import incdir include initial inout input inside instance
    int integer interconnect interface intersect join join_any join_none large let liblist library local
    localparam logic longint macromodule matches medium modport module nand negedge nettype new nexttime
    nmos nor noshowcancelled not notif0 notif1 null or output package packed parameter pmos posedge
    primitive priority program property protected pull0 pull1 pulldown pullup pulsestyle_ondetect
    pulsestyle_onevent pure rand randc randcase randsequence rcmos real realtime ref reg reject_on release
    repeat restrict return rnmos rpmos rtran rtranif0 rtranif1 s_always s_eventually s_nexttime s_until
    s_until_with scalared sequence shortint shortreal showcancelled signed small soft solve specify
    specparam static string strong strong0 strong1 struct super supply0 supply1 sync_accept_on
    sync_reject_on table tagged task this throughout time timeprecision timeunit tran tranif0 tranif1 tri
    tri0 tri1 triand trior trireg type typedef union unique unique0 unsigned until until_with untyped use
    uwire var vectored virtual void wait wait_order wand weak weak0 weak1 while wildcard wire with within
    wor xnor xor
    """.split()
)

_ALL_CAPS = re.compile(r"[A-Z][A-Z0-9_]*")
_PLAIN_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_$]*")


class IdentifierKind(enum.Enum):
    Clock = "Clock"
    Parameter = "Parameter"
    FunctionStub = "FunctionStub"
    Mda = "Mda"
    Wire = "Wire"

    def __str__(self) -> str:
        return self.value


KIND_ORDER = (
    IdentifierKind.Clock,
    IdentifierKind.Parameter,
    IdentifierKind.FunctionStub,
    IdentifierKind.Mda,
    IdentifierKind.Wire,
)


def is_all_caps(name: str) -> bool:
    return len(name) >= 3 and bool(_ALL_CAPS.fullmatch(name))


def classify_identifier(ident, context) -> IdentifierKind:
    """Kind of ``ident`` given every place it occurs in ``context``."""
    roles = set()
    max_selects = 0
    for occ, ref, role in identifier_occurrences(context):
        if occ == ident:
            roles.add(role)
            max_selects = max(max_selects, len(ref.bit_selects))
    if "clock" in roles:
        return IdentifierKind.Clock
    if is_all_caps(ident.flat):
        return IdentifierKind.Parameter
    if "call" in roles:
        return IdentifierKind.FunctionStub
    if max_selects >= 2:
        return IdentifierKind.Mda
    return IdentifierKind.Wire


def declaration(kind: IdentifierKind, name: str) -> str:
    if kind is IdentifierKind.Clock:
        return f"input logic {name};"
    if kind is IdentifierKind.Parameter:
        return f"parameter logic [31:0] {name} = {PARAM_DEFAULT};"
    if kind is IdentifierKind.FunctionStub:
        args = ", ".join(f"input logic [31:0] a{i} = 32'd0" for i in range(STUB_ARITY))
        return f"function automatic logic [31:0] {name}({args}); return 32'd0; endfunction"
    if kind is IdentifierKind.Mda:
        return f"input logic [31:0][31:0][31:0] {name};"
    return f"input logic [31:0] {name};"


@dataclass(frozen=True)
class Declaration:
    ident: object  # Identifier
    kind: IdentifierKind
    name: str  # spelling used inside the wrapper
    text: str


@dataclass
class WrapperModule:
    module_name: str
    declarations: list = field(default_factory=list)  # of Declaration, in emission order
    body: str = ""
    injected_clock: str | None = None

    @property
    def ports(self) -> list:
        names = [self.injected_clock] if self.injected_clock else []
        names += [d.name for d in self.declarations if d.kind not in (IdentifierKind.Parameter, IdentifierKind.FunctionStub)]
        return names

    @property
    def declared(self) -> set:
        return {d.ident for d in self.declarations}

    def text(self) -> str:
        lines = [f"module {self.module_name}({', '.join(self.ports)});"]
        if self.injected_clock:
            lines.append(f"  {declaration(IdentifierKind.Clock, self.injected_clock)}")
        lines.extend(f"  {d.text}" for d in self.declarations)
        lines.append(f"  {self.body}")
        lines.append("endmodule")
        return "\n".join(lines) + "\n"


def _legal_name(flat: str, taken: set) -> str:
    name = flat.lstrip("\\")
    suffix = not _PLAIN_NAME.fullmatch(flat) or flat in SV_KEYWORDS
    if not _PLAIN_NAME.fullmatch(name):
        name = re.sub(r"\W", "_", name)
        if not name or name[0].isdigit():
            name = "_" + name
    if suffix or name in SV_KEYWORDS:
        name += "_w"
    while name in taken:
        name += "_w"
    return name


def _rename(node, names: dict):
    """Copy of ``node`` with every reference spelled by its wrapper name."""
    if isinstance(node, SignalRef):
        *head, last = node.path
        ident = Identifier(tuple(head) + (Segment(last.name),), last.indices)
        indices = tuple(_rename(i, names) for i in last.indices)
        return SignalRef((Segment(names[ident.flat], indices),))
    if isinstance(node, tuple):
        return tuple(_rename(x, names) for x in node)
    if dataclasses.is_dataclass(node) and not isinstance(node, type):
        changes = {f.name: _rename(getattr(node, f.name), names) for f in dataclasses.fields(node)}
        return dataclasses.replace(node, **changes)
    return node


def synthesize_wrapper(src, normalize_profile: str | None = None) -> WrapperModule:
    """Wrap one assertion; ``normalize_profile`` optionally normalizes first."""
    text = src
    if normalize_profile is not None and isinstance(src, str):
        from .normalize import normalize

        text, _ = normalize(src, normalize_profile)
    try:
        ast = parse(text) if isinstance(text, str) else text
    except SvaError as exc:
        raise WrapError(f"assertion does not parse: {exc}") from exc

    idents = sorted(free_identifiers(ast), key=lambda i: i.flat)
    kinds = {i: classify_identifier(i, ast) for i in idents}
    taken: set = set()
    names = {}
    for ident in idents:
        names[ident.flat] = _legal_name(ident.flat, taken)
        taken.add(names[ident.flat])

    decls = []
    for kind in KIND_ORDER:
        group = sorted((i for i in idents if kinds[i] is kind), key=lambda i: names[i.flat])
        for ident in group:
            name = names[ident.flat]
            decls.append(Declaration(ident, kind, name, declaration(kind, name)))

    renamed = _rename(ast, names)
    label = None
    if isinstance(renamed, Labeled):
        label, renamed = renamed.label, renamed.body
    injected = None
    if not any(isinstance(n, Clocked) for n in walk(renamed)):
        injected = "clk" if "clk" not in taken else "__pec_clk"
        renamed = Clocked("pos", SignalRef((Segment(injected),)), renamed)
    body = f"assert property ({render(renamed)});"
    if label is not None:
        body = f"{label}: {body}"
    return WrapperModule(MODULE_NAME, decls, body, injected)


# -- module-shell reader ----------------------------------------------------

_HEADER = re.compile(r"module\s+(\w+)\s*\(([^)]*)\)\s*;")
_DECL_PATTERNS = (
    (IdentifierKind.Clock, re.compile(r"input\s+logic\s+([A-Za-z_][\w$]*)\s*;")),
    (IdentifierKind.Parameter, re.compile(r"parameter\s+logic\s*\[31:0\]\s*([A-Za-z_][\w$]*)\s*=\s*32'd\d+\s*;")),
    (
        IdentifierKind.FunctionStub,
        re.compile(r"function\s+automatic\s+logic\s*\[31:0\]\s*([A-Za-z_][\w$]*)\s*\((?:[^()]*)\)\s*;\s*return\s+32'd0\s*;\s*endfunction"),
    ),
    (IdentifierKind.Mda, re.compile(r"input\s+logic\s*\[31:0\]\[31:0\]\[31:0\]\s*([A-Za-z_][\w$]*)\s*;")),
    (IdentifierKind.Wire, re.compile(r"input\s+logic\s*\[31:0\]\s*([A-Za-z_][\w$]*)\s*;")),
)
_DIRECTIVE = re.compile(r"(?:([A-Za-z_]\w*)\s*:\s*)?assert\s+property\s*\((.*)\)\s*;", re.DOTALL)


@dataclass
class ModuleShell:
    name: str
    ports: list
    declarations: dict  # name -> IdentifierKind
    property_ast: object


def parse_module_shell(text: str) -> ModuleShell:
    """Read back a wrapper and check its internal consistency.

    Raises WrapError when the header, a declaration or the assertion is
    malformed, a port is undeclared, or the assertion uses an undeclared name.
    """
    body = text.strip()
    m = _HEADER.match(body)
    if not m or not body.endswith("endmodule"):
        raise WrapError("missing module header or endmodule")
    name = m.group(1)
    ports = [p.strip() for p in m.group(2).split(",") if p.strip()]
    rest = body[m.end() : -len("endmodule")].strip()
    decls: dict = {}
    while True:
        for kind, pat in _DECL_PATTERNS:
            dm = pat.match(rest)
            if dm:
                if dm.group(1) in decls:
                    raise WrapError(f"duplicate declaration of {dm.group(1)}")
                decls[dm.group(1)] = kind
                rest = rest[dm.end() :].lstrip()
                break
        else:
            break
    am = _DIRECTIVE.fullmatch(rest)
    if not am:
        raise WrapError(f"expected one assert property statement, found {rest[:60]!r}")
    try:
        ast = parse(am.group(2))
    except SvaError as exc:
        raise WrapError(f"wrapped assertion does not parse: {exc}") from exc
    for p in ports:
        if decls.get(p) not in (IdentifierKind.Clock, IdentifierKind.Mda, IdentifierKind.Wire):
            raise WrapError(f"port {p} lacks an input declaration")
    used = {i.flat for i in free_identifiers(ast)}
    missing = used - set(decls)
    if missing:
        raise WrapError(f"undeclared identifiers {sorted(missing)}")
    return ModuleShell(name, ports, decls, ast)

"""Plain-text exchange formats for programs and certificates.

A program file holds one directive line `min <var>` followed by one line
per constraint: the kind (`le` or `eq`), whitespace-separated `var:coef`
terms, and the right-hand side.  Coefficients and sides are exact
rationals.  Lines starting with `#` are comments; the writer uses them to
record the conventions a consumer needs:

  * rows are `sum coef*var  <=|==  rhs` over free variables,
  * the dual of `min c^T x, A x <= b` is `max -b^T y, A^T y = -c, y >= 0`,
  * an `eq` row expands to two adjacent standard rows, positive first, so
    certificate row indices count the expanded form in file order.

Variable tokens never contain whitespace or colons.  Internal variables
render as `phi`, `w<i>`, and `f<tag>_<fn>_<z>` where the tag part is a
short hash of the branch identity; readers treat every token as opaque.

A certificate file names its kind on the first directive line, then holds
labeled sections: `primal`, `point`, and `ray` entries are keyed by
variable token, `dual` and `farkas` entries by standard row index.
Omitted entries are zero.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .errors import InvalidInputError, LpInternalError
from .lp import (
    Certificate,
    Constraint,
    FnVar,
    Infeasible,
    Lp,
    LpVar,
    Optimal,
    Phi,
    StdLp,
    Tag,
    Unbounded,
    Weight,
    make_constraint,
)
from .values import format_rational, parse_rational

__all__ = [
    "tag_digest",
    "variable_tokens",
    "write_lp",
    "read_lp",
    "write_certificate",
    "read_certificate",
]

_LP_HEADER = (
    "# rows: kind  var:coef ...  rhs   with kind le (<=) or eq (==), x free",
    "# dual convention: for min c^T x with A x <= b the dual is"
    " max -b^T y with A^T y = -c, y >= 0",
    "# eq rows expand to two adjacent standard rows, positive first",
)


def tag_digest(tag: Tag, length: int = 8) -> str:
    """Short stable identifier for a branch tag."""
    items = ",".join(f"{v}:{val}" for v, val in tag.t.items)
    text = f"t={items};a={tag.action};pos={int(tag.pos)}"
    return hashlib.sha256(text.encode("ascii")).hexdigest()[:length]


def _token(v: LpVar, tag_len: int) -> str:
    if isinstance(v, Phi):
        return "phi"
    if isinstance(v, Weight):
        return f"w{v.i}"
    if isinstance(v, FnVar):
        z = "-".join(f"{var}.{val}" for var, val in v.z.items)
        return f"f{tag_digest(v.tag, tag_len)}_{v.fn.kind}{v.fn.idx}_{z}"
    token = str(v)
    if not token or ":" in token or any(ch.isspace() for ch in token):
        raise InvalidInputError(f"variable token {token!r} is not writable")
    return token


def variable_tokens(variables: Sequence[LpVar]) -> dict[LpVar, str]:
    """Map each variable to a unique token, widening the tag hash if two
    distinct tags ever collide at the default width."""
    tags = {v.tag for v in variables if isinstance(v, FnVar)}
    for tag_len in (8, 16, 64):
        if len({tag_digest(t, tag_len) for t in tags}) == len(tags):
            break
    else:
        raise LpInternalError("tag digests collide at full width")
    out: dict[LpVar, str] = {}
    seen: dict[str, LpVar] = {}
    for v in variables:
        tok = _token(v, tag_len)
        if tok in seen and seen[tok] != v:
            raise LpInternalError(f"distinct variables share the token {tok}")
        out[v] = tok
        seen[tok] = v
    return out


def _lp_variables(lp: Lp) -> list[LpVar]:
    ordered: list[LpVar] = [lp.objective]
    known = {lp.objective}
    for con in lp.constraints:
        for v, _ in con.coefs:
            if v not in known:
                known.add(v)
                ordered.append(v)
    return ordered


def write_lp(path: str | Path, lp: Lp) -> None:
    tokens = variable_tokens(_lp_variables(lp))
    lines = list(_LP_HEADER)
    lines.append(f"min {tokens[lp.objective]}")
    for con in lp.constraints:
        terms = " ".join(f"{tokens[v]}:{format_rational(q)}" for v, q in con.coefs)
        if terms:
            lines.append(f"{con.kind} {terms} {format_rational(con.rhs)}")
        else:
            lines.append(f"{con.kind} {format_rational(con.rhs)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _content_lines(path: str | Path) -> list[tuple[int, str]]:
    try:
        raw = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise InvalidInputError(f"{path} is not ascii text: {exc}") from exc
    out = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        text = line.strip()
        if text and not text.startswith("#"):
            out.append((lineno, text))
    return out


def read_lp(path: str | Path) -> Lp:
    """Parse a program file back into constraints over opaque token names."""
    lines = _content_lines(path)
    if not lines or not lines[0][1].startswith("min "):
        raise InvalidInputError(f"{path}: expected a leading 'min <var>' line")
    objective = lines[0][1][4:].strip()
    if not objective or any(ch.isspace() for ch in objective):
        raise InvalidInputError(f"{path}: malformed objective {objective!r}")
    cons: list[Constraint] = []
    for lineno, text in lines[1:]:
        fields = text.split()
        kind = fields[0]
        if kind not in ("le", "eq") or len(fields) < 2:
            raise InvalidInputError(f"{path}:{lineno}: malformed row {text!r}")
        rhs = parse_rational(fields[-1])
        coefs: list[tuple[LpVar, Fraction]] = []
        for term in fields[1:-1]:
            name, sep, coef = term.rpartition(":")
            if not sep or not name:
                raise InvalidInputError(f"{path}:{lineno}: malformed term {term!r}")
            coefs.append((name, parse_rational(coef)))
        cons.append(make_constraint(kind, coefs, rhs))
    return Lp(tuple(cons), objective)


def _write_labeled(lines: list[str], label: str, pairs: Iterable[tuple[str, Fraction]]) -> None:
    lines.append(label)
    for key, q in pairs:
        if q != 0:
            lines.append(f"{key} {format_rational(q)}")


def write_certificate(path: str | Path, std: StdLp, cert: Certificate) -> None:
    tokens = variable_tokens(std.columns)
    cols = [tokens[v] for v in std.columns]
    lines = ["# entries omitted from a section are zero"]
    if isinstance(cert, Optimal):
        lines.append("optimal")
        _write_labeled(lines, "primal", zip(cols, cert.primal))
        _write_labeled(lines, "dual", ((str(i), q) for i, q in enumerate(cert.dual)))
    elif isinstance(cert, Infeasible):
        lines.append("infeasible")
        _write_labeled(lines, "farkas", ((str(i), q) for i, q in enumerate(cert.farkas)))
    elif isinstance(cert, Unbounded):
        lines.append("unbounded")
        _write_labeled(lines, "point", zip(cols, cert.point))
        _write_labeled(lines, "ray", zip(cols, cert.ray))
    else:
        raise InvalidInputError(f"unknown certificate {cert!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _split_sections(path: str | Path, lines: list[tuple[int, str]]) -> dict[str, list]:
    sections: dict[str, list] = {}
    current: list | None = None
    for lineno, text in lines:
        fields = text.split()
        if len(fields) == 1:
            name = fields[0]
            if name in sections:
                raise InvalidInputError(f"{path}:{lineno}: repeated section {name!r}")
            current = sections.setdefault(name, [])
        elif len(fields) == 2 and current is not None:
            current.append((lineno, fields[0], fields[1]))
        else:
            raise InvalidInputError(f"{path}:{lineno}: malformed line {text!r}")
    return sections


def _column_vector(path, std: StdLp, entries, label: str) -> tuple[Fraction, ...]:
    tokens = variable_tokens(std.columns)
    col_of = {tokens[v]: j for j, v in enumerate(std.columns)}
    out = [Fraction(0)] * std.num_cols
    for lineno, key, val in entries:
        if key not in col_of:
            raise InvalidInputError(f"{path}:{lineno}: unknown variable {key!r} in {label}")
        out[col_of[key]] = parse_rational(val)
    return tuple(out)


def _row_vector(path, std: StdLp, entries, label: str) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * std.num_rows
    for lineno, key, val in entries:
        try:
            idx = int(key)
        except ValueError as exc:
            raise InvalidInputError(f"{path}:{lineno}: bad row index {key!r}") from exc
        if not 0 <= idx < std.num_rows:
            raise InvalidInputError(f"{path}:{lineno}: row {idx} outside 0..{std.num_rows - 1}")
        out[idx] = parse_rational(val)
    return tuple(out)


def read_certificate(path: str | Path, std: StdLp) -> Certificate:
    """Parse a certificate file against the standard form it claims to certify."""
    lines = _content_lines(path)
    if not lines:
        raise InvalidInputError(f"{path}: empty certificate")
    kind_line, kind = lines[0]
    if len(kind.split()) != 1:
        raise InvalidInputError(f"{path}:{kind_line}: expected a bare certificate kind")
    sections = _split_sections(path, lines[1:])
    if kind == "optimal":
        if set(sections) != {"primal", "dual"}:
            raise InvalidInputError(f"{path}: optimal needs primal and dual sections")
        return Optimal(
            _column_vector(path, std, sections["primal"], "primal"),
            _row_vector(path, std, sections["dual"], "dual"),
        )
    if kind == "infeasible":
        if set(sections) != {"farkas"}:
            raise InvalidInputError(f"{path}: infeasible needs a farkas section")
        return Infeasible(_row_vector(path, std, sections["farkas"], "farkas"))
    if kind == "unbounded":
        if set(sections) != {"point", "ray"}:
            raise InvalidInputError(f"{path}: unbounded needs point and ray sections")
        return Unbounded(
            _column_vector(path, std, sections["point"], "point"),
            _column_vector(path, std, sections["ray"], "ray"),
        )
    raise InvalidInputError(f"{path}:{kind_line}: unknown certificate kind {kind!r}")

"""Line-oriented text format for built codes.

::

    QCSS 1
    m t prim_poly_hex N M_x seed
    <sorted 0-based indices of W(1)>
    ...
    <sorted 0-based indices of W(M_x)>
    # key=value        (optional trailing lines echoing the build configuration)

H^z is not stored; it is rebuilt from (m, t, prim_poly).
"""

from __future__ import annotations

import os
from pathlib import Path

from . import __version__
from .bch import BchCode
from .css import CssCode, verify_commutativity
from .galois import Field, NonPrimitivePolynomial
from .gf2 import rank_gf2

__all__ = ["CodeFileError", "format_code_file", "parse_code_file", "read_code_file", "validate_code", "write_code_file"]

MAGIC = "QCSS 1"


class CodeFileError(ValueError):
    pass


def format_code_file(css: CssCode, config: dict | None = None) -> str:
    bch = css.bch
    lines = [
        MAGIC,
        f"{bch.m} {bch.t} {bch.field.prim_poly:#x} {bch.N} {css.M_x} {css.seed}",
    ]
    lines.extend(" ".join(str(i) for i in sorted(w)) for w in css.x_checks)
    echo = {"tool": "qcss", "version": __version__, **(config or {})}
    lines.extend(f"# {k}={v}" for k, v in echo.items())
    return "\n".join(lines) + "\n"


def write_code_file(css: CssCode, path: str | os.PathLike, config: dict | None = None) -> Path:
    path = Path(path)
    path.write_text(format_code_file(css, config), encoding="ascii")
    return path


def parse_code_file(text: str) -> tuple[CssCode, dict[str, str]]:
    """Parse a code file; returns the code and the echoed configuration."""
    lines = text.splitlines()
    config: dict[str, str] = {}
    body: list[tuple[int, str]] = []
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].strip().partition("=")
            if sep:
                config[key.strip()] = value.strip()
        elif stripped:
            body.append((lineno, stripped))
    if not body or body[0][1] != MAGIC:
        raise CodeFileError(f"missing '{MAGIC}' header")
    if len(body) < 2:
        raise CodeFileError("missing parameter line")
    fields = body[1][1].split()
    if len(fields) != 6:
        raise CodeFileError(f"line {body[1][0]}: expected 'm t prim_poly_hex N M_x seed'")
    try:
        m, t = int(fields[0]), int(fields[1])
        prim_poly = int(fields[2], 16)
        N, M_x, seed = int(fields[3]), int(fields[4]), int(fields[5])
    except ValueError as exc:
        raise CodeFileError(f"line {body[1][0]}: {exc}") from None
    if not 2 <= m <= 16 or N != (1 << m) - 1:
        raise CodeFileError(f"inconsistent m={m}, N={N}")
    rows = body[2:]
    if len(rows) != M_x:
        raise CodeFileError(f"expected {M_x} check lines, found {len(rows)} (truncated file?)")
    checks = []
    for lineno, line in rows:
        try:
            idx = [int(tok) for tok in line.split()]
        except ValueError:
            raise CodeFileError(f"line {lineno}: non-integer index") from None
        if any(not 0 <= i < N for i in idx):
            raise CodeFileError(f"line {lineno}: index outside 0..{N - 1}")
        if len(set(idx)) != len(idx):
            raise CodeFileError(f"line {lineno}: repeated index")
        checks.append(tuple(sorted(idx)))
    try:
        bch = BchCode(Field(m, prim_poly), t)
    except (NonPrimitivePolynomial, ValueError) as exc:
        raise CodeFileError(str(exc)) from None
    pool_size = int(config.get("pool_size", 0) or 0)
    return CssCode(bch, tuple(checks), seed=seed, pool_size=pool_size), config


def read_code_file(path: str | os.PathLike) -> tuple[CssCode, dict[str, str]]:
    return parse_code_file(Path(path).read_text(encoding="ascii"))


def validate_code(css: CssCode) -> list[str]:
    """Human-readable list of violated invariants; empty when the code is valid."""
    problems: list[str] = []
    n = 2 * css.bch.t + 1
    for a, w in enumerate(css.x_checks):
        if len(w) != n:
            problems.append(f"x-check {a}: degree {len(w)} != 2t+1 = {n}")
    if len(set(css.x_checks)) != css.M_x:
        problems.append("duplicate x-checks")
    ok, bad = verify_commutativity(css)
    if not ok:
        rows = sorted({a_x for _, a_x in bad})
        shown = ", ".join(str(r) for r in rows[:20])
        problems.append(f"commutativity fails for x-check row(s) {shown}" + (" ..." if len(rows) > 20 else ""))
    if css.M_x:
        r = rank_gf2(css.H_x)
        if r != css.M_x:
            problems.append(f"H^x has rank {r} < M_x = {css.M_x}")
    return problems


def degree_summary(css: CssCode) -> str:
    hist = css.degree_histogram()
    return " ".join(f"{d}:{c}" for d, c in sorted(hist.items()))


"""Analytic rate/noise rows: p_z from the z-channel target, plus rates for a given M_x."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .channel import solve_pz_for_target
from .css import rates_from_counts


@dataclass(frozen=True)
class TableRow:
    m: int
    t: int
    N: int
    P_block: float
    p_z: float
    M_z: int
    Q_z: float
    p_x: float | None = None
    M_x: int | None = None
    Q_x: float | None = None
    Q: float | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def table_row(
    m: int,
    t: int,
    P_block: float = 1e-4,
    M_x: int | None = None,
    asymmetry: float | None = None,
) -> TableRow:
    """One row: nominal M_z = t*m, p_z solving the z-channel target.

    ``asymmetry`` is the ratio p_z / p_x; when given, p_x = p_z / asymmetry.
    """
    N = (1 << m) - 1
    M_z = t * m
    p_z = solve_pz_for_target(N, t, P_block)
    p_x = p_z / asymmetry if asymmetry else None
    Q_z = 1 - M_z / N
    if M_x is None:
        return TableRow(m, t, N, P_block, p_z, M_z, Q_z, p_x)
    _, Q_x, Q = rates_from_counts(N, M_z, M_x)
    return TableRow(m, t, N, P_block, p_z, M_z, Q_z, p_x, M_x, Q_x, Q)

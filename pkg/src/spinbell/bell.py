"""CHSH quantities from the exact outcome/analyzer table.

The central object is the 16-entry conditional table P(s1, s2 | sa, sb) over
the two outcome spins given the two analyzer spins. Setting values are spins:
the unprimed settings a and b are +1, the primed a' and b' are -1, and the
Bell combination is

    X = M(a,b) + M(a',b) + M(a,b') - M(a',b')

with M the two-outcome correlator under the given settings. The maximum of
|X| over the four choices of which term carries the minus sign is exposed as
a diagnostic next to the fixed-convention value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, ZeroMeasureConditionError
from .model import ZERO_MEASURE, BoltzmannModel
from ._format import fmt

__all__ = [
    "ConditionalTable",
    "ChshReport",
    "conditional_table",
    "correlator",
    "chsh",
    "quantum_reference",
    "quantum_chsh",
    "QUANTUM_MAX_ANGLES",
]

#: Analyzer angle set (a, a', b, b') at which the cosine reference reaches 2*sqrt(2).
QUANTUM_MAX_ANGLES = (0.0, math.pi / 2, math.pi / 4, -math.pi / 4)

_COLUMN_TOL = 1e-10


def _bit(s: int) -> int:
    if s not in (-1, 1):
        raise InvalidArgumentError(f"spin value must be -1 or +1, got {s!r}")
    return 1 if s == 1 else 0


@dataclass(frozen=True)
class ConditionalTable:
    """P(s1, s2 | sa, sb) as a (2, 2, 2, 2) array.

    Axes are (outcome1, outcome2, analyzer_a, analyzer_b); index 1 = spin +1.
    Every setting column must be a distribution to within 1e-10.
    """

    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.shape != (2, 2, 2, 2):
            raise InvalidArgumentError(f"conditional table has shape {v.shape}, want (2,2,2,2)")
        if np.any(v < -_COLUMN_TOL) or np.any(v > 1.0 + _COLUMN_TOL):
            raise InvalidArgumentError("conditional table entries leave [0, 1]")
        sums = v.sum(axis=(0, 1))
        if np.max(np.abs(sums - 1.0)) > _COLUMN_TOL:
            raise InvalidArgumentError(
                f"conditional table columns deviate from 1 by {np.max(np.abs(sums - 1.0)):.3e}"
            )
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def entry(self, s1: int, s2: int, sa: int, sb: int) -> float:
        """P(s1, s2 | sa, sb), spins in {-1, +1}."""
        return float(self.values[_bit(s1), _bit(s2), _bit(sa), _bit(sb)])

    def column(self, sa: int, sb: int) -> np.ndarray:
        """The (2, 2) outcome distribution under one setting pair."""
        return self.values[:, :, _bit(sa), _bit(sb)]

    def as_dict(self) -> dict[tuple[int, int, int, int], float]:
        spins = (-1, 1)
        return {
            (s1, s2, sa, sb): self.entry(s1, s2, sa, sb)
            for sa in spins
            for sb in spins
            for s1 in spins
            for s2 in spins
        }


def conditional_table(model: BoltzmannModel) -> ConditionalTable:
    """Exact P(s1, s2 | sa, sb) for a model whose lattice carries Bell roles."""
    id1, id2, ida, idb = model.lattice.bell_ids()
    w = model.weight_table([id1, id2, ida, idb])
    mass = w.sum(axis=(0, 1))
    for ia in (0, 1):
        for ib in (0, 1):
            if mass[ia, ib] < ZERO_MEASURE:
                raise ZeroMeasureConditionError(
                    f"setting (sa={'+' if ia else '-'}, sb={'+' if ib else '-'}) "
                    "has zero weight; conditional outcome table undefined"
                )
    return ConditionalTable(w / mass)


def correlator(table: ConditionalTable, sa: int, sb: int) -> float:
    """M(sa, sb) = sum_{s1,s2} s1 s2 P(s1, s2 | sa, sb)."""
    col = table.column(sa, sb)
    return float(col[1, 1] + col[0, 0] - col[1, 0] - col[0, 1])


@dataclass(frozen=True)
class ChshReport:
    """The four setting correlators and their Bell combination.

    m_ab uses settings (+1, +1), m_apb (-1, +1), m_abp (+1, -1),
    m_apbp (-1, -1); x_bi = m_ab + m_apb + m_abp - m_apbp. x_max_abs is the
    maximum |X| over the four placements of the minus sign.
    """

    m_ab: float
    m_apb: float
    m_abp: float
    m_apbp: float
    x_bi: float
    x_max_abs: float
    convention: str = "a=b=+1, a'=b'=-1"

    CSV_FIELDS = ("m_ab", "m_apb", "m_abp", "m_apbp", "x_bi")

    @classmethod
    def csv_header(cls) -> str:
        return ",".join(cls.CSV_FIELDS)

    def csv_row(self, precision: int | None = None) -> str:
        return ",".join(fmt(getattr(self, f), precision) for f in self.CSV_FIELDS)

    def to_text(self, precision: int | None = 6) -> str:
        lines = [
            f"m_ab    = {fmt(self.m_ab, precision)}",
            f"m_apb   = {fmt(self.m_apb, precision)}",
            f"m_abp   = {fmt(self.m_abp, precision)}",
            f"m_apbp  = {fmt(self.m_apbp, precision)}",
            f"x_bi    = {fmt(self.x_bi, precision)}  ({self.convention})",
            f"max |X| over sign choices = {fmt(self.x_max_abs, precision)}",
        ]
        return "\n".join(lines)


def chsh(table: ConditionalTable) -> ChshReport:
    """Bell combination of the four correlators of a conditional table."""
    m_ab = correlator(table, 1, 1)
    m_apb = correlator(table, -1, 1)
    m_abp = correlator(table, 1, -1)
    m_apbp = correlator(table, -1, -1)
    terms = (m_ab, m_apb, m_abp, m_apbp)
    total = sum(terms)
    x_bi = total - 2.0 * m_apbp
    x_max_abs = max(abs(total - 2.0 * t) for t in terms)
    return ChshReport(m_ab, m_apb, m_abp, m_apbp, x_bi, x_max_abs)


def quantum_reference(a: float, b: float) -> float:
    """Reference analyzer-angle correlator cos(a - b)."""
    return math.cos(a - b)


def quantum_chsh(a: float, ap: float, b: float, bp: float) -> float:
    """CHSH combination of the cosine reference at four analyzer angles.

    Reaches 2*sqrt(2) at QUANTUM_MAX_ANGLES.
    """
    return (
        quantum_reference(a, b)
        + quantum_reference(ap, b)
        + quantum_reference(a, bp)
        - quantum_reference(ap, bp)
    )

"""Seeded sampling from exact models and frequency stabilization reports.

Randomness comes from numpy's Philox generator: a counter-based, 64-bit
seedable bit generator whose streams are reproducible across platforms and
cheap to split. The same seed always produces byte-identical sample arrays.

Two samplers:

- exact: inverse-transform sampling of the full configuration distribution
  through the cumulative stabilized weights (no chain, no autocorrelation);
- metropolis: single-spin-flip Metropolis with uniformly chosen sites and
  acceptance min(1, exp(-beta dH)). Defaults: burn-in of 10 * 1024 * N flips
  (ten times 2^10 sweeps), thinning of N flips (one sweep) between kept
  samples; both can be overridden. All site choices and uniforms are drawn
  from the stream up front, so the flip schedule is a pure function of the
  seed.

Samples are configuration words (see model: node i at bit i, bit 1 = +1).
frequency_report tracks a conditional event frequency along checkpoints,
against the exact value, with binomial standard errors.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientPostselectionWarning, InvalidArgumentError
from .lattice import Spin
from .model import BoltzmannModel
from ._format import fmt

__all__ = [
    "SampleRun",
    "sample",
    "FrequencyRow",
    "ConvergenceReport",
    "frequency_report",
    "DEFAULT_CHECKPOINTS",
]

DEFAULT_CHECKPOINTS = (100, 1_000, 10_000, 100_000, 1_000_000)

_KINDS = ("exact", "metropolis")


@dataclass(frozen=True)
class SampleRun:
    """Reproducible sampling request.

    burn_in and thinning are in single-spin flips and only apply to the
    metropolis kind; None picks the defaults (10 * 1024 * N and N).
    """

    seed: int
    n: int
    kind: str = "exact"
    burn_in: int | None = None
    thinning: int | None = None

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidArgumentError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.n < 1:
            raise InvalidArgumentError(f"sample count must be >= 1, got {self.n}")
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"unknown sampler kind {self.kind!r}; choose from {_KINDS}")
        if self.burn_in is not None and self.burn_in < 0:
            raise InvalidArgumentError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.thinning is not None and self.thinning < 1:
            raise InvalidArgumentError(f"thinning must be >= 1, got {self.thinning}")


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _sample_exact(model: BoltzmannModel, rng: np.random.Generator, n: int) -> np.ndarray:
    cum = np.cumsum(model.weights)
    u = rng.random(n) * cum[-1]
    return np.searchsorted(cum, u, side="right").astype(np.int64)


def _neighbor_lists(model: BoltzmannModel):
    lattice = model.lattice
    index = lattice.index
    fields = np.zeros(lattice.n)
    pair: list[list[tuple[int, float]]] = [[] for _ in range(lattice.n)]
    triple: list[list[tuple[int, int, float]]] = [[] for _ in range(lattice.n)]
    for node in lattice.nodes:
        fields[index[node.id]] = node.h
    for e in lattice.edges:
        ia, ib = index[e.a], index[e.b]
        pair[ia].append((ib, e.j))
        pair[ib].append((ia, e.j))
    for t in lattice.cubic:
        ii, ij, ik = (index[x] for x in t.nodes)
        triple[ii].append((ij, ik, t.c))
        triple[ij].append((ii, ik, t.c))
        triple[ik].append((ii, ij, t.c))
    return fields, pair, triple


def _sample_metropolis(
    model: BoltzmannModel, rng: np.random.Generator, run: SampleRun
) -> np.ndarray:
    n_nodes = model.n
    burn = run.burn_in if run.burn_in is not None else 10 * 1024 * n_nodes
    thin = run.thinning if run.thinning is not None else n_nodes
    total = burn + run.n * thin

    fields, pair, triple = _neighbor_lists(model)
    beta = model.lattice.beta
    spins = np.where(rng.integers(0, 2, size=n_nodes) == 1, 1, -1).astype(np.int64)
    word = int(sum(1 << k for k in range(n_nodes) if spins[k] == 1))

    sites = rng.integers(0, n_nodes, size=total)
    accept_u = rng.random(total)

    out = np.empty(run.n, dtype=np.int64)
    kept = 0
    next_keep = burn + thin
    s = spins.tolist()
    for step in range(total):
        i = int(sites[step])
        local = fields[i]
        for nb, j in pair[i]:
            local += j * s[nb]
        dh = 2.0 * s[i] * local
        for nj, nk, c in triple[i]:
            dh -= 2.0 * c * s[i] * s[nj] * s[nk]
        if dh <= 0.0 or accept_u[step] < math.exp(-beta * dh):
            s[i] = -s[i]
            word ^= 1 << i
        if step + 1 == next_keep:
            out[kept] = word
            kept += 1
            next_keep += thin
    return out


def sample(model: BoltzmannModel, run: SampleRun) -> np.ndarray:
    """Configuration words drawn under the run's seed; byte-identical for
    identical (model, run)."""
    rng = _generator(run.seed)
    if run.kind == "exact":
        return _sample_exact(model, rng, run.n)
    return _sample_metropolis(model, rng, run)


@dataclass(frozen=True)
class FrequencyRow:
    n: int
    kept: int
    freq: float
    exact: float
    se: float

    def within(self, multiplier: float) -> bool:
        """Is the estimate inside multiplier * se of the exact value?"""
        if math.isnan(self.freq):
            return False
        return abs(self.freq - self.exact) <= multiplier * self.se


@dataclass(frozen=True)
class ConvergenceReport:
    """Event frequency along sample-count checkpoints vs the exact value."""

    event: tuple[tuple[str, Spin], ...]
    given: tuple[tuple[str, Spin], ...]
    rows: tuple[FrequencyRow, ...]
    exact: float
    run: SampleRun

    CSV_FIELDS = ("n", "freq", "exact", "se")

    @property
    def final(self) -> FrequencyRow:
        return self.rows[-1]

    def csv(self, precision: int | None = None) -> str:
        lines = [",".join(self.CSV_FIELDS)]
        for r in self.rows:
            lines.append(
                f"{r.n},{fmt(r.freq, precision)},{fmt(r.exact, precision)},{fmt(r.se, precision)}"
            )
        return "\n".join(lines)

    def to_text(self, precision: int | None = 6) -> str:
        def pm(s: int) -> str:
            return "+" if s == 1 else "-"

        ev = ",".join(f"{k}:{pm(v)}" for k, v in self.event)
        gv = ",".join(f"{k}:{pm(v)}" for k, v in self.given)
        head = f"P({ev}" + (f" | {gv})" if gv else ")")
        lines = [
            f"{head} exact = {fmt(self.exact, precision)} "
            f"[{self.run.kind}, seed {self.run.seed}]",
            "      n       kept       freq         se",
        ]
        for r in self.rows:
            lines.append(
                f"{r.n:>9d} {r.kept:>9d}  {fmt(r.freq, precision):>12s} {fmt(r.se, precision):>10s}"
            )
        return "\n".join(lines)


def frequency_report(
    model: BoltzmannModel,
    run: SampleRun,
    event: Mapping[str, Spin],
    given: Mapping[str, Spin] | None = None,
    checkpoints: Sequence[int] | None = None,
) -> ConvergenceReport:
    """Track the sampled frequency of P(event | given) along checkpoints.

    Checkpoints default to the powers of ten up to the run length, plus the
    run length itself. Conditioning postselects the sample stream; if a
    checkpoint keeps no samples its row is NaN and an
    InsufficientPostselectionWarning is emitted.
    """
    if not event:
        raise InvalidArgumentError("event must assign at least one node")
    given = dict(given or {})
    overlap = set(event) & set(given)
    if overlap:
        raise InvalidArgumentError(f"event and condition overlap on nodes: {sorted(overlap)}")

    exact = model.conditional(dict(event), given)
    words = sample(model, run)

    emask, epattern = model.event_mask(dict(event))
    if given:
        gmask, gpattern = model.event_mask(given)
        keep = (words & gmask) == gpattern
    else:
        keep = np.ones(words.shape, dtype=bool)
    hit = keep & ((words & emask) == epattern)

    kept_cum = np.cumsum(keep)
    hit_cum = np.cumsum(hit)

    if checkpoints is None:
        marks = [c for c in DEFAULT_CHECKPOINTS if c <= run.n]
    else:
        marks = sorted({int(c) for c in checkpoints if 1 <= int(c) <= run.n})
    if not marks or marks[-1] != run.n:
        marks.append(run.n)

    rows = []
    for c in marks:
        kept = int(kept_cum[c - 1])
        hits = int(hit_cum[c - 1])
        if kept == 0:
            warnings.warn(
                f"no samples pass the condition in the first {c} draws",
                InsufficientPostselectionWarning,
                stacklevel=2,
            )
            rows.append(FrequencyRow(c, 0, math.nan, exact, math.nan))
            continue
        freq = hits / kept
        se = math.sqrt(freq * (1.0 - freq) / kept)
        rows.append(FrequencyRow(c, kept, freq, exact, se))

    return ConvergenceReport(
        event=tuple(sorted(event.items())),
        given=tuple(sorted(given.items())),
        rows=tuple(rows),
        exact=exact,
        run=run,
    )

"""High-temperature closed forms for homogeneous zero-field lattices.

Everything here is an independent analytic route to quantities the
enumeration engine computes numerically; the two routes are kept separate on
purpose and compared in tests. All forms are polynomials in K = tanh(beta J)
with the global factor alpha = cosh(beta J)^(edge count); they are exact for
the specific topologies below, not truncations.

Ladder forms assume the canonical 2x5 ladder (presets.canonical_ladder):
outcome 1 and analyzer a on the left column, outcome 2 and analyzer b on the
right, hidden nodes 3,4,5 along the outcome row and 6,7,8 along the analyzer
row. Chain forms assume the open chain 1-a-3-4-...-N-b-2
(presets.chain_lattice): outcome 1 hangs off analyzer a, outcome 2 off
analyzer b, and the hidden path 3..N connects the analyzers.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import InvalidArgumentError
from .lattice import Lattice
from ._format import fmt

__all__ = [
    "SeriesContext",
    "ladder_joint_numerator",
    "ladder_setting_marginal",
    "ladder_partition_sum",
    "ladder_conditional",
    "ladder_lambda_conditional",
    "ladder_outcome1_factor",
    "ladder_outcome2_factor",
    "ladder_factor_forms",
    "chain_setting_marginal",
    "chain_lambda_conditional",
    "chain_outcome_factors",
    "chain_joint_outcomes",
    "weak_coupling_chsh",
    "chain_md_closed",
    "chain_md_per_config",
    "chain_md_profile",
    "ChainMdRow",
    "profile_csv",
    "DEFAULT_K_GRID",
    "SeriesCheckRow",
    "SeriesCheckReport",
    "series_check",
]

_LADDER_EDGE_COUNT = 13

#: hidden-hidden ladder edges entering the lambda conditional, by node label
_LADDER_HH_EDGES = (("3", "6"), ("3", "4"), ("6", "7"), ("4", "7"), ("4", "5"), ("7", "8"), ("5", "8"))


def _check_spin(*spins: int) -> None:
    for s in spins:
        if s not in (-1, 1):
            raise InvalidArgumentError(f"spin value must be -1 or +1, got {s!r}")


@dataclass(frozen=True)
class SeriesContext:
    """K and the cosh prefactor for one homogeneous zero-field lattice."""

    k: float
    alpha: float
    edge_count: int
    beta: float = 1.0
    j: float = 1.0

    @classmethod
    def build(cls, edge_count: int, j: float = 1.0, beta: float = 1.0) -> "SeriesContext":
        bj = beta * j
        return cls(
            k=math.tanh(bj),
            alpha=math.cosh(bj) ** edge_count,
            edge_count=edge_count,
            beta=beta,
            j=j,
        )

    @classmethod
    def ladder(cls, j: float = 1.0, beta: float = 1.0) -> "SeriesContext":
        return cls.build(_LADDER_EDGE_COUNT, j, beta)

    @classmethod
    def chain(cls, n: int, j: float = 1.0, beta: float = 1.0) -> "SeriesContext":
        if n < 5:
            raise InvalidArgumentError(f"chain forms need n >= 5, got {n}")
        # spins 1, 2, a, b plus hidden 3..n; path has n+1 bonds
        return cls.build(n + 1, j, beta)

    @classmethod
    def from_lattice(cls, lattice: Lattice) -> "SeriesContext":
        """Context for a homogeneous zero-field lattice; refuses anything else."""
        if lattice.cubic or lattice.offset != 0.0:
            raise InvalidArgumentError("closed forms cover pair couplings only")
        for node in lattice.nodes:
            if node.h != 0.0:
                raise InvalidArgumentError(
                    f"closed forms require zero fields; node {node.id!r} has h={node.h}"
                )
        js = {e.j for e in lattice.edges}
        if len(js) != 1:
            raise InvalidArgumentError(f"closed forms require one shared coupling, got {sorted(js)}")
        return cls.build(len(lattice.edges), js.pop(), lattice.beta)


# -- canonical ladder ---------------------------------------------------------


def _ladder_joint_bracket(k: float, s1: int, s2: int, sa: int, sb: int) -> float:
    """Polynomial bracket of the four-spin joint numerator."""
    k3, k4, k5, k6, k7, k8 = k**3, k**4, k**5, k**6, k**7, k**8
    return (
        1.0
        + (k3 + k5 + 2 * k7) * (s1 * sa + s2 * sb)
        + (k4 + 3 * k6) * (s1 * s2 + sa * sb)
        + (k6 + 3 * k8) * (s1 * s2 * sa * sb)
        + (3 * k5 + k7) * (s1 * sb + s2 * sa)
        + 2 * k4
        + k6
    )


def _ladder_setting_bracket(k: float, sa: int, sb: int) -> float:
    k4, k6, k8, k10 = k**4, k**6, k**8, k**10
    return 1.0 + sa * sb * (k4 + 10 * k6 + 5 * k8) + 4 * k4 + 3 * k6 + 5 * k8 + 3 * k10


def ladder_joint_numerator(ctx: SeriesContext, s1: int, s2: int, sa: int, sb: int) -> float:
    """Z * P(s1, s2, sa, sb) on the canonical ladder."""
    _check_spin(s1, s2, sa, sb)
    k = ctx.k
    return (
        ctx.alpha
        * (1.0 + k * s1 * sa)
        * (1.0 + k * s2 * sb)
        * 64.0
        * _ladder_joint_bracket(k, s1, s2, sa, sb)
    )


def ladder_setting_marginal(ctx: SeriesContext, sa: int, sb: int) -> float:
    """Z * P(sa, sb) on the canonical ladder."""
    _check_spin(sa, sb)
    return ctx.alpha * 256.0 * _ladder_setting_bracket(ctx.k, sa, sb)


def ladder_partition_sum(ctx: SeriesContext) -> float:
    """Z of the canonical ladder."""
    k = ctx.k
    return ctx.alpha * 1024.0 * (1.0 + 4 * k**4 + 3 * k**6 + 5 * k**8 + 3 * k**10)


def ladder_conditional(ctx: SeriesContext, s1: int, s2: int, sa: int, sb: int) -> float:
    """P(s1, s2 | sa, sb) on the canonical ladder (ratio of the two forms)."""
    _check_spin(s1, s2, sa, sb)
    k = ctx.k
    num = (1.0 + k * s1 * sa) * (1.0 + k * s2 * sb) * _ladder_joint_bracket(k, s1, s2, sa, sb)
    return num / (4.0 * _ladder_setting_bracket(k, sa, sb))


def ladder_lambda_conditional(ctx: SeriesContext, lam: Sequence[int], sa: int, sb: int) -> float:
    """P(lambda | sa, sb) on the canonical ladder, outcomes summed out.

    lam gives the six hidden spins in label order (s3, s4, s5, s6, s7, s8).
    """
    if len(lam) != 6:
        raise InvalidArgumentError(f"ladder lambda needs 6 spins, got {len(lam)}")
    _check_spin(*lam, sa, sb)
    s = dict(zip(("3", "4", "5", "6", "7", "8"), lam))
    k = ctx.k
    num = (
        (1.0 + k * k * sa * s["3"])
        * (1.0 + k * k * sb * s["5"])
        * (1.0 + k * sa * s["6"])
        * (1.0 + k * s["8"] * sb)
    )
    for a, b in _LADDER_HH_EDGES:
        num *= 1.0 + k * s[a] * s[b]
    return num / (64.0 * _ladder_setting_bracket(k, sa, sb))


def ladder_outcome1_factor(ctx: SeriesContext, s1: int, s3: int, sa: int) -> float:
    """P(s1 | s3, sa): outcome 1 is screened by its two neighbors."""
    _check_spin(s1, s3, sa)
    k = ctx.k
    return (1.0 + k * s1 * sa) * (1.0 + k * s1 * s3) / (2.0 * (1.0 + k * k * sa * s3))


def ladder_outcome2_factor(ctx: SeriesContext, s2: int, s5: int, sb: int) -> float:
    """P(s2 | s5, sb): outcome 2 is screened by its two neighbors."""
    _check_spin(s2, s5, sb)
    k = ctx.k
    return (1.0 + k * s2 * sb) * (1.0 + k * s2 * s5) / (2.0 * (1.0 + k * k * sb * s5))


def ladder_factor_forms(
    ctx: SeriesContext, s1: int, s2: int, s3: int, s5: int, sa: int, sb: int
) -> tuple[float, float, float]:
    """(joint, factor1, factor2) with joint = factor1 * factor2.

    joint is P(s1, s2 | s3, s5, sa, sb): conditioned on the neighboring
    hidden spins the two outcomes decouple into one-sided factors.
    """
    f1 = ladder_outcome1_factor(ctx, s1, s3, sa)
    f2 = ladder_outcome2_factor(ctx, s2, s5, sb)
    return f1 * f2, f1, f2


# -- open chain ---------------------------------------------------------------


def _chain_denominator(ctx: SeriesContext, n: int, sa: int, sb: int) -> float:
    return 1.0 + ctx.k ** (n - 1) * sa * sb


def chain_lambda_conditional(
    n: int, ctx: SeriesContext, lam: Sequence[int], sa: int, sb: int
) -> float:
    """P(lambda | sa, sb) on the 1-a-3-...-n-b-2 chain.

    lam gives the hidden path spins (s3, ..., sn) in order; n >= 5.
    """
    if n < 5:
        raise InvalidArgumentError(f"chain forms need n >= 5, got {n}")
    if len(lam) != n - 2:
        raise InvalidArgumentError(f"chain lambda needs {n - 2} spins, got {len(lam)}")
    _check_spin(*lam, sa, sb)
    k = ctx.k
    num = 1.0 + k * sa * lam[0]
    for left, right in zip(lam, lam[1:]):
        num *= 1.0 + k * left * right
    num *= 1.0 + k * lam[-1] * sb
    return num / (2.0 ** (n - 2) * _chain_denominator(ctx, n, sa, sb))


def chain_setting_marginal(n: int, ctx: SeriesContext, sa: int, sb: int) -> float:
    """Z * P(sa, sb) on the chain: the path between the analyzers telescopes
    to a single K^(n-1) term."""
    if n < 5:
        raise InvalidArgumentError(f"chain forms need n >= 5, got {n}")
    _check_spin(sa, sb)
    return ctx.alpha * 2.0**n * _chain_denominator(ctx, n, sa, sb)


def chain_outcome_factors(
    ctx: SeriesContext, s1: int, s2: int, sa: int, sb: int
) -> tuple[float, float]:
    """One-sided outcome factors (P(s1 | sa), P(s2 | sb)) on the chain.

    Each endpoint outcome is screened by its own analyzer alone, for every
    hidden configuration.
    """
    _check_spin(s1, s2, sa, sb)
    k = ctx.k
    return (1.0 + k * s1 * sa) / 2.0, (1.0 + k * s2 * sb) / 2.0


def chain_joint_outcomes(ctx: SeriesContext, s1: int, s2: int, sa: int, sb: int) -> float:
    """P(s1, s2 | sa, sb, lambda) on the chain: the product of the one-sided
    factors, independent of lambda."""
    f1, f2 = chain_outcome_factors(ctx, s1, s2, sa, sb)
    return f1 * f2


def weak_coupling_chsh(ctx: SeriesContext) -> float:
    """Leading weak-coupling Bell combination of the canonical ladder, -2K^2."""
    return -2.0 * ctx.k * ctx.k


# -- chain measurement dependence, two readings -------------------------------

_SPIN = (-1, 1)
_SETTINGS = tuple((sa, sb) for sa in _SPIN for sb in _SPIN)


def _chain_edge_gap(n: int, k: float, s3: int, sn: int, pair_one, pair_two) -> float:
    """Difference of endpoint-weight ratios between two setting pairs."""
    (sa, sb), (ja, jb) = pair_one, pair_two
    one = (1.0 + k * sa * s3) * (1.0 + k * sn * sb) / (1.0 + k ** (n - 1) * sa * sb)
    two = (1.0 + k * ja * s3) * (1.0 + k * sn * jb) / (1.0 + k ** (n - 1) * ja * jb)
    return one - two


def chain_md_closed(n: int, k: float) -> float:
    """Measurement dependence of the chain, summed reading, closed form.

    sup over setting pairs of sum_lambda |P(lambda|a,b) - P(lambda|a',b')|;
    the interior path spins collapse into the weight
    (1 + s3 sn K^(n-3)) / 4 on the two boundary hidden spins.
    """
    if n < 5:
        raise InvalidArgumentError(f"chain forms need n >= 5, got {n}")
    if not -1.0 < k < 1.0:
        raise InvalidArgumentError(f"k must lie in (-1, 1), got {k}")
    best = 0.0
    for pair_one in _SETTINGS:
        for pair_two in _SETTINGS:
            total = 0.0
            for s3 in _SPIN:
                for sn in _SPIN:
                    w = (1.0 + s3 * sn * k ** (n - 3)) / 4.0
                    total += w * abs(_chain_edge_gap(n, k, s3, sn, pair_one, pair_two))
            best = max(best, total)
    return best


def chain_md_per_config(n: int, k: float) -> float:
    """Measurement dependence of the chain, per-configuration reading.

    sup over setting pairs and single hidden configurations of
    |P(lambda|a,b) - P(lambda|a',b')|; the best interior assignment consistent
    with the boundary parity carries weight (1+K)^(n-3) or (1+K)^(n-4)(1-K)
    over 2^(n-2).
    """
    if n < 5:
        raise InvalidArgumentError(f"chain forms need n >= 5, got {n}")
    if not -1.0 < k < 1.0:
        raise InvalidArgumentError(f"k must lie in (-1, 1), got {k}")
    scale = 2.0 ** (n - 2)
    best = 0.0
    for pair_one in _SETTINGS:
        for pair_two in _SETTINGS:
            for s3 in _SPIN:
                for sn in _SPIN:
                    if s3 * sn == 1:
                        interior = (1.0 + k) ** (n - 3)
                    else:
                        interior = (1.0 + k) ** (n - 4) * (1.0 - k)
                    gap = abs(_chain_edge_gap(n, k, s3, sn, pair_one, pair_two))
                    best = max(best, gap * interior / scale)
    return best


@dataclass(frozen=True)
class ChainMdRow:
    n: int
    md_summed: float
    md_per_config: float


def chain_md_profile(n_values: Iterable[int], k: float) -> list[ChainMdRow]:
    """Both readings of chain measurement dependence across chain lengths.

    The summed reading approaches 2K from above as the chain grows; the
    per-configuration reading decays geometrically to zero. Neither limit is
    asserted here; the rows simply tabulate both so the divergence between
    the readings is visible.
    """
    return [ChainMdRow(int(n), chain_md_closed(int(n), k), chain_md_per_config(int(n), k)) for n in n_values]


def profile_csv(rows: Iterable[ChainMdRow], precision: int | None = None) -> str:
    lines = ["n,md_summed,md_per_config"]
    for r in rows:
        lines.append(f"{r.n},{fmt(r.md_summed, precision)},{fmt(r.md_per_config, precision)}")
    return "\n".join(lines)


# -- closed forms against enumeration ------------------------------------------

DEFAULT_K_GRID = tuple(round(0.1 * i, 1) for i in range(10))


@dataclass(frozen=True)
class SeriesCheckRow:
    name: str
    k: float
    max_rel_dev: float


@dataclass(frozen=True)
class SeriesCheckReport:
    """Max relative deviation of every closed form from enumeration, per K."""

    rows: tuple[SeriesCheckRow, ...]
    chain_n: int

    def by_name(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for r in self.rows:
            out[r.name] = max(out.get(r.name, 0.0), r.max_rel_dev)
        return out

    def overall(self) -> float:
        return max((r.max_rel_dev for r in self.rows), default=0.0)

    def ok(self, tol: float = 1e-9) -> bool:
        return self.overall() <= tol

    def csv(self, precision: int | None = None) -> str:
        lines = ["name,k,max_rel_dev"]
        for r in self.rows:
            lines.append(f"{r.name},{fmt(r.k, 3)},{fmt(r.max_rel_dev, precision)}")
        return "\n".join(lines)

    def to_text(self, precision: int | None = 3) -> str:
        lines = [f"closed forms vs enumeration (chain n = {self.chain_n})"]
        for name, dev in sorted(self.by_name().items()):
            lines.append(f"  {name:28s} max rel dev {fmt(dev, precision)}")
        lines.append(f"  overall max = {fmt(self.overall(), precision)}")
        return "\n".join(lines)


def _rel(a: float, b: float) -> float:
    denom = max(abs(a), abs(b))
    return abs(a - b) / denom if denom > 0.0 else 0.0


def series_check(
    k_values: Sequence[float] = DEFAULT_K_GRID,
    chain_n: int = 8,
    beta: float = 1.0,
) -> SeriesCheckReport:
    """Compare every closed form against exact enumeration over a K grid.

    Each K is realized as a homogeneous coupling j = atanh(K)/beta on the
    canonical ladder and on a chain of length chain_n; every spin-argument
    combination is checked and the worst relative deviation recorded.
    """
    from .model import build_model
    from .presets import canonical_ladder, chain_lattice

    spins = (-1, 1)
    rows: list[SeriesCheckRow] = []
    for k in k_values:
        if not 0.0 <= k < 1.0:
            raise InvalidArgumentError(f"k grid values must lie in [0, 1), got {k}")
        j = math.atanh(k) / beta
        ladder = build_model(canonical_ladder(j=j, beta=beta))
        lctx = SeriesContext.ladder(j=j, beta=beta)
        z = ladder.z

        dev = 0.0
        for s1 in spins:
            for s2 in spins:
                for sa in spins:
                    for sb in spins:
                        exact = z * ladder.marginal({"1": s1, "2": s2, "a": sa, "b": sb})
                        dev = max(dev, _rel(ladder_joint_numerator(lctx, s1, s2, sa, sb), exact))
        rows.append(SeriesCheckRow("joint-numerator", k, dev))

        dev = 0.0
        for sa in spins:
            for sb in spins:
                exact = z * ladder.marginal({"a": sa, "b": sb})
                dev = max(dev, _rel(ladder_setting_marginal(lctx, sa, sb), exact))
        rows.append(SeriesCheckRow("setting-marginal", k, dev))

        dev = 0.0
        for s1 in spins:
            for s2 in spins:
                for sa in spins:
                    for sb in spins:
                        exact = ladder.conditional({"1": s1, "2": s2}, {"a": sa, "b": sb})
                        dev = max(dev, _rel(ladder_conditional(lctx, s1, s2, sa, sb), exact))
        rows.append(SeriesCheckRow("outcome-conditional", k, dev))

        dev = 0.0
        hidden = ("3", "4", "5", "6", "7", "8")
        for flat in range(64):
            lam = tuple(1 if (flat >> (5 - i)) & 1 else -1 for i in range(6))
            lam_cfg = dict(zip(hidden, lam))
            for sa in spins:
                for sb in spins:
                    exact = ladder.conditional(lam_cfg, {"a": sa, "b": sb})
                    dev = max(dev, _rel(ladder_lambda_conditional(lctx, lam, sa, sb), exact))
        rows.append(SeriesCheckRow("lambda-conditional", k, dev))

        dev1 = dev2 = devj = 0.0
        for s1 in spins:
            for s3 in spins:
                for sa in spins:
                    exact = ladder.conditional({"1": s1}, {"3": s3, "a": sa})
                    dev1 = max(dev1, _rel(ladder_outcome1_factor(lctx, s1, s3, sa), exact))
        for s2 in spins:
            for s5 in spins:
                for sb in spins:
                    exact = ladder.conditional({"2": s2}, {"5": s5, "b": sb})
                    dev2 = max(dev2, _rel(ladder_outcome2_factor(lctx, s2, s5, sb), exact))
        for s1 in spins:
            for s2 in spins:
                for s3 in spins:
                    for s5 in spins:
                        for sa in spins:
                            for sb in spins:
                                exact = ladder.conditional(
                                    {"1": s1, "2": s2}, {"3": s3, "5": s5, "a": sa, "b": sb}
                                )
                                joint, _, _ = ladder_factor_forms(lctx, s1, s2, s3, s5, sa, sb)
                                devj = max(devj, _rel(joint, exact))
        rows.append(SeriesCheckRow("outcome1-factor", k, dev1))
        rows.append(SeriesCheckRow("outcome2-factor", k, dev2))
        rows.append(SeriesCheckRow("outcome-factor-joint", k, devj))

        chain = build_model(chain_lattice(chain_n, j=j, beta=beta))
        cctx = SeriesContext.chain(chain_n, j=j, beta=beta)
        zc = chain.z
        hidden_chain = tuple(str(i) for i in range(3, chain_n + 1))
        width = len(hidden_chain)

        dev = 0.0
        for sa in spins:
            for sb in spins:
                exact = zc * chain.marginal({"a": sa, "b": sb})
                dev = max(dev, _rel(chain_setting_marginal(chain_n, cctx, sa, sb), exact))
        rows.append(SeriesCheckRow("chain-setting-marginal", k, dev))

        dev = devf = 0.0
        for flat in range(1 << width):
            lam = tuple(1 if (flat >> (width - 1 - i)) & 1 else -1 for i in range(width))
            lam_cfg = dict(zip(hidden_chain, lam))
            for sa in spins:
                for sb in spins:
                    exact = chain.conditional(lam_cfg, {"a": sa, "b": sb})
                    dev = max(dev, _rel(chain_lambda_conditional(chain_n, cctx, lam, sa, sb), exact))
                    for s1 in spins:
                        for s2 in spins:
                            exact_j = chain.conditional(
                                {"1": s1, "2": s2}, {"a": sa, "b": sb, **lam_cfg}
                            )
                            devf = max(
                                devf, _rel(chain_joint_outcomes(cctx, s1, s2, sa, sb), exact_j)
                            )
        rows.append(SeriesCheckRow("chain-lambda-conditional", k, dev))
        rows.append(SeriesCheckRow("chain-outcome-joint", k, devf))

        dev = 0.0
        for s1 in spins:
            for sa in spins:
                f1, _ = chain_outcome_factors(cctx, s1, 1, sa, 1)
                exact = chain.conditional({"1": s1}, {"a": sa})
                dev = max(dev, _rel(f1, exact))
        for s2 in spins:
            for sb in spins:
                _, f2 = chain_outcome_factors(cctx, 1, s2, 1, sb)
                exact = chain.conditional({"2": s2}, {"b": sb})
                dev = max(dev, _rel(f2, exact))
        rows.append(SeriesCheckRow("chain-outcome-factors", k, dev))

    return SeriesCheckReport(rows=tuple(rows), chain_n=chain_n)

"""Probabilistic linguistic term sets and the expert-opinion RPN pipeline.

Experts grade each risk index (occurrence O, severity S, detection D) on a
symmetric linguistic scale ``s_{-t} .. s_t``.  The head-counts per grade are
turned into a probabilistic linguistic term set (PLT), the three PLTs are
combined by a weighted geometric product on the unit interval, and the
resulting PLT is collapsed to a scalar risk priority number (RPN) by the
probability-weighted mean of its term indices.

Result indices are kept as real numbers ("virtual" terms such as
``s_{-0.59}``); they are never rounded back to integer grades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import (
    ArityError,
    InvalidTallyError,
    InvalidWeightsError,
    OutOfScaleError,
)

MERGE_TOL = 1e-9
_SUM_TOL = 1e-9

Term = Tuple[float, float]


@dataclass(frozen=True)
class LinguisticScale:
    """Symmetric scale ``{s_i | i = -t..t}``; ``half_range`` is ``t``."""

    half_range: int = 2

    def __post_init__(self) -> None:
        t = self.half_range
        if isinstance(t, bool) or not isinstance(t, (int, np.integer)) or t < 1:
            raise OutOfScaleError(f"half_range must be an integer >= 1, got {t!r}")
        object.__setattr__(self, "half_range", int(t))

    @property
    def size(self) -> int:
        return 2 * self.half_range + 1

    @property
    def grades(self) -> range:
        return range(-self.half_range, self.half_range + 1)

    def contains(self, index: float) -> bool:
        return -self.half_range <= index <= self.half_range


@dataclass(frozen=True)
class ExpertTally:
    """Number of experts choosing each grade, lowest grade first."""

    counts: Tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(self.counts)
        for c in counts:
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                raise InvalidTallyError(f"tally counts must be integers, got {c!r}")
            if c < 0:
                raise InvalidTallyError(f"tally counts must be non-negative, got {c}")
        counts = tuple(int(c) for c in counts)
        if sum(counts) < 1:
            raise InvalidTallyError("tally has zero experts")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)


@dataclass(frozen=True)
class RiskIndexWeights:
    """Relative importance of occurrence, severity and detection."""

    w_o: float
    w_s: float
    w_d: float

    def __post_init__(self) -> None:
        _check_weights((self.w_o, self.w_s, self.w_d))

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.w_o, self.w_s, self.w_d)


@dataclass(frozen=True)
class PLT:
    """A probabilistic linguistic term set.

    ``terms`` is a tuple of ``(index, probability)`` pairs sorted by index.
    Use :meth:`build` to construct one from arbitrary pairs; it merges
    near-duplicate indices, drops zero-probability terms and renormalises.
    """

    terms: Tuple[Term, ...]

    def __post_init__(self) -> None:
        terms = tuple((float(i), float(p)) for i, p in self.terms)
        if not terms:
            raise ArityError("a PLT needs at least one term")
        for (i, p) in terms:
            if not (math.isfinite(i) and math.isfinite(p)):
                raise OutOfScaleError(f"non-finite term ({i}, {p})")
            if p <= 0.0 or p > 1.0 + _SUM_TOL:
                raise InvalidTallyError(f"term probability must be in (0, 1], got {p}")
        for (a, _), (b, _) in zip(terms, terms[1:]):
            if b - a <= MERGE_TOL:
                raise OutOfScaleError("PLT indices must be strictly increasing and distinct")
        if abs(math.fsum(p for _, p in terms) - 1.0) > _SUM_TOL:
            raise InvalidTallyError("PLT probabilities must sum to 1")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def build(cls, pairs: Iterable[Term], merge_tol: float = MERGE_TOL) -> "PLT":
        items = [(float(i), float(p)) for i, p in pairs if p > 0.0]
        if not items:
            raise ArityError("a PLT needs at least one term with positive probability")
        items.sort(key=lambda ip: ip[0])
        merged: list = []
        for idx, p in items:
            if merged and idx - merged[-1][0] <= merge_tol:
                merged[-1][1].append(p)
            else:
                merged.append((idx, [p]))
        masses = [math.fsum(ps) for _, ps in merged]
        total = math.fsum(masses)
        return cls(tuple((idx, m / total) for (idx, _), m in zip(merged, masses)))

    @property
    def indices(self) -> Tuple[float, ...]:
        return tuple(i for i, _ in self.terms)

    @property
    def probabilities(self) -> Tuple[float, ...]:
        return tuple(p for _, p in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        body = ", ".join(f"s_{_fmt_index(i)}({p:.4g})" for i, p in self.terms)
        return "{" + body + "}"


def _fmt_index(i: float) -> str:
    if float(i).is_integer():
        return str(int(i))
    return f"{i:.4g}"


def _check_weights(weights: Sequence[float]) -> None:
    for w in weights:
        if not (isinstance(w, (int, float, np.floating)) and math.isfinite(w)):
            raise InvalidWeightsError(f"weight must be a finite number, got {w!r}")
        # A lone factor legitimately carries weight 1.
        if not 0.0 < w <= 1.0:
            raise InvalidWeightsError(f"weights must lie in (0, 1), got {w}")
    if abs(math.fsum(weights) - 1.0) > _SUM_TOL:
        raise InvalidWeightsError(f"weights must sum to 1, got {math.fsum(weights)}")


def tally_to_plt(tally: ExpertTally, scale: LinguisticScale) -> PLT:
    """Collective opinion of ``tally`` as a PLT with probabilities ``count / K``."""
    if len(tally.counts) != scale.size:
        raise InvalidTallyError(
            f"tally has {len(tally.counts)} grades, scale expects {scale.size}"
        )
    k = tally.total
    terms = tuple(
        (float(grade), float(Fraction(count, k)))
        for grade, count in zip(scale.grades, tally.counts)
        if count > 0
    )
    return PLT(terms)


def term_to_unit(index: float, scale: LinguisticScale) -> float:
    """Map a term index in ``[-t, t]`` to the unit interval: ``i/(2t) + 1/2``."""
    if not (math.isfinite(index) and scale.contains(index)):
        raise OutOfScaleError(f"index {index} outside [-{scale.half_range}, {scale.half_range}]")
    return index / (2 * scale.half_range) + 0.5


def unit_to_term(x: float, scale: LinguisticScale) -> float:
    """Inverse of :func:`term_to_unit`: ``(2x - 1) t``."""
    if not (math.isfinite(x) and 0.0 <= x <= 1.0):
        raise OutOfScaleError(f"value {x} outside [0, 1]")
    return (2.0 * x - 1.0) * scale.half_range


def plt_weighted_product(
    factors: Sequence[PLT], weights: Sequence[float], scale: LinguisticScale
) -> PLT:
    """Weighted geometric product of PLTs over the full cross product of terms.

    Each combination of one term per factor yields the index
    ``g^-1(prod g(s_k) ** w_k)`` with probability ``prod p_k``.  A factor term
    at the bottom of the scale has ``g = 0`` and forces the combination to
    ``s_{-t}`` (``0 ** w == 0`` for ``w > 0``).
    """
    if not factors:
        raise ArityError("plt_weighted_product needs at least one factor")
    if len(weights) != len(factors):
        raise ArityError(f"{len(factors)} factors but {len(weights)} weights")
    _check_weights(weights)

    t = scale.half_range
    unit = np.ones(1)
    prob = np.ones(1)
    for plt, w in zip(factors, weights):
        idx = np.asarray(plt.indices, dtype=float)
        if np.any(idx < -t) or np.any(idx > t):
            raise OutOfScaleError(f"factor {plt} has indices outside the scale")
        g = idx / (2 * t) + 0.5
        powered = np.where(g > 0.0, np.power(np.where(g > 0.0, g, 1.0), w), 0.0)
        unit = np.multiply.outer(unit, powered).ravel()
        prob = np.multiply.outer(prob, np.asarray(plt.probabilities)).ravel()

    index = np.clip((2.0 * unit - 1.0) * t, -t, t)
    return PLT.build(zip(index.tolist(), prob.tolist()))


def plt_defuzzify(plt: Union[PLT, Iterable[Term]]) -> float:
    """Scalar value ``sum(k_i * p_i)`` of a PLT.

    Raw ``(index, probability)`` pairs are accepted as given, without
    normalisation, so rounded published term sets can be evaluated verbatim.
    """
    terms = plt.terms if isinstance(plt, PLT) else tuple(plt)
    return math.fsum(float(i) * float(p) for i, p in terms)


def rpn_plt(
    o: ExpertTally,
    s: ExpertTally,
    d: ExpertTally,
    weights: RiskIndexWeights,
    scale: LinguisticScale,
) -> PLT:
    """Aggregated O/S/D opinion as a single PLT (before defuzzification)."""
    factors = [tally_to_plt(x, scale) for x in (o, s, d)]
    return plt_weighted_product(factors, weights.as_tuple(), scale)


def compute_rpn(
    o: ExpertTally,
    s: ExpertTally,
    d: ExpertTally,
    weights: RiskIndexWeights,
    scale: LinguisticScale,
) -> float:
    return plt_defuzzify(rpn_plt(o, s, d, weights, scale))

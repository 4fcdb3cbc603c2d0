"""Exact finite-dimensional probability kernel.

Categorical vectors, column-stochastic conditional tables, two-variable
joints, and the handful of information-theoretic operations everything
else is built from. All values are immutable after construction and all
operations are pure functions, so they are safe to share across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    DimensionMismatch,
    InvalidDistribution,
    NonFiniteInput,
)

# Normalization tolerance for all distribution containers.
NORM_ATOL = 1e-9
# Floor applied to probabilities before logs on the clamping code paths.
LOG_EPS = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.setflags(write=False)
    return out


def _check_nonnegative(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise NonFiniteInput(f"{what} contains non-finite entries")
    if a.size and a.min() < -LOG_EPS:
        raise InvalidDistribution(f"{what} has negative entry {a.min()}")
    # Tolerate exact-arithmetic dust like -1e-17 from upstream subtractions.
    return np.clip(a, 0.0, None)


@dataclass(frozen=True)
class Categorical:
    """Normalized probability vector over a finite index set."""

    probs: np.ndarray

    def __post_init__(self):
        p = _check_nonnegative(np.atleast_1d(np.asarray(self.probs, dtype=np.float64)), "Categorical")
        if p.ndim != 1 or p.size < 1:
            raise InvalidDistribution("Categorical requires a 1-D vector of length >= 1")
        if abs(p.sum() - 1.0) > NORM_ATOL:
            raise InvalidDistribution(f"Categorical sums to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", _freeze(p))

    @property
    def support_size(self) -> int:
        return self.probs.size

    @staticmethod
    def uniform(n: int) -> "Categorical":
        return Categorical(np.full(n, 1.0 / n))

    @staticmethod
    def delta(n: int, index: int) -> "Categorical":
        p = np.zeros(n)
        p[index] = 1.0
        return Categorical(p)

    @staticmethod
    def from_weights(weights: np.ndarray) -> "Categorical":
        """Normalize a vector of nonnegative weights."""
        w = np.asarray(weights, dtype=np.float64)
        total = w.sum()
        if total <= 0:
            raise InvalidDistribution("weights sum to zero")
        return Categorical(w / total)


@dataclass(frozen=True)
class StochasticMatrix:
    """Conditional distribution table; column j is p(row | col=j)."""

    entries: np.ndarray

    def __post_init__(self):
        m = _check_nonnegative(np.asarray(self.entries, dtype=np.float64), "StochasticMatrix")
        if m.ndim != 2:
            raise InvalidDistribution("StochasticMatrix requires a 2-D table")
        sums = m.sum(axis=0)
        worst = np.abs(sums - 1.0).max()
        if worst > NORM_ATOL:
            j = int(np.abs(sums - 1.0).argmax())
            raise InvalidDistribution(f"column {j} sums to {sums[j]!r}, not 1")
        object.__setattr__(self, "entries", _freeze(m))

    @property
    def num_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def num_cols(self) -> int:
        return self.entries.shape[1]

    def column(self, j: int) -> Categorical:
        return Categorical(self.entries[:, j])

    def apply(self, p: Categorical) -> Categorical:
        """Marginalize the conditioning variable: (M @ p) as a Categorical."""
        if p.support_size != self.num_cols:
            raise DimensionMismatch(
                f"matrix conditions on {self.num_cols} values, got vector of {p.support_size}"
            )
        return Categorical(self.entries @ p.probs)


@dataclass(frozen=True)
class Joint2:
    """Joint distribution table over (row variable, column variable)."""

    entries: np.ndarray

    def __post_init__(self):
        m = _check_nonnegative(np.asarray(self.entries, dtype=np.float64), "Joint2")
        if m.ndim != 2:
            raise InvalidDistribution("Joint2 requires a 2-D table")
        if abs(m.sum() - 1.0) > NORM_ATOL:
            raise InvalidDistribution(f"Joint2 total mass is {m.sum()!r}, not 1")
        object.__setattr__(self, "entries", _freeze(m))

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def row_marginal(self) -> Categorical:
        return Categorical(self.entries.sum(axis=1))

    def col_marginal(self) -> Categorical:
        return Categorical(self.entries.sum(axis=0))

    def factorize(self) -> "Factorization":
        return factorize(self)


@dataclass(frozen=True)
class Factorization:
    """Both conditional factorizations of a Joint2.

    Conditionals on a zero-mass index are defined as uniform; the indices
    where that convention fired are recorded so callers can tell exact
    conditionals from placeholder ones. Recomposition is exact either way
    because the placeholder columns get weight zero.
    """

    row_marginal: Categorical
    col_marginal: Categorical
    row_given_col: StochasticMatrix
    col_given_row: StochasticMatrix
    zero_mass_rows: tuple = field(default_factory=tuple)
    zero_mass_cols: tuple = field(default_factory=tuple)


def _conditional(table: np.ndarray, marginal: np.ndarray) -> tuple:
    """Columns of `table` divided by `marginal`, uniform where marginal is 0."""
    rows = table.shape[0]
    zero = np.flatnonzero(marginal == 0.0)
    safe = np.where(marginal == 0.0, 1.0, marginal)
    cond = table / safe[None, :]
    if zero.size:
        cond[:, zero] = 1.0 / rows
    return cond, tuple(int(j) for j in zero)


def factorize(j: Joint2) -> Factorization:
    """Split a joint into both marginals and both conditionals.

    row_given_col[:, c] is the distribution of the row variable given
    column index c; col_given_row[:, r] conditions the other way around.
    """
    row_m = j.entries.sum(axis=1)
    col_m = j.entries.sum(axis=0)
    row_given_col, zero_cols = _conditional(j.entries, col_m)
    col_given_row, zero_rows = _conditional(j.entries.T, row_m)
    return Factorization(
        row_marginal=Categorical(row_m),
        col_marginal=Categorical(col_m),
        row_given_col=StochasticMatrix(row_given_col),
        col_given_row=StochasticMatrix(col_given_row),
        zero_mass_rows=zero_rows,
        zero_mass_cols=zero_cols,
    )


def outer(row: Categorical, col: Categorical) -> Joint2:
    """Independent joint with the given marginals."""
    return Joint2(np.outer(row.probs, col.probs))


def kl_divergence(p: Categorical, q: Categorical) -> float:
    """KL(p || q) = sum_i p_i ln(p_i / q_i), with 0 ln 0 = 0.

    Raises AbsoluteContinuityViolation if p puts mass where q has none.
    """
    if p.support_size != q.support_size:
        raise DimensionMismatch(
            f"support sizes differ: {p.support_size} vs {q.support_size}"
        )
    mask = p.probs > 0.0
    if np.any(q.probs[mask] == 0.0):
        i = int(np.flatnonzero(mask & (q.probs == 0.0))[0])
        raise AbsoluteContinuityViolation(f"p[{i}] > 0 but q[{i}] = 0")
    pm = p.probs[mask]
    return float(np.sum(pm * (np.log(pm) - np.log(q.probs[mask]))))


def entropy(p: Categorical) -> float:
    """Shannon entropy -sum p ln p in nats, with 0 ln 0 = 0."""
    pm = p.probs[p.probs > 0.0]
    return float(-np.sum(pm * np.log(pm)))


def softmax(values: np.ndarray, precision: float = 1.0) -> Categorical:
    """Categorical proportional to exp(precision * values).

    Shift-invariant and computed stably; the argmax of `values` is always
    the argmax of the output.
    """
    v = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("softmax requires finite values")
    if not precision > 0.0:
        raise ValueError(f"precision must be > 0, got {precision}")
    z = precision * v
    e = np.exp(z - z.max())
    return Categorical(e / e.sum())

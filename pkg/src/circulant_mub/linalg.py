"""Structured unitaries on C^d: Fourier, clock/shift pair, circulants.

All named matrices here are built from integer phase exponents (see
phase_ring) and materialized through one shared root table per dimension,
so algebraically equal entries of different matrices are bit-identical
floats.  Conventions:

    omega          = exp(2*i*pi/d)
    fourier F      : F[j,k] = d**-0.5 * omega**(j*k)
    clock U        : diag(1, omega, ..., omega**(d-1))
    shift V        : ones on the superdiagonal, one in the lower-left corner
    circulant(c)   : C[j,k] = c[(j-k) mod d], c the first column
    rotation R     : d**-0.5 * circ(omega**(-k*(k+1)/2))   for odd d
                     d**-0.5 * circ(omega**(-k*k/2))       for even d

The rotation matrix is the workhorse: for odd d it is conjugate to a
diagonal of triangular phases by F, and its powers supply the circulant
members of the mutually unbiased families built in the mub module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phase_ring import (
    PhaseExponent,
    RootTable,
    _check_dimension,
    root_table,
    square_phase,
    triangular_phase,
)

_dense_cap = 512


def set_dense_cap(n: int) -> None:
    """Raise or lower the largest dimension allowed to materialize densely."""
    global _dense_cap
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"dense cap must be a positive integer, got {n!r}")
    _dense_cap = n


def get_dense_cap() -> int:
    return _dense_cap


def _check_cap(d: int) -> None:
    if d > _dense_cap:
        raise ValueError(
            f"dimension {d} exceeds the dense materialization cap {_dense_cap}; "
            "raise it with set_dense_cap if this is intentional"
        )


def default_tolerance(d: int, base: float = 1e-9) -> float:
    """Deviation budget base * sqrt(d): matrix checks accumulate error
    over d-term sums, so the budget grows with the dimension."""
    if base <= 0:
        raise ValueError(f"tolerance base must be positive, got {base}")
    return base * math.sqrt(d)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a numerical predicate: verdict plus the worst deviation."""

    passed: bool
    deviation: float

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True, eq=False)
class DenseUnitary:
    dimension: int
    entries: np.ndarray
    label: str = ""


@dataclass(frozen=True, eq=False)
class CirculantMatrix:
    """Stored by its first column c; the full matrix is C[j,k] = c[(j-k) mod d]."""

    dimension: int
    first_column: np.ndarray
    label: str = ""

    def to_dense(self) -> np.ndarray:
        _check_cap(self.dimension)
        idx = np.arange(self.dimension)
        return self.first_column[(idx[:, None] - idx[None, :]) % self.dimension]


@dataclass(frozen=True, eq=False)
class DiagonalUnitary:
    """Diagonal of exact phases, materialized on demand."""

    dimension: int
    diagonal: tuple[PhaseExponent, ...]

    def values(self) -> np.ndarray:
        table = root_table(self.dimension)
        t = np.array([p.t for p in self.diagonal])
        return table.values[t]

    def to_dense(self) -> np.ndarray:
        _check_cap(self.dimension)
        return np.diag(self.values())

    def power(self, n: int) -> "DiagonalUnitary":
        return DiagonalUnitary(self.dimension, tuple(p.scaled(n) for p in self.diagonal))

    def adjoint(self) -> "DiagonalUnitary":
        return self.power(-1)


def as_matrix(obj) -> np.ndarray:
    """Coerce any of the matrix types (or a raw array) to a dense ndarray."""
    if isinstance(obj, np.ndarray):
        return obj
    if isinstance(obj, DenseUnitary):
        return obj.entries
    if isinstance(obj, (CirculantMatrix, DiagonalUnitary)):
        return obj.to_dense()
    raise TypeError(f"cannot interpret {type(obj).__name__} as a matrix")


def _label(obj) -> str:
    return getattr(obj, "label", "") or type(obj).__name__


def _freeze(entries: np.ndarray) -> np.ndarray:
    entries = np.ascontiguousarray(entries, dtype=np.complex128)
    entries.setflags(write=False)
    return entries


# ---------------------------------------------------------------------------
# builders


def build_fourier(d: int) -> DenseUnitary:
    """F[j,k] = d**-0.5 * omega**(j*k)."""
    _check_dimension(d)
    _check_cap(d)
    table = root_table(d)
    idx = np.arange(d, dtype=np.int64)
    t = (2 * np.outer(idx, idx)) % (2 * d)
    entries = table.values[t] / math.sqrt(d)
    return DenseUnitary(d, _freeze(entries), label="F")


def build_clock(d: int) -> DiagonalUnitary:
    """The clock matrix diag(1, omega, omega**2, ...)."""
    _check_dimension(d)
    if d < 2:
        raise ValueError(f"clock matrix needs dimension >= 2, got {d}")
    return DiagonalUnitary(d, tuple(PhaseExponent(2 * k, 2 * d) for k in range(d)))


def build_shift(d: int) -> CirculantMatrix:
    """The cyclic shift: ones on the superdiagonal, one in the lower-left
    corner; as a circulant its first column is the last standard basis
    vector.  Conjugating by F turns it into the clock matrix."""
    _check_dimension(d)
    if d < 2:
        raise ValueError(f"shift matrix needs dimension >= 2, got {d}")
    column = np.zeros(d, dtype=np.complex128)
    column[d - 1] = 1.0
    return CirculantMatrix(d, _freeze(column), label="V")


def build_triangular_diagonal(d: int) -> DiagonalUnitary:
    """diag(omega**(k*(k+1)/2)) for odd d; the eigenphase pattern of the
    rotation matrix up to one overall unit scalar."""
    _check_dimension(d)
    if d % 2 == 0:
        raise ValueError(f"triangular diagonal requires odd dimension, got {d}")
    return DiagonalUnitary(d, tuple(triangular_phase(k, 1, d) for k in range(d)))


def build_square_diagonal(d: int) -> DiagonalUnitary:
    """diag(omega**(-k*k/2)) for even d."""
    _check_dimension(d)
    if d % 2:
        raise ValueError(f"square diagonal requires even dimension, got {d}")
    return DiagonalUnitary(d, tuple(square_phase(k, d) for k in range(d)))


def _circulant_from_phases(d: int, exponents: list[PhaseExponent]) -> np.ndarray:
    table = root_table(d)
    t = np.array([p.t for p in exponents])
    return table.values[t] / math.sqrt(d)


def build_rotation(d: int) -> CirculantMatrix:
    """R = d**-0.5 * circ(c) with c[k] = omega**(-k*(k+1)/2) for odd d and
    c[k] = omega**(-k*k/2) for even d.  Unitary Hadamard in every dimension."""
    _check_dimension(d)
    if d < 2:
        raise ValueError(f"rotation matrix needs dimension >= 2, got {d}")
    if d % 2:
        exps = [triangular_phase(k, -1, d) for k in range(d)]
    else:
        exps = [square_phase(k, d) for k in range(d)]
    return CirculantMatrix(d, _freeze(_circulant_from_phases(d, exps)), label="R")


def build_phased_fourier(d: int, k: int) -> DenseUnitary:
    """Row-phased Fourier matrix: the j-th row of F times omega**(-k*j*(j+1)/2).

    Equal to (triangular diagonal)**-k followed by F; entry (j, m) is
    d**-0.5 * exp(i*pi*(2*j*m - k*j*(j+1))/d).  Odd d only.
    """
    _check_dimension(d)
    if d % 2 == 0:
        raise ValueError(f"phased Fourier requires odd dimension, got {d}")
    _check_cap(d)
    table = root_table(d)
    j = np.arange(d, dtype=np.int64)
    row_t = (-k * j * (j + 1))[:, None]
    t = (2 * np.outer(j, j) + row_t) % (2 * d)
    entries = table.values[t] / math.sqrt(d)
    return DenseUnitary(d, _freeze(entries), label=f"P_{k}")


def build_index_reversal(d: int) -> DenseUnitary:
    """Permutation fixing index 0 and sending j to d - j; equals F squared."""
    _check_dimension(d)
    _check_cap(d)
    entries = np.zeros((d, d), dtype=np.complex128)
    entries[0, 0] = 1.0
    for j in range(1, d):
        entries[j, d - j] = 1.0
    return DenseUnitary(d, _freeze(entries), label="W")


def rotation_scalar(d: int) -> complex:
    """The unit scalar alpha = d**-0.5 * sum_k omega**(-k*(k+1)/2) relating
    the odd-d rotation matrix to the triangular diagonal: R = alpha F D F*."""
    _check_dimension(d)
    if d % 2 == 0:
        raise ValueError(f"rotation scalar is defined for odd dimension, got {d}")
    table = root_table(d)
    t = np.array([triangular_phase(k, -1, d).t for k in range(d)])
    return complex(table.values[t].sum() / math.sqrt(d))


# ---------------------------------------------------------------------------
# products and powers


def multiply(a, b) -> DenseUnitary:
    ma, mb = as_matrix(a), as_matrix(b)
    if ma.shape != mb.shape or ma.shape[0] != ma.shape[1]:
        raise ValueError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    return DenseUnitary(ma.shape[0], _freeze(ma @ mb), label=f"{_label(a)}*{_label(b)}")


def adjoint(a) -> DenseUnitary:
    ma = as_matrix(a)
    return DenseUnitary(ma.shape[0], _freeze(ma.conj().T), label=f"{_label(a)}+")


def power(a, n: int, tol: float | None = None) -> DenseUnitary:
    """Square-and-multiply power; a negative n means the same power of the
    adjoint and is allowed only after the matrix verifies as unitary."""
    ma = as_matrix(a)
    d = ma.shape[0]
    if n < 0:
        check = is_unitary(ma, tol)
        if not check.passed:
            raise ValueError(
                f"negative power of a non-unitary matrix (deviation {check.deviation:.3e})"
            )
        return power(ma.conj().T, -n, tol)
    result = np.eye(d, dtype=np.complex128)
    base = ma
    m = n
    while m:
        if m & 1:
            result = result @ base
        m >>= 1
        if m:
            base = base @ base
    return DenseUnitary(d, _freeze(result), label=f"{_label(a)}^{n}")


def circulant_multiply(a: CirculantMatrix, b: CirculantMatrix) -> CirculantMatrix:
    """Product of circulants without densifying: the first column of the
    product is the cyclic convolution of the factors' first columns,
    computed here in O(d log d) through the FFT."""
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    column = np.fft.ifft(np.fft.fft(a.first_column) * np.fft.fft(b.first_column))
    return CirculantMatrix(a.dimension, _freeze(column), label=f"{_label(a)}*{_label(b)}")


def circulant_power(c: CirculantMatrix, n: int) -> CirculantMatrix:
    """n-th power of a circulant, n >= 0, as a circulant."""
    if n < 0:
        raise ValueError("circulant_power expects a nonnegative exponent")
    column = np.fft.ifft(np.fft.fft(c.first_column) ** n)
    return CirculantMatrix(c.dimension, _freeze(column), label=f"{_label(c)}^{n}")


def diagonalize_circulant(c: CirculantMatrix) -> np.ndarray:
    """Diagonal of F* C F as a length-d vector.

    Entry l is sum_k c[k] * omega**(-k*l), i.e. sqrt(d) times the
    negated-index normalized DFT of the first column.
    """
    return np.fft.fft(c.first_column)


# ---------------------------------------------------------------------------
# predicates


def is_unitary(m, tol: float | None = None) -> CheckResult:
    """Max-entry deviation of M* M from the identity, against tol."""
    mm = as_matrix(m)
    if mm.ndim != 2 or mm.shape[0] != mm.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mm.shape}")
    d = mm.shape[0]
    if tol is None:
        tol = default_tolerance(d)
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    gram = mm.conj().T @ mm
    deviation = float(np.abs(gram - np.eye(d)).max())
    return CheckResult(deviation <= tol, deviation)


def is_unitary_hadamard(m, tol: float | None = None) -> CheckResult:
    """Unitary with all entry moduli equal to d**-0.5; the deviation is the
    worse of the unitarity defect and the entry-modulus defect."""
    mm = as_matrix(m)
    if mm.ndim != 2 or mm.shape[0] != mm.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {mm.shape}")
    d = mm.shape[0]
    if tol is None:
        tol = default_tolerance(d)
    unitary = is_unitary(mm, tol)
    modulus_dev = float(np.abs(np.abs(mm) - 1.0 / math.sqrt(d)).max())
    deviation = max(unitary.deviation, modulus_dev)
    return CheckResult(deviation <= tol, deviation)


def circulant_deviation(m) -> float:
    """How far a dense matrix is from circulant structure: the largest
    entry difference between M[j,k] and M[(j+1) mod d, (k+1) mod d]."""
    mm = as_matrix(m)
    rolled = np.roll(mm, shift=(1, 1), axis=(0, 1))
    return float(np.abs(mm - rolled).max())

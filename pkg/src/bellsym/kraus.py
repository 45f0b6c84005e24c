"""Operator-sum representations of the two-qubit dephasing channel.

The channel admits a four-operator diagonal Kraus set built from the scalar
attenuation gamma = exp(-t*Gamma/2):

    K1 = diag(-w, 0, 0, w) / sqrt(2)      w = sqrt(1 - gamma^2)
    K2 = diag(0, -w, w, 0) / sqrt(2)
    K3 = diag(a, -a, -a, a) / 2           a = gamma - 1
    K4 = diag(b, b, b, b) / 2             b = gamma + 1

Any other set {E_mu} describes the same channel exactly when E_mu =
sum_j u_{mu j} K_j for a 4x4 unitary (u_{mu j}); this unitary freedom is what
the symmetry analysis sweeps over. The module also extracts Kraus sets from
the channel's Choi matrix and decides channel equality by comparing Choi
matrices.

Choi convention used throughout: C = sum_{ij} |i><j| (x) Phi(|i><j|), with a
channel operator K entering as the 16-vector whose block i (outer index, the
column of K) holds K's column i. Equivalently vec(K) stacks columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import linalg
from .channel import ChannelParams, attenuation_pattern
from .linalg import dagger, validate_density_matrix

__all__ = [
    "CompletePositivityError",
    "KrausFactors",
    "KrausSet",
    "completeness_residual",
    "canonical_kraus",
    "apply_kraus",
    "choi_from_factors",
    "choi_of_channel",
    "choi_of_kraus",
    "kraus_from_choi",
    "mix_kraus",
    "channels_equal",
    "kraus_set_to_dict",
    "kraus_set_from_dict",
]

COMPLETENESS_TOL = 1e-10
KRAUS_SET_SCHEMA = "bellsym/kraus-set/v1"


class CompletePositivityError(ArithmeticError):
    """A matrix that should describe a channel is not completely positive."""


@dataclass(frozen=True)
class KrausFactors:
    """Scalar factors (omega, alpha, beta) of the canonical set at a given gamma."""

    gamma: float
    omega: float
    alpha: float
    beta: float

    @classmethod
    def from_gamma(cls, gamma: float) -> "KrausFactors":
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
        return cls(
            gamma=float(gamma),
            omega=math.sqrt(1.0 - gamma * gamma),
            alpha=gamma - 1.0,
            beta=gamma + 1.0,
        )

    def diagonals(self) -> np.ndarray:
        """Rows hold the diagonals of K1..K4 (shape (4, 4))."""
        w = self.omega / math.sqrt(2.0)
        a = self.alpha / 2.0
        b = self.beta / 2.0
        return np.array([
            [-w, 0.0, 0.0, w],
            [0.0, -w, w, 0.0],
            [a, -a, -a, a],
            [b, b, b, b],
        ], dtype=np.complex128)


def completeness_residual(operators: Sequence[np.ndarray]) -> float:
    """||sum_mu K_mu^dag K_mu - I||_max."""
    ops = [linalg.as_square_matrix(k, "Kraus operator") for k in operators]
    total = sum(dagger(k) @ k for k in ops)
    return linalg.max_abs(total - np.eye(ops[0].shape[0]))


@dataclass(frozen=True, eq=False)
class KrausSet:
    """An ordered list of 4x4 Kraus operators satisfying completeness.

    ``gamma`` records the dephasing parameter of the channel the set
    represents when known (None for sets extracted from an arbitrary Choi
    matrix).
    """

    operators: tuple[np.ndarray, ...]
    label: str = "custom"
    gamma: float | None = None

    def __post_init__(self):
        if len(self.operators) < 1:
            raise ValueError("a Kraus set needs at least one operator")
        ops = []
        for k in self.operators:
            k = linalg.as_square_matrix(k, "Kraus operator")
            if k.shape != (4, 4):
                raise ValueError(f"Kraus operators must be 4x4, got {k.shape}")
            k = k.copy()
            k.setflags(write=False)
            ops.append(k)
        object.__setattr__(self, "operators", tuple(ops))
        residual = completeness_residual(self.operators)
        if residual > COMPLETENESS_TOL:
            raise ValueError(
                "Kraus set violates completeness: residual "
                f"{residual:.3e} > {COMPLETENESS_TOL:g}")

    def __len__(self) -> int:
        return len(self.operators)

    def completeness_residual(self) -> float:
        return completeness_residual(self.operators)


def canonical_kraus(gamma: float) -> KrausSet:
    """The four diagonal Kraus operators of the dephasing channel at ``gamma``."""
    factors = KrausFactors.from_gamma(gamma)
    ops = tuple(np.diag(row) for row in factors.diagonals())
    return KrausSet(operators=ops, label="canonical", gamma=factors.gamma)


def _operators_of(kraus: Union[KrausSet, Sequence[np.ndarray]]):
    if isinstance(kraus, KrausSet):
        return kraus.operators
    return tuple(linalg.as_square_matrix(k, "Kraus operator") for k in kraus)


def apply_kraus(kraus: Union[KrausSet, Sequence[np.ndarray]], rho) -> np.ndarray:
    """sum_mu K_mu rho K_mu^dag for a complete set of operators."""
    ops = _operators_of(kraus)
    residual = completeness_residual(ops)
    if residual > COMPLETENESS_TOL:
        raise ValueError(f"incomplete Kraus set: residual {residual:.3e}")
    rho = validate_density_matrix(rho)
    out = np.zeros_like(rho)
    for k in ops:
        out += k @ rho @ dagger(k)
    return out


def choi_from_factors(gamma_a: float, gamma_b: float) -> np.ndarray:
    """16x16 Choi matrix of the dephasing map with the given factors.

    The map acts entrywise, Phi(|i><j|) = F_ij |i><j| with F the attenuation
    pattern, so the Choi matrix lives on the 4 doubled indices {0, 5, 10, 15}.
    """
    pattern = attenuation_pattern(gamma_a, gamma_b)
    choi = np.zeros((16, 16), dtype=np.complex128)
    diag_idx = [5 * i for i in range(4)]
    for i, ri in enumerate(diag_idx):
        for j, rj in enumerate(diag_idx):
            choi[ri, rj] = pattern[i, j]
    return choi


def choi_of_channel(params: ChannelParams) -> np.ndarray:
    """Choi matrix of the analytic channel at ``params``."""
    return choi_from_factors(params.gamma_a, params.gamma_b)


def _vec(k: np.ndarray) -> np.ndarray:
    # column-stacking: outer index of the 16-vector is the column of k
    return k.T.reshape(16)


def choi_of_kraus(kraus: Union[KrausSet, Sequence[np.ndarray]]) -> np.ndarray:
    """Choi matrix induced by a Kraus set, sum_mu vec(K_mu) vec(K_mu)^dag."""
    ops = _operators_of(kraus)
    choi = np.zeros((16, 16), dtype=np.complex128)
    for k in ops:
        v = _vec(k)
        choi += np.outer(v, v.conj())
    return choi


def kraus_from_choi(
    choi,
    eig_cutoff: float = 1e-12,
    cp_tol: float = 1e-9,
    herm_tol: float = 1e-10,
) -> KrausSet:
    """Extract a Kraus set from a Choi matrix by eigendecomposition.

    Each operator is sqrt(lambda_i) times the 4x4 un-stacking of eigenvector
    v_i (column-stacking convention, matching :func:`choi_of_kraus`).
    Eigenvalues below ``eig_cutoff`` are dropped as numerical noise; an
    eigenvalue below ``-cp_tol`` means the matrix is not completely positive.
    """
    choi = linalg.as_square_matrix(choi, "Choi matrix")
    if choi.shape != (16, 16):
        raise ValueError(f"Choi matrix must be 16x16, got {choi.shape}")
    vals, vecs = linalg.hermitian_eig(choi, herm_tol=herm_tol)
    if vals[-1] < -cp_tol:
        raise CompletePositivityError(
            f"Choi matrix has eigenvalue {vals[-1]:.3e} < -{cp_tol:g}; "
            "the map is not completely positive")
    ops = []
    for lam, v in zip(vals, vecs.T):
        if lam <= eig_cutoff:
            continue
        ops.append(math.sqrt(lam) * v.reshape(4, 4).T)
    return KrausSet(operators=tuple(ops), label="choi-extracted")


def mix_kraus(kraus: KrausSet, mixer, label: str = "mixed") -> KrausSet:
    """Transform a four-operator set by a unitary: E_mu = sum_j u_{mu j} K_j.

    The output describes the same channel as the input; only the
    decomposition changes.
    """
    if len(kraus) != 4:
        raise ValueError(f"mixing requires exactly 4 operators, got {len(kraus)}")
    mixer = linalg.as_square_matrix(mixer, "mixer")
    if mixer.shape != (4, 4) or not linalg.is_unitary(mixer, 1e-10):
        raise ValueError("mixer must be a 4x4 unitary matrix")
    stacked = np.stack(kraus.operators)
    mixed = np.einsum("ij,jkl->ikl", mixer, stacked)
    return KrausSet(operators=tuple(mixed), label=label, gamma=kraus.gamma)


def channels_equal(a: Union[KrausSet, Sequence[np.ndarray]],
                   b: Union[KrausSet, Sequence[np.ndarray]],
                   tol: float) -> bool:
    """True iff the two sets induce the same channel (Choi matrices agree entrywise)."""
    return linalg.allclose_abs(choi_of_kraus(a), choi_of_kraus(b), tol)


def _matrix_to_pairs(k: np.ndarray) -> list[list[float]]:
    flat = np.asarray(k, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _matrix_from_pairs(pairs, dim: int = 4) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    if flat.size != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, got {flat.size}")
    return flat.reshape(dim, dim)


def kraus_set_to_dict(kraus: KrausSet) -> dict:
    """JSON-ready document; operators are row-major lists of [re, im] pairs."""
    return {
        "schema": KRAUS_SET_SCHEMA,
        "label": kraus.label,
        "gamma": kraus.gamma,
        "operators": [_matrix_to_pairs(k) for k in kraus.operators],
    }


def kraus_set_from_dict(doc: dict) -> KrausSet:
    ops = tuple(_matrix_from_pairs(p) for p in doc["operators"])
    gamma = doc.get("gamma")
    return KrausSet(
        operators=ops,
        label=str(doc.get("label", "custom")),
        gamma=None if gamma is None else float(gamma),
    )

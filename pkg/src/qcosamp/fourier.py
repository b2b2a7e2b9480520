"""Mapping between sine-cosine series and cosine-sampling phase parameters."""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError, ValidationError
from .spec import ComponentSpec, Direct, Encoding, Node, QCoSampSpec, Tree, balanced_tree

DISK_RADIUS_SQ = 4.0
# squared radii within this band of 4 count as the boundary circle
BOUNDARY_TOL = 1e-12


def wrap(angle: float | np.ndarray) -> float | np.ndarray:
    """Wrap into ``[-pi, pi)``."""
    return np.remainder(np.asarray(angle) + np.pi, 2 * np.pi) - np.pi


@dataclass(frozen=True)
class FourierSeries:
    lam: tuple[float, ...]
    gamma: tuple[float, ...]

    def __post_init__(self) -> None:
        lam = tuple(float(v) for v in self.lam)
        gamma = tuple(float(v) for v in self.gamma)
        if len(lam) < 2:
            raise ValidationError("series needs lambda_0 and at least one harmonic")
        if len(gamma) == len(lam):
            gamma = gamma[1:]
        if len(gamma) != len(lam) - 1:
            raise ValidationError(f"gamma has {len(gamma)} entries, expected {len(lam) - 1}")
        if not np.all(np.isfinite(lam + gamma)):
            raise ValidationError("series coefficients must be finite")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma", gamma)

    @property
    def order(self) -> int:
        return len(self.lam) - 1

    def __call__(self, x: float | np.ndarray) -> np.ndarray:
        return fourier_eval(self, x)

    @classmethod
    def from_json(cls, doc: dict) -> FourierSeries:
        try:
            return cls(tuple(doc["lambda"]), tuple(doc["gamma"]))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"series document needs 'lambda' and 'gamma' lists ({exc})")

    def to_json(self) -> dict:
        return {"lambda": list(self.lam), "gamma": list(self.gamma)}


def load_series(path: str) -> FourierSeries:
    with open(path) as fh:
        return FourierSeries.from_json(json.load(fh))


def fourier_eval(series: FourierSeries, x: float | np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, series.lam[0])
    for n, (a, b) in enumerate(zip(series.lam[1:], series.gamma), start=1):
        out = out + a * np.cos(n * x) + b * np.sin(n * x)
    return out


@dataclass(frozen=True)
class FcosampParams:
    """Per-component frequency, phases and tree depth."""

    n: tuple[int, ...]
    r: tuple[float, ...]
    s: tuple[float, ...]
    depths: tuple[int, ...]

    def __post_init__(self) -> None:
        k = len(self.n)
        if k == 0 or not len(self.r) == len(self.s) == len(self.depths) == k:
            raise ValidationError("parameter lists must be nonempty and equally long")
        ph = np.asarray(self.r + self.s, dtype=float)
        if np.any(np.abs(ph) > np.pi + 1e-12):
            raise ValidationError("phases must lie in [-pi, pi]")
        if kraft(self.depths) != 1.0:
            raise ValidationError("depths do not describe a full binary tree")

    @property
    def L(self) -> tuple[int, ...]:
        return tuple(4 << d for d in self.depths)

    @classmethod
    def from_spec(cls, spec: QCoSampSpec) -> FcosampParams:
        vals = []
        for c in spec.leaves:
            if not all(isinstance(e, Direct) for e in (c.frequency, c.phase_r, c.phase_s)):
                raise ValidationError("analytic evaluation needs direct component values")
            vals.append((int(c.frequency.value), float(c.phase_r.value), float(c.phase_s.value)))
        n, r, s = zip(*vals)
        return cls(n, r, s, spec.depths)

    def tree(self) -> Tree:
        """Tree with these leaves and depths, built left to right."""
        leaves = [ComponentSpec.direct(*t) for t in zip(self.n, self.r, self.s)]
        if len(set(self.depths)) == 1:
            return balanced_tree(leaves)
        return _tree_from_depths(leaves, self.depths)

    def to_spec(self, argument: Encoding | float = 0.0) -> QCoSampSpec:
        arg = Direct(float(argument)) if isinstance(argument, (int, float)) else argument
        return QCoSampSpec(self.tree(), arg)


def kraft(depths: Sequence[int]) -> float:
    return float(sum(2.0 ** -d for d in depths))


def _tree_from_depths(leaves: Sequence[ComponentSpec], depths: Sequence[int]) -> Tree:
    # pair the two deepest nodes until one remains
    items = list(zip(depths, leaves))
    while len(items) > 1:
        items.sort(key=lambda t: -t[0])
        (d1, a), (d2, b) = items[0], items[1]
        if d1 != d2:
            raise ValidationError("depths do not describe a full binary tree")
        items = [(d1 - 1, Node(a, b))] + items[2:]
    return items[0][1]


def component_values(params: FcosampParams, x: float | np.ndarray) -> np.ndarray:
    """``nu_n(x)`` for every component, shape ``(N,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = []
    for n, r, s, L in zip(params.n, params.r, params.s, params.L):
        out.append((2.0 + np.cos(n * x + r) + np.cos(n * x + s)) / L)
    return np.stack(out)


def fcosamp_eval(params: FcosampParams | QCoSampSpec, x: float | np.ndarray,
                 L: Sequence[int] | None = None) -> np.ndarray:
    """Analytic ``mu_N(x) = sum_n [(1 + cos(nx + r)) + (1 + cos(nx + s))] / L_n``."""
    if isinstance(params, QCoSampSpec):
        params = FcosampParams.from_spec(params)
    if L is not None and tuple(L) != params.L:
        raise ValidationError(f"L {tuple(L)} disagrees with tree depths {params.L}")
    return component_values(params, x).sum(axis=0)


def expansion_eval(params: FcosampParams, x: float | np.ndarray) -> np.ndarray:
    """The same value written as ``1/2 + sum (lam cos nx + gam sin nx) / L``."""
    x = np.asarray(x, dtype=float)
    out = np.full(x.shape, 0.5)
    for n, r, s, L in zip(params.n, params.r, params.s, params.L):
        lam, gam = phases_to_fourier(r, s)
        out = out + (lam * np.cos(n * x) + gam * np.sin(n * x)) / L
    return out


def phases_to_fourier(r: float, s: float) -> tuple[float, float]:
    return float(np.cos(r) + np.cos(s)), float(-np.sin(r) - np.sin(s))


def fourier_to_phases(lam: float, gam: float) -> list[tuple[float, float]]:
    """All phase pairs ``(r, s)`` hitting ``(lam, gam)``.

    ``e^{ir} + e^{is} = lam - i gam``, so the pair is ``arg w +- arccos(|w| / 2)``.
    Interior points have two solutions (the pair and its swap); the boundary
    circle has one; the origin returns the representative ``(0, -pi)``.
    """
    rad2 = lam * lam + gam * gam
    if rad2 > DISK_RADIUS_SQ + BOUNDARY_TOL:
        raise OutOfRangeError(
            f"(lambda, gamma) = ({lam}, {gam}) lies outside the radius-2 disk; "
            f"divide the series by max(1, max_k |(lambda_k, gamma_k)| / 2) first")
    w = complex(lam, -gam)
    if abs(w) == 0.0:
        return [(0.0, -np.pi)]
    alpha = float(np.angle(w))
    # arccos is steep near 1, so rounding in |w| must not split the boundary pair
    if rad2 >= DISK_RADIUS_SQ - BOUNDARY_TOL:
        return [(float(wrap(alpha)),) * 2]
    beta = float(np.arccos(abs(w) / 2))
    a = (float(wrap(alpha + beta)), float(wrap(alpha - beta)))
    return [a, (a[1], a[0])]


@dataclass(frozen=True)
class ReconstructionFactors:
    """``f = lam_0 + sum_n rho_n (nu_n - 1 / (2 M_n))`` with ``rho_n = 4 M_n c``."""

    scale: float
    depths: tuple[int, ...]
    lam0: float = 0.0

    @property
    def rho(self) -> tuple[float, ...]:
        return tuple(4.0 * (1 << d) * self.scale for d in self.depths)

    @property
    def balanced(self) -> bool:
        return len(set(self.depths)) == 1


def clamp_scale(series: FourierSeries) -> float:
    mags = np.hypot(series.lam[1:], series.gamma)
    return float(max(1.0, mags.max() / 2.0))


def series_to_params(series: FourierSeries, depths: Sequence[int] | None = None,
                     branch: int = 0) -> tuple[FcosampParams, ReconstructionFactors]:
    """Pre-scale a series into the reachable disk and solve for phases.

    ``depths`` defaults to a balanced tree, which needs a power-of-two order.
    ``branch`` picks which of the two double-cover solutions is used.
    """
    N = series.order
    if depths is None:
        h = int(np.log2(N))
        if 1 << h != N:
            raise ValidationError(f"balanced tree needs a power-of-two order, got {N}")
        depths = (h,) * N
    depths = tuple(int(d) for d in depths)
    if len(depths) != N:
        raise ValidationError(f"{len(depths)} depths for {N} harmonics")
    c = clamp_scale(series)
    rs, ss = [], []
    for lam, gam in zip(series.lam[1:], series.gamma):
        sols = fourier_to_phases(lam / c, gam / c)
        r, s = sols[min(branch, len(sols) - 1)]
        rs.append(r)
        ss.append(s)
    params = FcosampParams(tuple(range(1, N + 1)), tuple(rs), tuple(ss), depths)
    return params, ReconstructionFactors(c, depths, series.lam[0])


def reconstruct(values: np.ndarray | Sequence, factors: ReconstructionFactors) -> np.ndarray:
    """Series values from ``mu`` (balanced trees) or per-component ``nu`` rows."""
    v = np.asarray(values, dtype=float)
    M = np.array([1 << d for d in factors.depths], dtype=float)
    rho = np.asarray(factors.rho)
    if v.ndim == 2 and v.shape[0] == len(M):
        return factors.lam0 + np.tensordot(rho, v - (1 / (2 * M))[:, None], axes=1)
    if not factors.balanced:
        raise ValidationError("unbalanced trees need per-component values")
    N = len(M)
    return factors.lam0 + 4.0 * N * factors.scale * (v - 0.5)

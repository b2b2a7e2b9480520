"""Assemble, sample and score cosine-sampling experiments."""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .builder import DEFAULT_MAX_QUBITS, assemble
from .errors import NumericalInvariantError, UnsupportedModeError, ValidationError
from .fourier import fcosamp_eval
from .spec import ConstantData, Direct, QCoSampSpec, Steerable, single
from .statevec import Histogram, make_rng, measure_probabilities, sample

INVARIANT_TOL = 1e-9
DEFAULT_GRID_POINTS = 33


def default_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    return np.linspace(-np.pi, np.pi, points)


@dataclass
class SweepResult:
    x_grid: list[float]
    estimated: list[float]
    exact: list[float]
    shots: int
    seed: int | None
    simulated: list[float] = field(default_factory=list)
    histograms: list[Histogram] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if not len(self.x_grid) == len(self.estimated) == len(self.exact):
            raise NumericalInvariantError("sweep columns differ in length")

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("x,estimated,exact\n")
            for row in zip(self.x_grid, self.estimated, self.exact):
                fh.write(",".join(format(v, ".17g") for v in row) + "\n")


@dataclass
class ErrorReport:
    mse: float
    errors: list[float]


def _check(simulated: float, analytic: float, where: str) -> None:
    if abs(simulated - analytic) > INVARIANT_TOL:
        raise NumericalInvariantError(
            f"{where}: circuit probability {simulated:.17g} differs from analytic "
            f"{analytic:.17g} by more than {INVARIANT_TOL}")


def _point(spec: QCoSampSpec, x: float, shots: int, seed, max_qubits: int):
    a = assemble(spec.with_argument(Direct(float(x))), max_qubits=max_qubits)
    state = a.run()
    p0 = float(measure_probabilities(state, [a.layout.measured])[0])
    if shots == 0:
        return p0, p0, None
    h = sample(state, [a.layout.measured], shots, seed)
    return h.probability("0"), p0, h


def sweep(spec: QCoSampSpec, x_grid: Sequence[float] | None = None, shots: int = 0,
          seed: int | None = None, *, workers: int = 1,
          max_qubits: int = DEFAULT_MAX_QUBITS) -> SweepResult:
    """Estimate ``P(0)`` of the measured ancilla at every grid point.

    ``shots = 0`` is exact mode. A constant-data argument is evaluated in one
    circuit: the argument register and the ancilla are measured together and
    each grid value gets its conditional estimate.
    """
    if shots < 0:
        raise ValidationError("shots must be nonnegative")
    if shots > 0 and seed is None:
        raise ValidationError("a seed is required when shots > 0")
    if isinstance(spec.argument, Steerable):
        raise UnsupportedModeError("sweeps need a direct or constant-data argument")
    if isinstance(spec.argument, ConstantData):
        return _constant_sweep(spec, shots, seed, max_qubits)
    grid = default_grid() if x_grid is None else np.asarray(x_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValidationError("grid must be a nonempty list")
    if np.any(np.abs(grid) > np.pi + 1e-12):
        raise ValidationError("grid points must lie in [-pi, pi]")
    seeds = (np.random.SeedSequence(seed).spawn(grid.size) if seed is not None
             else [None] * grid.size)
    jobs = [(spec, float(x), shots, sd, max_qubits) for x, sd in zip(grid, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(lambda j: _point(*j), jobs))
    else:
        rows = [_point(*j) for j in jobs]
    analytic = fcosamp_eval(spec, grid)
    for x, (_, p0, _), ref in zip(grid, rows, analytic):
        _check(p0, float(ref), f"x={x:.17g}")
    return SweepResult([float(x) for x in grid], [r[0] for r in rows],
                       [float(v) for v in analytic], shots, seed,
                       [r[1] for r in rows], [r[2] for r in rows if r[2] is not None])


def _constant_sweep(spec: QCoSampSpec, shots: int, seed: int | None,
                    max_qubits: int) -> SweepResult:
    a = assemble(spec, max_qubits=max_qubits)
    xs = a.layout.registers["x"]
    K = 1 << len(xs)
    grid = spec.argument.padded()
    measured = list(xs) + [a.layout.measured]
    state = a.run()
    joint = measure_probabilities(state, measured).reshape(K, 2)
    # each register value carries weight 1/K, so P(0 | x_k) = K P(k, 0)
    simulated = K * joint[:, 0]
    analytic = fcosamp_eval(spec.with_argument(Direct(0.0)), grid)
    for x, p, ref in zip(grid, simulated, analytic):
        _check(float(p), float(ref), f"x={x:.17g}")
    hists = []
    if shots == 0:
        est = simulated
    else:
        h = sample(state, measured, shots, seed)
        hists.append(h)
        counts = np.zeros((K, 2))
        for key, c in h.counts.items():
            counts[int(key[:-1], 2), int(key[-1])] = c
        tot = counts.sum(axis=1)
        est = np.divide(counts[:, 0], tot, out=np.full(K, np.nan), where=tot > 0)
    return SweepResult([float(v) for v in grid], [float(v) for v in est],
                       [float(v) for v in analytic], shots, seed,
                       [float(v) for v in simulated], hists)


def mse(result: SweepResult) -> ErrorReport:
    est = np.asarray(result.estimated, dtype=float)
    ref = np.asarray(result.exact, dtype=float)
    errs = (est - ref) ** 2
    return ErrorReport(float(errs.mean()), [float(e) for e in errs])


def random_values_trial(trials: int, shots: int, seed: int,
                        max_frequency: int = 4) -> list[ErrorReport]:
    """Random single-component experiments; each trial scores one sampled point."""
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    rng = make_rng(seed)
    children = np.random.SeedSequence(seed).spawn(trials)
    out = []
    for t in range(trials):
        n = int(rng.integers(1, max_frequency + 1))
        x, r, s = rng.uniform(-np.pi, np.pi, 3)
        sd = int(children[t].generate_state(1)[0]) if shots else None
        res = sweep(single(n, r, s), [x], shots, sd)
        out.append(mse(res))
    return out


def quartiles(reports: Sequence[ErrorReport]) -> tuple[float, float, float]:
    q = np.percentile([r.mse for r in reports], [25, 50, 75])
    return float(q[0]), float(q[1]), float(q[2])

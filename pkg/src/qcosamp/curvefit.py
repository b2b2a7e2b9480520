"""Curve fitting by amplitude amplification over a register of candidate phases.

Register order (qubit 0 first):

``[params][data][slot][a1 a2][flag]``

* params: for each component, an ``r`` and an ``s`` register of ``resolution`` qubits
* data: ``log2 K`` qubits indexing the data pairs
* slot: ``log2 N`` component qubits plus one branch bit (0 -> r, 1 -> s)
* a1, a2: comparison ancillae
* flag: dilution qubit used to shape the amplification

Before the ``cX`` stage, the probability of the ancilla pattern ``00`` in a
parameter sector is the quantum similarity measure (QSM) of that candidate.
After ``cX`` a mismatch reads ``a2 = 0`` with twice that probability.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .applications import AmplificationProblem, amplitude_amplify
from .builder import DEFAULT_MAX_QUBITS, atoms, emit_product, emit_sum
from .errors import GuardrailError, ValidationError
from .spec import ConstantData, Steerable, phase_value
from .statevec import (Circuit, Histogram, StateVector, hadamard, measure_probabilities,
                       pattern_phase, pauli_x, phase, sample, simulate)

TIE_TOL = 1e-12


def _log2(k: int, what: str) -> int:
    q = int(k).bit_length() - 1
    if k < 1 or 1 << q != k:
        raise ValidationError(f"{what} must be a power of two, got {k}")
    return q


@dataclass(frozen=True)
class DataSet:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self) -> None:
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y) or not x:
            raise ValidationError("x and y must be nonempty and equally long")
        if not np.all(np.isfinite(x + y)):
            raise ValidationError("data must be finite")
        if min(y) < 0.0 or max(y) > 1.0:
            raise ValidationError("y values must lie in [0, 1]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def count(self) -> int:
        return len(self.x)

    @property
    def y_angles(self) -> np.ndarray:
        """Reference angles ``arccos(2 y - 1)``."""
        return np.arccos(np.clip(2 * np.asarray(self.y) - 1, -1.0, 1.0))

    @classmethod
    def from_csv(cls, path: str) -> DataSet:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        try:
            return cls(tuple(float(r["x"]) for r in rows), tuple(float(r["y"]) for r in rows))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}: data CSV needs numeric 'x,y' columns ({exc})")

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("x,y\n")
            for a, b in zip(self.x, self.y):
                fh.write(f"{a:.17g},{b:.17g}\n")


@dataclass(frozen=True)
class CurveFitModel:
    components: int = 1
    resolution: int = 2
    frequencies: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        _log2(self.components, "component count")
        if self.resolution < 1:
            raise ValidationError("phase resolution needs at least one qubit")
        freqs = self.frequencies or tuple(range(1, self.components + 1))
        if len(freqs) != self.components:
            raise ValidationError("one frequency per component")
        object.__setattr__(self, "frequencies", tuple(int(n) for n in freqs))

    @property
    def phase_grid(self) -> np.ndarray:
        return np.array([phase_value(k, self.resolution) for k in range(1 << self.resolution)])

    @property
    def parameter_qubits(self) -> int:
        return 2 * self.components * self.resolution

    @property
    def candidates(self) -> int:
        return 1 << self.parameter_qubits

    def decode(self, index: int) -> tuple[tuple[float, ...], tuple[float, ...]]:
        """Parameter eigenstate -> per-component ``(r, s)`` phases."""
        q = self.resolution
        fields_ = [(index >> (self.parameter_qubits - q * (j + 1))) & ((1 << q) - 1)
                   for j in range(2 * self.components)]
        r = tuple(phase_value(v, q) for v in fields_[0::2])
        s = tuple(phase_value(v, q) for v in fields_[1::2])
        return r, s

    def encode(self, r: Sequence[int], s: Sequence[int]) -> int:
        """Grid indices -> parameter eigenstate index."""
        out = 0
        for a, b in zip(r, s):
            out = (out << self.resolution) | int(a)
            out = (out << self.resolution) | int(b)
        return out


@dataclass(frozen=True)
class FitLayout:
    params: tuple[int, ...]
    data: tuple[int, ...]
    slot_n: tuple[int, ...]
    branch: int
    a1: int
    a2: int
    flag: int

    @property
    def qubit_count(self) -> int:
        return self.flag + 1


def fit_layout(model: CurveFitModel | None, data_count: int, components: int = 1,
               max_qubits: int = DEFAULT_MAX_QUBITS) -> FitLayout:
    P = model.parameter_qubits if model is not None else 0
    N = model.components if model is not None else components
    D = _log2(data_count, "data count")
    S = _log2(N, "component count")
    total = P + D + S + 4
    if total > max_qubits:
        raise GuardrailError(f"curve-fit register needs {total} qubits "
                             f"(parameters {P}, data {D}), above the {max_qubits}-qubit limit")
    q = iter(range(total))
    take = lambda k: tuple(next(q) for _ in range(k))  # noqa: E731
    return FitLayout(take(P), take(D), take(S), next(q), next(q), next(q), next(q))


def dilution(iterations: int) -> float:
    """Flag probability that maps the worst mismatch onto the first zero of the good branch."""
    return float(min(1.0, 2 * np.sin(np.pi / (2 * (2 * iterations + 1))) ** 2))


def _flag_gates(q: int, kappa: float) -> list:
    alpha = 2 * np.arcsin(np.sqrt(kappa))
    return [hadamard(q), phase(alpha, q), hadamard(q)]


def _comparison_phases(lay: FitLayout, data: DataSet, freqs: Sequence[int],
                       branch_atoms) -> list:
    """Diagonal phases of the four comparison branches on a uniform register."""
    D = len(lay.data)
    if data.count != 1 << D:
        raise ValidationError("data count must be a power of two")
    x_atoms = atoms(ConstantData(data.x, D), lay.data) if D else [(data.x[0], ())]
    yh = data.y_angles
    y_atoms = atoms(ConstantData(tuple(yh), D), lay.data) if D else [(float(yh[0]), ())]
    ops = []
    # -Y on |01>, W on |10>, -1 on |11>
    ops += pattern_phase(((lay.a1, 0), (lay.a2, 1)), np.pi)
    ops += emit_sum(y_atoms, 1.0, ((lay.a1, 0), (lay.a2, 1)))
    ops += pattern_phase(((lay.a1, 1), (lay.a2, 1)), np.pi)
    w_cond = ((lay.a1, 1), (lay.a2, 0))
    for j, n in enumerate(freqs):
        slot = tuple((q, (j >> (len(lay.slot_n) - 1 - i)) & 1) for i, q in enumerate(lay.slot_n))
        ops += emit_product([(float(n), ())], x_atoms, 1.0, w_cond + slot, True)
        for b in (0, 1):
            ops += emit_sum(branch_atoms(j, b), 1.0, w_cond + slot + ((lay.branch, b),))
    return ops


def fit_circuit(model: CurveFitModel, data: DataSet, *, kappa: float = 0.0, compare: bool = True,
                max_qubits: int = DEFAULT_MAX_QUBITS) -> tuple[Circuit, FitLayout]:
    """Initial state preparation over all candidates (``compare`` adds the ``cX``)."""
    lay = fit_layout(model, data.count, max_qubits=max_qubits)
    q = model.resolution

    def branch_atoms(j: int, b: int):
        start = (2 * j + b) * q
        reg = lay.params[start:start + q]
        return atoms(Steerable(q), reg)

    return _build(lay, data, model.frequencies, branch_atoms, kappa, compare), lay


def _build(lay: FitLayout, data: DataSet, freqs, branch_atoms, kappa: float,
           compare: bool) -> Circuit:
    n = lay.qubit_count
    uniform = lay.params + lay.data + lay.slot_n + (lay.branch, lay.a1, lay.a2)
    circ = Circuit(n, [hadamard(i) for i in uniform])
    circ.extend(_comparison_phases(lay, data, freqs, branch_atoms))
    circ.extend([hadamard(lay.a1), hadamard(lay.a2)])
    if compare:
        circ.append(pauli_x(lay.a2, (lay.a1,)))
    if kappa > 0:
        circ.extend(_flag_gates(lay.flag, kappa))
    return circ


def qsm(r: Sequence[float], s: Sequence[float], data: DataSet,
        frequencies: Sequence[int] | None = None) -> float:
    """``sum_k sum_n [f(n x_k + s_n, y_k) + f(n x_k + r_n, y_k)] / (16 * 2N * K)``
    with ``f(a, b) = 2 (1 - cos(a - b))``."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    N = r.size
    freqs = np.arange(1, N + 1) if frequencies is None else np.asarray(frequencies)
    x = np.asarray(data.x)[:, None]
    yh = data.y_angles[:, None]
    f = lambda a: 2 * (1 - np.cos(a - yh))  # noqa: E731
    total = f(freqs * x + r).sum() + f(freqs * x + s).sum()
    return float(total / (16 * 2 * N * data.count))


def qsm_circuit(r: Sequence[float], s: Sequence[float], data: DataSet,
                frequencies: Sequence[int] | None = None) -> float:
    """Exact probability of the ``00`` ancilla pattern for fixed phases."""
    r, s = list(np.atleast_1d(r)), list(np.atleast_1d(s))
    N = len(r)
    freqs = tuple(frequencies) if frequencies is not None else tuple(range(1, N + 1))
    lay = fit_layout(None, data.count, components=N)

    def branch_atoms(j: int, b: int):
        return [(float((r, s)[b][j]), ())]

    circ = _build(lay, data, freqs, branch_atoms, 0.0, compare=False)
    p = measure_probabilities(simulate(circ), [lay.a1, lay.a2])
    return float(p[0])


def qsm_table(model: CurveFitModel, data: DataSet) -> np.ndarray:
    return np.array([qsm(*model.decode(i), data, model.frequencies)
                     for i in range(model.candidates)])


def qsm_argmin(model: CurveFitModel, data: DataSet) -> list[int]:
    """Exhaustive classical oracle: every candidate within ``1e-12`` of the minimum."""
    t = qsm_table(model, data)
    return [int(i) for i in np.flatnonzero(t <= t.min() + TIE_TOL)]


def normalized_qsm(qsm_value: float | np.ndarray) -> np.ndarray:
    """QSM divided by its largest possible value 1/4."""
    return 4 * np.asarray(qsm_value)


def qsm_mse_difference(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``normalized_QSM^2 - MSE`` for the single component ``n = 1, r = s = 0``
    evaluated at one point ``(x, y)`` (broadcast over arrays)."""
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    yh = np.arccos(np.clip(2 * y - 1, -1, 1))
    q = (1 - np.cos(x - yh)) / 8
    mu = (1 + np.cos(x)) / 2
    return normalized_qsm(q) ** 2 - (mu - y) ** 2


def forge_reference(model: CurveFitModel, data: DataSet, iterations: int = 3,
                    max_qubits: int = DEFAULT_MAX_QUBITS) -> tuple[AmplificationProblem, FitLayout]:
    """Sector-wise amplification problem whose desired states drop the marked outcomes.

    A basis state is marked when the comparison reports a mismatch and the
    dilution flag is set; each parameter eigenstate forms its own sector.
    """
    kappa = dilution(iterations) if iterations > 0 else 0.0
    circ, lay = fit_circuit(model, data, kappa=kappa, max_qubits=max_qubits)
    psi = simulate(circ).amplitudes
    S = model.candidates
    phi = psi.reshape(S, -1)
    rest = lay.qubit_count - len(lay.params)
    idx = np.arange(1 << rest)
    bit = lambda q: (idx >> (lay.qubit_count - 1 - q)) & 1  # noqa: E731
    good = ~((bit(lay.a2) == 0) & (bit(lay.flag) == 1))
    return AmplificationProblem.from_mask(phi, good, iterations), lay


@dataclass
class FitResult:
    best_index: int
    best_r: tuple[float, ...]
    best_s: tuple[float, ...]
    qsm: float
    histogram: Histogram
    kept: int
    iterations: int
    tie_set: list[int] = field(default_factory=list)

    def to_json(self, histogram_csv_path: str | None = None) -> dict:
        return {"best": {"r": list(self.best_r), "s": list(self.best_s)},
                "qsm": self.qsm, "histogram_csv_path": histogram_csv_path}

    def histogram_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write("state,count\n")
            for k in sorted(self.histogram.counts):
                fh.write(f"{k},{self.histogram.counts[k]}\n")


def curve_fit(data: DataSet, components: int = 1, resolution: int = 2, iterations: int = 3,
              shots: int = 4096, seed: int = 0, *, frequencies: Sequence[int] | None = None,
              max_qubits: int = DEFAULT_MAX_QUBITS) -> FitResult:
    """Amplify, sample ``shots`` outcomes and keep those without a flagged mismatch.

    The histogram over parameter eigenstates of the kept shots peaks at the
    candidates with the smallest QSM.
    """
    if shots < 1:
        raise ValidationError("curve fitting needs at least one shot")
    model = CurveFitModel(components, resolution, tuple(frequencies) if frequencies else None)
    problem, lay = forge_reference(model, data, iterations, max_qubits)
    psi, _ = amplitude_amplify(problem)
    state = StateVector(lay.qubit_count, psi.reshape(-1))
    measured = list(lay.params) + [lay.a2, lay.flag]
    raw = sample(state, measured, shots, seed)
    P = len(lay.params)
    counts: dict[str, int] = {}
    for key, c in raw.counts.items():
        if key[P:] == "01":  # a2 = 0 and flag = 1
            continue
        counts[key[:P]] = counts.get(key[:P], 0) + c
    kept = sum(counts.values())
    hist = Histogram(kept, counts, seed, tuple(lay.params))
    if kept == 0:
        raise ValidationError("no shot survived post-selection")
    best = int(hist.mode(), 2)
    r, s = model.decode(best)
    return FitResult(best, r, s, qsm(r, s, data, model.frequencies), hist, kept,
                     iterations, qsm_argmin(model, data))


def load_fit_json(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if "best" not in doc or "qsm" not in doc:
        raise ValidationError("fit document needs 'best' and 'qsm'")
    return doc

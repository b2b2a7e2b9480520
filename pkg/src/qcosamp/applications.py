"""Integration, state comparison and amplitude amplification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .builder import DEFAULT_MAX_QUBITS, assemble
from .errors import ValidationError
from .fourier import fcosamp_eval
from .spec import Direct, QCoSampSpec, Steerable, phase_value
from .statevec import (Circuit, StateVector, hadamard, make_rng, measure_probabilities,
                       pauli_x, pauli_z, simulate)


# integration ----------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrationResult:
    probability: float
    integral: float
    grid_mean: float
    points: int


def integration_grid(qubits: int) -> np.ndarray:
    return np.array([phase_value(k, qubits) for k in range(1 << qubits)])


def integrate(spec: QCoSampSpec, *, max_qubits: int = DEFAULT_MAX_QUBITS) -> IntegrationResult:
    """Riemann sum of the sampled function over a uniform grid on ``[-pi, pi)``.

    The argument register is superposed, so the exact probability of reading
    0 is the grid mean of the function; ``integral`` scales it by ``2 pi``.
    """
    arg = spec.argument
    if isinstance(arg, Direct):
        raise ValidationError("integration needs a steerable or constant-data argument register")
    if isinstance(arg, Steerable):
        grid = integration_grid(arg.register_qubits)
        a = assemble(spec, superpose=("x",), max_qubits=max_qubits)
    else:
        grid = arg.padded()
        a = assemble(spec, max_qubits=max_qubits)
    p0 = a.p0()
    mean = float(np.mean(fcosamp_eval(spec.with_argument(Direct(0.0)), grid)))
    return IntegrationResult(p0, 2 * np.pi * p0, mean, grid.size)


# state comparison -------------------------------------------------------------------

def comparison_circuit(w_prep: Circuit, y_prep: Circuit) -> Circuit:
    """Branch construction ``(1|00> - Y|01> + W|10> - 1|11>) / 2``, then ``H H`` and ``cX``.

    The data register occupies qubits ``0..k-1``; ancillae ``c1, c2`` are the
    last two qubits and ``c2`` is measured.
    """
    k = w_prep.qubit_count
    if y_prep.qubit_count != k:
        raise ValidationError(f"preparations act on {k} and {y_prep.qubit_count} qubits")
    c1, c2 = k, k + 1
    n = k + 2
    idle = Circuit(k, [hadamard(q) for q in range(k)])
    circ = Circuit(n, [hadamard(c1), hadamard(c2)])
    circ = circ + idle.controlled(((c1, 0), (c2, 0)), n)
    circ = circ + y_prep.controlled(((c1, 0), (c2, 1)), n)
    circ = circ + w_prep.controlled(((c1, 1), (c2, 0)), n)
    circ = circ + idle.controlled(((c1, 1), (c2, 1)), n)
    circ.extend([pauli_z(c2), hadamard(c1), hadamard(c2), pauli_x(c2, (c1,))])
    return circ


def _ancilla_stage(k: int) -> Circuit:
    c1, c2 = k, k + 1
    return Circuit(k + 2, [hadamard(c1), hadamard(c2), pauli_x(c2, (c1,))])


def branch_state(w: np.ndarray, y: np.ndarray, idle: np.ndarray | None = None) -> StateVector:
    """The four-branch state for given data vectors, ancillae last."""
    w = np.asarray(w, dtype=np.complex128).reshape(-1)
    y = np.asarray(y, dtype=np.complex128).reshape(-1)
    if w.size != y.size or w.size & (w.size - 1):
        raise ValidationError("states must have equal power-of-two dimension")
    if idle is None:
        idle = np.full(w.size, 1 / np.sqrt(w.size), dtype=np.complex128)
    amps = np.stack([idle, -y, w, -idle], axis=1).reshape(-1) / 2
    return StateVector(int(np.log2(w.size)) + 2, amps)


def compare_states(w_prep: Circuit | StateVector | np.ndarray,
                   y_prep: Circuit | StateVector | np.ndarray) -> float:
    """Probability of reading 1 on the measured ancilla: ``1 - |W - Y|^2 / 8``.

    Circuits are embedded as controlled preparations; plain vectors are
    injected as the branch state directly.
    """
    if isinstance(w_prep, Circuit) and isinstance(y_prep, Circuit):
        circ = comparison_circuit(w_prep, y_prep)
        state = simulate(circ)
        k = w_prep.qubit_count
    else:
        w = simulate(w_prep).amplitudes if isinstance(w_prep, Circuit) else _vec(w_prep)
        y = simulate(y_prep).amplitudes if isinstance(y_prep, Circuit) else _vec(y_prep)
        start = branch_state(w, y)
        k = start.qubit_count - 2
        state = simulate(_ancilla_stage(k), start)
    return float(measure_probabilities(state, [k + 1])[1])


def _vec(v: StateVector | np.ndarray) -> np.ndarray:
    return v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=np.complex128)


def comparison_formula(w: np.ndarray, y: np.ndarray) -> float:
    return float(0.75 + np.vdot(w, y).real / 4)


# amplitude amplification ------------------------------------------------------------

def _normalize_rows(a: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=1, keepdims=True)
    return np.divide(a, norms, out=np.zeros_like(a), where=norms > 0)


@dataclass
class AmplificationProblem:
    """Initial and desired states, optionally split into independent sectors.

    ``phi`` has shape ``(sectors, dim)`` and is normalized as a whole; the
    reflections act within each sector. ``omega`` rows are unit vectors (or
    zero for a sector with nothing to find).
    """

    phi: np.ndarray
    omega: np.ndarray
    iterations: int | None = None
    good: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        phi = np.atleast_2d(np.asarray(self.phi, dtype=np.complex128))
        omega = np.atleast_2d(np.asarray(self.omega, dtype=np.complex128))
        if phi.shape != omega.shape:
            raise ValidationError(f"phi {phi.shape} and omega {omega.shape} differ in shape")
        if abs(np.linalg.norm(phi) - 1) > 1e-10:
            raise ValidationError("initial state is not normalized")
        on = np.linalg.norm(omega, axis=1)
        if np.any((np.abs(on - 1) > 1e-10) & (on > 1e-12)):
            raise ValidationError("desired state rows must be unit vectors")
        self.phi, self.omega = phi, omega
        if self.iterations is None:
            self.iterations = optimal_iterations(self.overlap)
        if self.iterations < 0:
            raise ValidationError("iteration count must be nonnegative")

    @classmethod
    def from_mask(cls, phi: np.ndarray, good: np.ndarray,
                  iterations: int | None = None) -> AmplificationProblem:
        """Desired state = normalized projection of ``phi`` onto the good basis states."""
        phi = np.atleast_2d(np.asarray(phi, dtype=np.complex128))
        good = np.broadcast_to(np.asarray(good, dtype=bool), phi.shape)
        return cls(phi, _normalize_rows(np.where(good, phi, 0)), iterations, good)

    @property
    def overlap(self) -> float:
        """Initial success probability ``a``."""
        return success_probability(self.phi, self.omega)

    def reflect_omega(self, psi: np.ndarray) -> np.ndarray:
        c = np.einsum("sd,sd->s", self.omega.conj(), psi)
        return psi - 2 * c[:, None] * self.omega

    def reflect_phi(self, psi: np.ndarray) -> np.ndarray:
        u = _normalize_rows(self.phi)
        c = np.einsum("sd,sd->s", u.conj(), psi)
        return 2 * c[:, None] * u - psi

    def operator(self, which: str, sector: int = 0) -> np.ndarray:
        """Dense reflection matrix of one sector."""
        v = (self.omega if which == "omega" else _normalize_rows(self.phi))[sector]
        P = np.outer(v, v.conj())
        eye = np.eye(v.size)
        return eye - 2 * P if which == "omega" else 2 * P - eye


def success_probability(psi: np.ndarray, omega: np.ndarray) -> float:
    return float(np.sum(np.abs(np.einsum("sd,sd->s", omega.conj(), psi)) ** 2))


def optimal_iterations(a: float) -> int:
    if a <= 0:
        return 0
    theta = np.arcsin(np.sqrt(min(a, 1.0)))
    return max(0, int(round(np.pi / (4 * theta) - 0.5)))


def amplitude_amplify(problem: AmplificationProblem,
                      iterations: int | None = None) -> tuple[np.ndarray, list[float]]:
    """Apply ``U_phi U_omega`` repeatedly; the trace holds the success probability
    before the first and after every iteration."""
    m = problem.iterations if iterations is None else iterations
    psi = problem.phi.copy()
    trace = [success_probability(psi, problem.omega)]
    for _ in range(m):
        psi = problem.reflect_phi(problem.reflect_omega(psi))
        trace.append(success_probability(psi, problem.omega))
    return psi, trace


def grover_prediction(a: float, m: int) -> float:
    return float(np.sin((2 * m + 1) * np.arcsin(np.sqrt(a))) ** 2)


def amplify_unknown(problem: AmplificationProblem, seed: int,
                    max_rounds: int = 16) -> tuple[int, np.ndarray]:
    """Overlap-free schedule: try ``m = 0, 1, 2, 4, ...`` until a measurement hits ``omega``."""
    rng = make_rng(seed)
    m = 0
    for _ in range(max_rounds):
        psi, trace = amplitude_amplify(problem, m)
        if rng.random() < trace[-1]:
            return m, psi
        m = 1 if m == 0 else 2 * m
    return m, psi

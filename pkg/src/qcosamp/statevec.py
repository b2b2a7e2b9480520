"""Dense state-vector simulator.

Basis index convention: qubit 0 is the most significant bit, so the ket
``|q0 q1 ... q_{Q-1}>`` reads left to right as the binary expansion of the
index. Gates act in place on a ``(2,) * Q`` view of the amplitude array.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalInvariantError, RangeError, ValidationError

NORM_TOL = 1e-12


class GateKind(enum.Enum):
    HADAMARD = "H"
    PHASE = "R"
    PAULI_X = "X"
    PAULI_Z = "Z"
    IDENTITY = "I"
    PERMUTATION = "P"


@dataclass(frozen=True)
class GateApplication:
    """One primitive gate, acting only where every control qubit is 1.

    For ``PERMUTATION`` the target is a tuple of qubits (most significant
    first) and ``mapping`` lists ``(src, dst)`` pairs over the local basis of
    those qubits; unlisted local indices are left in place.
    """

    kind: GateKind
    target: int | tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float = 0.0
    mapping: tuple[tuple[int, int], ...] = ()

    @property
    def targets(self) -> tuple[int, ...]:
        return self.target if isinstance(self.target, tuple) else (self.target,)

    def validate(self, qubit_count: int) -> None:
        qs = self.targets + tuple(self.controls)
        for q in qs:
            if not isinstance(q, (int, np.integer)) or not 0 <= q < qubit_count:
                raise RangeError(f"qubit {q} outside register of {qubit_count} qubits")
        if len(set(qs)) != len(qs):
            raise RangeError(f"controls {self.controls} overlap targets {self.targets}")
        if self.kind is GateKind.PHASE and not np.isfinite(self.angle):
            raise ValidationError("phase angle must be finite")
        if self.kind is not GateKind.PERMUTATION and len(self.targets) != 1:
            raise ValidationError(f"{self.kind.name} takes a single target qubit")

    def controlled(self, extra: Iterable[int]) -> GateApplication:
        return GateApplication(self.kind, self.target, tuple(extra) + self.controls,
                               self.angle, self.mapping)

    def inverse(self) -> GateApplication:
        if self.kind is GateKind.PHASE:
            return GateApplication(self.kind, self.target, self.controls, -self.angle)
        if self.kind is GateKind.PERMUTATION:
            inv = tuple((d, s) for s, d in self.mapping)
            return GateApplication(self.kind, self.target, self.controls, 0.0, inv)
        return self


def hadamard(q: int, controls: Sequence[int] = ()) -> GateApplication:
    return GateApplication(GateKind.HADAMARD, q, tuple(controls))


def phase(angle: float, q: int, controls: Sequence[int] = ()) -> GateApplication:
    return GateApplication(GateKind.PHASE, q, tuple(controls), float(angle))


def pauli_x(q: int, controls: Sequence[int] = ()) -> GateApplication:
    return GateApplication(GateKind.PAULI_X, q, tuple(controls))


def pauli_z(q: int, controls: Sequence[int] = ()) -> GateApplication:
    return GateApplication(GateKind.PAULI_Z, q, tuple(controls))


def identity(q: int) -> GateApplication:
    return GateApplication(GateKind.IDENTITY, q)


@dataclass
class StateVector:
    qubit_count: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.qubit_count < 1:
            raise ValidationError("a state needs at least one qubit")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != 1 << self.qubit_count:
            raise ValidationError(
                f"{amps.size} amplitudes do not match {self.qubit_count} qubits")
        self.amplitudes = amps

    def copy(self) -> StateVector:
        return StateVector(self.qubit_count, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def check_norm(self, tol: float = 1e-10) -> None:
        drift = abs(self.norm() - 1.0)
        if drift > tol:
            raise NumericalInvariantError(f"state norm drifted by {drift:.3e}")


def new_basis_state(qubit_count: int, basis_index: int = 0) -> StateVector:
    if qubit_count < 1:
        raise ValidationError("a state needs at least one qubit")
    if not 0 <= basis_index < 1 << qubit_count:
        raise RangeError(f"basis index {basis_index} outside 0..{(1 << qubit_count) - 1}")
    amps = np.zeros(1 << qubit_count, dtype=np.complex128)
    amps[basis_index] = 1.0
    return StateVector(qubit_count, amps)


@dataclass
class Circuit:
    qubit_count: int
    ops: list[GateApplication] = field(default_factory=list)

    def append(self, g: GateApplication) -> Circuit:
        g.validate(self.qubit_count)
        self.ops.append(g)
        return self

    def extend(self, gates: Iterable[GateApplication]) -> Circuit:
        for g in gates:
            self.append(g)
        return self

    def __add__(self, other: Circuit) -> Circuit:
        n = max(self.qubit_count, other.qubit_count)
        return Circuit(n, list(self.ops) + list(other.ops))

    def __len__(self) -> int:
        return len(self.ops)

    def inverse(self) -> Circuit:
        return Circuit(self.qubit_count, [g.inverse() for g in reversed(self.ops)])

    def shifted(self, offset: int, qubit_count: int | None = None) -> Circuit:
        """Relabel every qubit q as q + offset inside a wider register."""
        n = qubit_count if qubit_count is not None else self.qubit_count + offset
        out = Circuit(n)
        for g in self.ops:
            tgt = (tuple(q + offset for q in g.target) if isinstance(g.target, tuple)
                   else g.target + offset)
            out.append(GateApplication(g.kind, tgt, tuple(c + offset for c in g.controls),
                                       g.angle, g.mapping))
        return out

    def controlled(self, conditions: Sequence[tuple[int, int]],
                   qubit_count: int | None = None) -> Circuit:
        """Condition every gate on ``qubit == bit`` for each given pair."""
        out = Circuit(qubit_count if qubit_count is not None else self.qubit_count)
        flips = [pauli_x(q) for q, b in conditions if b == 0]
        ctrl = [q for q, _ in conditions]
        out.extend(flips)
        out.extend(g.controlled(ctrl) for g in self.ops)
        out.extend(flips)
        return out


def _apply_inplace(psi: np.ndarray, n: int, g: GateApplication) -> None:
    kind = g.kind
    if kind is GateKind.IDENTITY:
        return
    if kind is GateKind.PERMUTATION:
        _permute_inplace(psi, n, g)
        return
    t = psi.reshape((2,) * n)
    idx: list = [slice(None)] * n
    for c in g.controls:
        idx[c] = 1
    q = g.target
    idx[q] = 1
    i1 = tuple(idx)
    if kind is GateKind.PHASE:
        t[i1] *= np.exp(1j * g.angle)
    elif kind is GateKind.PAULI_Z:
        t[i1] *= -1.0
    else:
        idx[q] = 0
        i0 = tuple(idx)
        a = t[i0].copy()
        if kind is GateKind.PAULI_X:
            t[i0] = t[i1]
            t[i1] = a
        else:
            b = t[i1].copy()
            s = 1.0 / np.sqrt(2.0)
            t[i0] = (a + b) * s
            t[i1] = (a - b) * s


def _bits(indices: np.ndarray, n: int, qubits: Sequence[int]) -> np.ndarray:
    k = len(qubits)
    local = np.zeros_like(indices)
    for j, q in enumerate(qubits):
        local |= ((indices >> (n - 1 - q)) & 1) << (k - 1 - j)
    return local


def _permute_inplace(psi: np.ndarray, n: int, g: GateApplication) -> None:
    ts = g.targets
    k = len(ts)
    table = np.arange(1 << k)
    for src, dst in g.mapping:
        table[src] = dst
    idx = np.arange(psi.size)
    active = np.ones(psi.size, dtype=bool)
    for c in g.controls:
        active &= ((idx >> (n - 1 - c)) & 1) == 1
    local = _bits(idx, n, ts)
    new_local = table[local]
    dest = idx.copy()
    for j, q in enumerate(ts):
        shift = n - 1 - q
        bit = (new_local >> (k - 1 - j)) & 1
        dest = (dest & ~(1 << shift)) | (bit << shift)
    dest = np.where(active, dest, idx)
    out = np.empty_like(psi)
    out[dest] = psi
    psi[:] = out


def apply(state: StateVector, g: GateApplication) -> StateVector:
    """Return a new state with ``g`` applied; the input is left untouched."""
    g.validate(state.qubit_count)
    out = state.copy()
    _apply_inplace(out.amplitudes, out.qubit_count, g)
    return out


def simulate(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Run a circuit from ``state`` (default ``|0...0>``) and return the result."""
    if state is None:
        state = new_basis_state(circuit.qubit_count, 0)
    if state.qubit_count != circuit.qubit_count:
        raise ValidationError(
            f"circuit on {circuit.qubit_count} qubits given a {state.qubit_count}-qubit state")
    for g in circuit.ops:
        g.validate(circuit.qubit_count)
    out = state.copy()
    for g in _cancel_pairs(circuit.ops):
        _apply_inplace(out.amplitudes, out.qubit_count, g)
    return out


def _cancel_pairs(ops: Sequence[GateApplication]) -> list[GateApplication]:
    """Defer uncontrolled X gates until a later gate touches their qubit.

    Deferred flips on the same qubit cancel, which removes most of the X
    conjugations produced by zero-valued pattern conditions.
    """
    out: list[GateApplication] = []
    pending: dict[int, GateApplication] = {}
    for g in ops:
        if g.kind is GateKind.PAULI_X and not g.controls:
            if pending.pop(g.target, None) is None:
                pending[g.target] = g
            continue
        if g.kind is GateKind.IDENTITY:
            continue
        for q in g.targets + tuple(g.controls):
            if q in pending:
                out.append(pending.pop(q))
        out.append(g)
    out.extend(pending.values())
    return out


def ordering_operator(perm: Mapping[int, int] | Sequence[Sequence[int]],
                      targets: Sequence[int]) -> GateApplication:
    """Build a basis-reordering gate from a partial two-line permutation.

    ``perm`` is either a ``{src: dst}`` mapping or a pair of rows
    ``(sources, destinations)`` of zero-based local basis indices. The amplitude
    at ``src`` moves to ``dst``; indices not listed stay where they are.

    >>> g = ordering_operator(([0, 2, 3], [2, 3, 0]), (0, 1))
    >>> s = simulate(Circuit(2, [g]), StateVector(2, np.array([1, 2, 3, 4]) / np.sqrt(30)))
    >>> np.round(s.amplitudes.real * np.sqrt(30)).astype(int).tolist()
    [4, 2, 1, 3]
    """
    if isinstance(perm, Mapping):
        pairs = [(int(s), int(d)) for s, d in perm.items()]
    else:
        rows = list(perm)
        if len(rows) != 2 or len(rows[0]) != len(rows[1]):
            raise ValidationError("two-line permutation needs two rows of equal length")
        pairs = [(int(s), int(d)) for s, d in zip(rows[0], rows[1])]
    targets = tuple(int(q) for q in targets)
    size = 1 << len(targets)
    srcs = [s for s, _ in pairs]
    dsts = [d for _, d in pairs]
    if any(not 0 <= v < size for v in srcs + dsts):
        raise RangeError(f"permutation entries must lie in 0..{size - 1}")
    if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts) or set(srcs) != set(dsts):
        raise ValidationError("partial permutation is not a bijection on its listed indices")
    return GateApplication(GateKind.PERMUTATION, targets, (), 0.0,
                           tuple(p for p in pairs if p[0] != p[1]))


def pattern_phase(conditions: Sequence[tuple[int, int]], angle: float) -> list[GateApplication]:
    """Multiply every amplitude with ``qubit == bit`` for all conditions by ``e^{i angle}``.

    Zero-valued conditions are turned into one-valued ones by an X ordering
    applied before and after the multi-controlled phase.
    """
    angle = float(angle)
    if abs(np.remainder(angle + np.pi, 2 * np.pi) - np.pi) < 1e-15:
        return []
    if not conditions:
        # global phase: R on |1>, then R on |0> via X conjugation
        return [phase(angle, 0), pauli_x(0), phase(angle, 0), pauli_x(0)]
    seen: dict[int, int] = {}
    for q, b in conditions:
        if seen.setdefault(q, b) != b:
            return []
    qs = list(seen)
    flips = [pauli_x(q) for q in qs if seen[q] == 0]
    return flips + [phase(angle, qs[-1], qs[:-1])] + flips


def twice_permuted_controlled(state_qubits: int, target_coords: Sequence[int],
                              values: Sequence[complex],
                              qubits: Sequence[int] | None = None) -> Circuit:
    """Multiply the listed basis coordinates by unit-modulus values.

    Each coordinate is moved onto ``|1...1>`` by an X ordering, hit by a phase
    gate controlled on the other ``state_qubits - 1`` qubits, and moved back by
    the same ordering. ``qubits`` embeds the register into a wider circuit.
    """
    if qubits is None:
        qubits = tuple(range(state_qubits))
    qubits = tuple(qubits)
    if len(qubits) != state_qubits:
        raise ValidationError("qubits must list exactly state_qubits entries")
    coords = [int(c) for c in target_coords]
    vals = np.asarray(values, dtype=np.complex128).reshape(-1)
    if len(coords) != vals.size:
        raise ValidationError("target_coords and values differ in length")
    if len(coords) > 1 << max(state_qubits - 1, 0):
        raise ValidationError(f"at most {1 << (state_qubits - 1)} coordinates per block")
    if len(set(coords)) != len(coords):
        raise ValidationError("target coordinates must be distinct")
    if np.any(np.abs(np.abs(vals) - 1.0) > 1e-12):
        raise ValidationError("values must have unit modulus")
    size = 1 << state_qubits
    circ = Circuit(max(qubits) + 1 if qubits else 1)
    for c, v in zip(coords, vals):
        if not 0 <= c < size:
            raise RangeError(f"coordinate {c} outside 0..{size - 1}")
        bits = [(q, (c >> (state_qubits - 1 - j)) & 1) for j, q in enumerate(qubits)]
        circ.extend(pattern_phase(bits, float(np.angle(v))))
    return circ


def qft_phase_encode(register_value: int, register_qubits: int) -> StateVector:
    """Distributed phase encoding: eigenstate k carries ``e^{2 pi i value k / 2^Q}``.

    Qubit j (0 = most significant) is put into ``|0> + e^{2 pi i value / 2^{j+1}}|1>``.
    """
    if register_qubits < 1:
        raise ValidationError("need at least one qubit")
    if not 0 <= register_value < 1 << register_qubits:
        raise RangeError(f"value {register_value} does not fit in {register_qubits} qubits")
    circ = Circuit(register_qubits)
    for j in range(register_qubits):
        circ.append(hadamard(j))
        circ.append(phase(2 * np.pi * register_value / 2 ** (j + 1), j))
    return simulate(circ)


def measure_probabilities(state: StateVector, measured_qubits: Sequence[int]) -> np.ndarray:
    """Outcome distribution over ``2^m`` outcomes; outcome bits follow the given order."""
    measured = [int(q) for q in measured_qubits]
    if not measured:
        raise ValidationError("measured qubit set is empty")
    n = state.qubit_count
    if any(not 0 <= q < n for q in measured) or len(set(measured)) != len(measured):
        raise RangeError(f"measured qubits {measured} invalid for {n} qubits")
    p = state.probabilities().reshape((2,) * n)
    rest = tuple(q for q in range(n) if q not in measured)
    marg = p.sum(axis=rest) if rest else p
    kept = sorted(measured)
    marg = np.transpose(marg, [kept.index(q) for q in measured])
    return marg.reshape(-1)


@dataclass
class Histogram:
    shots: int
    counts: dict[str, int]
    seed: int
    qubits: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if sum(self.counts.values()) != self.shots:
            raise NumericalInvariantError("histogram counts do not sum to shots")

    def probability(self, outcome: str | int) -> float:
        if isinstance(outcome, (int, np.integer)):
            outcome = format(int(outcome), f"0{len(self.qubits)}b")
        return self.counts.get(outcome, 0) / self.shots

    def mode(self) -> str:
        return max(sorted(self.counts), key=lambda k: self.counts[k])


def make_rng(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """Counter-based Philox generator; reproducible across platforms."""
    return np.random.Generator(np.random.Philox(seed))


def sample(state: StateVector, measured_qubits: Sequence[int], shots: int,
           seed: int | np.random.SeedSequence) -> Histogram:
    """Draw ``shots`` i.i.d. measurement outcomes of ``measured_qubits``."""
    if shots < 1:
        raise ValidationError("shots must be at least 1 (use exact probabilities otherwise)")
    probs = measure_probabilities(state, measured_qubits)
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    counts = make_rng(seed).multinomial(shots, probs)
    m = len(measured_qubits)
    hist = {format(i, f"0{m}b"): int(c) for i, c in enumerate(counts) if c}
    seed_int = seed if isinstance(seed, (int, np.integer)) else int(seed.entropy)
    return Histogram(shots, hist, int(seed_int), tuple(measured_qubits))


def sandwich_probabilities(angle: float) -> tuple[float, float]:
    """Outcome probabilities of ``H R_angle H |0>``."""
    circ = Circuit(1, [hadamard(0), phase(angle, 0), hadamard(0)])
    p = simulate(circ).probabilities()
    return float(p[0]), float(p[1])


def hadamard_test(angle: float, aux: StateVector | None = None,
                  eigen_coords: Sequence[int] | None = None) -> tuple[float, float]:
    """Phase kickback onto an ancilla prepared in ``|1>``.

    ``U`` multiplies the ``eigen_coords`` of the auxiliary register by
    ``e^{i angle}``; ``aux`` must live inside that eigenspace. The default
    auxiliary register is a single qubit in ``|1>`` with ``U = R_angle``.
    Returns the ancilla probabilities ``((1 - cos), (1 + cos)) / 2``.
    """
    if aux is None:
        aux = new_basis_state(1, 1)
    support = np.flatnonzero(np.abs(aux.amplitudes) > 1e-14)
    coords = support if eigen_coords is None else np.asarray(list(eigen_coords))
    if not set(support.tolist()) <= set(coords.tolist()):
        raise ValidationError("auxiliary state is not an eigenvector of U")
    k = aux.qubit_count
    n = k + 1
    start = StateVector(n, np.kron(np.array([0.0, 1.0]), aux.amplitudes))
    circ = Circuit(n, [hadamard(0)])
    for c in coords:
        bits = [(1 + j, (int(c) >> (k - 1 - j)) & 1) for j in range(k)]
        circ.extend(pattern_phase([(0, 1)] + bits, angle))
    circ.append(hadamard(0))
    p = measure_probabilities(simulate(circ, start), [0])
    return float(p[0]), float(p[1])

"""Gate-level synthesis of cosine-sampling operators.

Every phase an operator writes has the form ``mult * (n * x + p)`` restricted
to some ancilla pattern. Each encoded quantity is expanded into *atoms*:
``(value, conditions)`` pairs whose conditioned sum reproduces the quantity on
every register basis state. A product ``n * x`` then becomes one controlled
phase per pair of atoms, which is the gate-saving ``R_{k phi}`` form; the
repeated-composition form emits ``k`` copies of ``R_phi`` instead.

Connection stages rely on one structural fact: inside a subtree, a coordinate
carries a phase exactly when the XOR of the subtree's ancilla bits is 1. A
CNOT chain folds that parity onto the subtree's last ancilla, which then works
as a single control.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .errors import GuardrailError, RangeError, UnsupportedModeError, ValidationError
from .spec import (ComponentSpec, ConstantData, Direct, Encoding, Node, QCoSampSpec,
                   Steerable, Tree, register_qubits)
from .statevec import (Circuit, GateApplication, StateVector, hadamard, measure_probabilities,
                       new_basis_state, pattern_phase, pauli_x, phase, simulate)

DEFAULT_MAX_QUBITS = 26

Conditions = tuple[tuple[int, int], ...]
Atom = tuple[float, Conditions]


# encodings -> atoms ----------------------------------------------------------

def _pattern(reg: Sequence[int], index: int) -> Conditions:
    k = len(reg)
    return tuple((q, (index >> (k - 1 - j)) & 1) for j, q in enumerate(reg))


def atoms(enc: Encoding, reg: Sequence[int], frequency: bool = False) -> list[Atom]:
    if isinstance(enc, Direct):
        return [(float(enc.value), ())]
    if isinstance(enc, Steerable):
        if frequency:
            return [(float(1 << k), ((q, 1),)) for k, q in enumerate(reg)]
        return [(-np.pi, ())] + [(np.pi / (1 << j), ((q, 1),)) for j, q in enumerate(reg)]
    vals = enc.padded()
    return [(float(v), _pattern(reg, e)) for e, v in enumerate(vals) if v != 0.0]


def emit_product(n_atoms: list[Atom], x_atoms: list[Atom], mult: float, cond: Conditions,
                  gate_saving: bool) -> list[GateApplication]:
    out: list[GateApplication] = []
    for nv, nc in n_atoms:
        if nv == 0:
            continue
        for xv, xc in x_atoms:
            c = cond + nc + xc
            if gate_saving:
                out += pattern_phase(c, mult * nv * xv)
            else:
                reps = int(round(abs(mult * nv)))
                sign = np.sign(mult * nv)
                for _ in range(reps):
                    out += pattern_phase(c, sign * xv)
    return out


def emit_sum(p_atoms: list[Atom], mult: float, cond: Conditions) -> list[GateApplication]:
    out: list[GateApplication] = []
    for pv, pc in p_atoms:
        out += pattern_phase(cond + pc, mult * pv)
    return out


# register allocation ---------------------------------------------------------

@dataclass(frozen=True)
class Layout:
    qubit_count: int
    registers: Mapping[str, tuple[int, ...]]
    ancillae: tuple[tuple[int, int], ...]

    @property
    def measured(self) -> int:
        return self.ancillae[-1][1]

    def reg(self, name: str) -> tuple[int, ...]:
        return self.registers.get(name, ())


def allocate(spec: QCoSampSpec, max_qubits: int = DEFAULT_MAX_QUBITS) -> Layout:
    """Canonical layout: component registers, argument register, ancilla pairs."""
    regs: dict[str, tuple[int, ...]] = {}
    total = 0

    def take(name: str, size: int) -> tuple[int, ...]:
        nonlocal total
        if total + size > max_qubits:
            raise GuardrailError(
                f"register '{name}' ({size} qubits) raises the total to {total + size}, "
                f"above the {max_qubits}-qubit limit")
        qs = tuple(range(total, total + size))
        total += size
        return qs

    for i, c in enumerate(spec.leaves):
        for key, enc in (("n", c.frequency), ("r", c.phase_r), ("s", c.phase_s)):
            size = register_qubits(enc)
            if size:
                regs[f"{key}{i}"] = take(f"{key}{i}", size)
    if register_qubits(spec.argument):
        regs["x"] = take("x", register_qubits(spec.argument))
    anc = []
    for i in range(len(spec.leaves)):
        a = take(f"c{i}", 2)
        regs[f"c{i}"] = a
        anc.append((a[0], a[1]))
    return Layout(total, regs, tuple(anc))


# subtree synthesis -----------------------------------------------------------

Shape = Union[int, tuple[Any, Any]]


def _shape_ancillae(shape: Shape, layout: Layout) -> list[int]:
    if isinstance(shape, int):
        return list(layout.ancillae[shape])
    return _shape_ancillae(shape[0], layout) + _shape_ancillae(shape[1], layout)


def _parity_chain(qubits: Sequence[int]) -> list[GateApplication]:
    target = qubits[-1]
    return [pauli_x(target, (q,)) for q in qubits[:-1]]


@dataclass
class Subtree:
    """H-minus form operator of a subtree, plus the bookkeeping to connect it."""

    builder: Builder
    shape: Shape
    ops: list[GateApplication] = field(default_factory=list)

    @property
    def ancillae(self) -> list[int]:
        return _shape_ancillae(self.shape, self.builder.layout)

    def circuit(self) -> Circuit:
        return Circuit(self.builder.layout.qubit_count, list(self.ops))


class Builder:
    def __init__(self, spec: QCoSampSpec, *, max_qubits: int = DEFAULT_MAX_QUBITS,
                 gate_saving: bool = True) -> None:
        self.spec = spec
        self.layout = allocate(spec, max_qubits)
        self.gate_saving = gate_saving
        lay = self.layout
        x_atoms = atoms(spec.argument, lay.reg("x"))
        self._terms = []
        for i, c in enumerate(spec.leaves):
            n_atoms = atoms(c.frequency, lay.reg(f"n{i}"), frequency=True)
            self._terms.append((n_atoms, x_atoms,
                                atoms(c.phase_r, lay.reg(f"r{i}")),
                                atoms(c.phase_s, lay.reg(f"s{i}"))))

    def _phase(self, leaf: int, branch: str, mult: float, cond: Conditions) -> list[GateApplication]:
        n_atoms, x_atoms, r_atoms, s_atoms = self._terms[leaf]
        p_atoms = r_atoms if branch == "r" else s_atoms
        return (emit_product(n_atoms, x_atoms, mult, cond, self.gate_saving)
                + emit_sum(p_atoms, mult, cond))

    def component(self, i: int) -> Subtree:
        """Leaf operator in H-minus form on ancillae ``(c1, c2)``."""
        c1, c2 = self.layout.ancillae[i]
        n_atoms, x_atoms, r_atoms, s_atoms = self._terms[i]
        both = ((c1, 1), (c2, 1))
        ops = [hadamard(c1), hadamard(c2)]
        ops += self._phase(i, "r", 1.0, ((c1, 1),))
        ops += self._phase(i, "s", 1.0, ((c2, 1),))
        # un-compute e^{i(2nx + r + s)} on |11>
        ops += emit_product(n_atoms, x_atoms, -2.0, both, self.gate_saving)
        ops += emit_sum(r_atoms, -1.0, both) + emit_sum(s_atoms, -1.0, both)
        return Subtree(self, i, ops)

    def _install(self, shape: Shape, mult: float, cond: Conditions) -> list[GateApplication]:
        """Phase map of a subtree (scaled by ``mult``) restricted to ``cond``."""
        if isinstance(shape, int):
            c1, c2 = self.layout.ancillae[shape]
            return (self._phase(shape, "s", mult, cond + ((c1, 0), (c2, 1)))
                    + self._phase(shape, "r", mult, cond + ((c1, 1), (c2, 0))))
        left, right = shape
        la = _shape_ancillae(left, self.layout)
        ra = _shape_ancillae(right, self.layout)
        ops: list[GateApplication] = []
        chain = _parity_chain(ra)
        ops += chain + self._install(left, mult, cond + ((ra[-1], 0),)) + chain[::-1]
        chain = _parity_chain(la)
        ops += chain + self._install(right, mult, cond + ((la[-1], 0),)) + chain[::-1]
        return ops

    def connect(self, left: Subtree, right: Subtree) -> Subtree:
        """Tensor two subtrees and cancel the products of their phases."""
        if left.builder is not self or right.builder is not self:
            raise ValidationError("subtrees come from different builders")
        la, ra = left.ancillae, right.ancillae
        if set(la) & set(ra):
            raise ValidationError("connected subtrees share ancillae")
        ops = list(left.ops) + list(right.ops)
        chain = _parity_chain(ra)
        ops += chain + self._install(left.shape, -1.0, ((ra[-1], 1),)) + chain[::-1]
        chain = _parity_chain(la)
        ops += chain + self._install(right.shape, -1.0, ((la[-1], 1),)) + chain[::-1]
        return Subtree(self, (left.shape, right.shape), ops)

    def h_minus(self) -> Subtree:
        counter = iter(range(len(self.spec.leaves)))

        def walk(t: Tree) -> Subtree:
            if isinstance(t, ComponentSpec):
                return self.component(next(counter))
            return self.connect(walk(t.left), walk(t.right))

        return walk(self.spec.tree)

    def preparation(self, superpose: Sequence[str] = ()) -> list[GateApplication]:
        """Hadamards on constant-data registers and on requested steerable ones."""
        spec, lay = self.spec, self.layout
        names = []
        for i, c in enumerate(spec.leaves):
            for key, enc in (("n", c.frequency), ("r", c.phase_r), ("s", c.phase_s)):
                if isinstance(enc, ConstantData):
                    names.append(f"{key}{i}")
        if isinstance(spec.argument, ConstantData):
            names.append("x")
        for name in superpose:
            if name not in lay.registers or name.startswith("c"):
                raise ValidationError(f"no register named {name!r} to superpose")
            if name not in names:
                names.append(name)
        return [hadamard(q) for name in names for q in lay.registers[name]]

    def build(self, interference: bool = True, superpose: Sequence[str] = ()) -> Circuit:
        ops = self.preparation(superpose) + self.h_minus().ops
        if interference:
            ops.append(hadamard(self.layout.measured))
        return Circuit(self.layout.qubit_count, ops)


@dataclass
class Assembly:
    circuit: Circuit
    layout: Layout
    spec: QCoSampSpec

    def initial_state(self, values: Mapping[str, int] | None = None) -> StateVector:
        """Basis state with each named register holding the given basis index."""
        index = 0
        n = self.layout.qubit_count
        for name, value in (values or {}).items():
            reg = self.layout.registers.get(name)
            if reg is None:
                raise ValidationError(f"no register named {name!r}")
            if not 0 <= value < 1 << len(reg):
                raise RangeError(f"value {value} does not fit register {name!r}")
            for j, q in enumerate(reg):
                if (value >> (len(reg) - 1 - j)) & 1:
                    index |= 1 << (n - 1 - q)
        return new_basis_state(n, index)

    def run(self, values: Mapping[str, int] | None = None) -> StateVector:
        return simulate(self.circuit, self.initial_state(values))

    def p0(self, values: Mapping[str, int] | None = None) -> float:
        """Exact probability of reading 0 on the measured ancilla."""
        return float(measure_probabilities(self.run(values), [self.layout.measured])[0])


def assemble(spec: QCoSampSpec, *, superpose: Sequence[str] = (), interference: bool = True,
             gate_saving: bool = True, max_qubits: int = DEFAULT_MAX_QUBITS) -> Assembly:
    """Full operator: preparation, component and connection stages, interference."""
    b = Builder(spec, max_qubits=max_qubits, gate_saving=gate_saving)
    return Assembly(b.build(interference, superpose), b.layout, spec)


def connect(left: Subtree, right: Subtree) -> Subtree:
    return left.builder.connect(left, right)


def phase_pattern(spec: QCoSampSpec) -> list[tuple[int, str] | None]:
    """Symbolic H-minus coordinates over the ancilla register.

    Entry ``a`` is ``None`` for a unit coordinate or ``(leaf, branch)`` when
    the coordinate carries ``e^{i(n x + branch)}`` of that leaf.
    """
    counter = iter(range(len(spec.leaves)))

    def walk(t: Tree) -> list:
        if isinstance(t, ComponentSpec):
            i = next(counter)
            return [None, (i, "s"), (i, "r"), None]
        left, right = walk(t.left), walk(t.right)
        out = []
        for a in left:
            for b in right:
                out.append(None if (a is not None and b is not None) else (a or b))
        return out

    return walk(spec.tree)


# standalone operators ----------------------------------------------------------

def _circuit(qubits: Sequence[int], qubit_count: int | None) -> Circuit:
    return Circuit(qubit_count if qubit_count is not None else max(qubits) + 1)


def bc_operator(n: int, x: float, p: float, gate_saving: bool = True) -> Circuit:
    """One-ancilla base operator ``H R_x^n R_p H``."""
    if n < 0:
        raise ValidationError("frequency must be nonnegative")
    c = Circuit(1, [hadamard(0)])
    if gate_saving:
        c.append(phase(n * x, 0))
    else:
        c.extend(phase(x, 0) for _ in range(n))
    c.append(phase(p, 0))
    c.append(hadamard(0))
    return c


def cpc_operator(n: int, x_mode: Encoding | float, r: float, s: float) -> Circuit:
    """Constant-parameter component with interference; the last qubit is measured."""
    arg = Direct(float(x_mode)) if isinstance(x_mode, (int, float)) else x_mode
    if isinstance(arg, Steerable):
        raise UnsupportedModeError("steerable argument needs cmpn_operator")
    return assemble(QCoSampSpec(ComponentSpec.direct(n, r, s), arg)).circuit


def constant_encode(values: Sequence[float], register_qubits: int,
                    qubits: Sequence[int] | None = None) -> Circuit:
    """Uniform superposition with angle ``values[k]`` on eigenstate ``k``."""
    enc = ConstantData(tuple(values), register_qubits)
    reg = tuple(qubits) if qubits is not None else tuple(range(register_qubits))
    c = Circuit(max(reg) + 1, [hadamard(q) for q in reg])
    c.extend(emit_sum(atoms(enc, reg), 1.0, ()))
    return c


def _check_disjoint(*regs: Sequence[int]) -> None:
    flat = [q for r in regs for q in r]
    if len(set(flat)) != len(flat):
        raise ValidationError("registers overlap")


def aps_operator(x_register: Sequence[int], p_register: Sequence[int], ancilla: int,
                 qubit_count: int | None = None) -> Circuit:
    """Argument and phase both read from registers: ``|0> + e^{i(x+p)}|1>``."""
    _check_disjoint(x_register, p_register, [ancilla])
    c = _circuit(list(x_register) + list(p_register) + [ancilla], qubit_count)
    c.append(hadamard(ancilla))
    cond = ((ancilla, 1),)
    c.extend(emit_product([(1.0, ())], atoms(Steerable(len(x_register)), x_register),
                           1.0, cond, True))
    c.extend(emit_sum(atoms(Steerable(len(p_register)), p_register), 1.0, cond))
    return c


def fs_operator(n_register: Sequence[int], p_register: Sequence[int],
                x_register: Sequence[int], ancilla: int, qubit_count: int | None = None,
                gate_saving: bool = True) -> Circuit:
    """Frequency, phase and argument all steerable: ``|0> + e^{i(nx+p)}|1>``."""
    _check_disjoint(n_register, p_register, x_register, [ancilla])
    c = _circuit(list(n_register) + list(p_register) + list(x_register) + [ancilla], qubit_count)
    c.append(hadamard(ancilla))
    cond = ((ancilla, 1),)
    n_atoms = atoms(Steerable(len(n_register)), n_register, frequency=True) if n_register else []
    c.extend(emit_product(n_atoms, atoms(Steerable(len(x_register)), x_register),
                           1.0, cond, gate_saving))
    c.extend(emit_sum(atoms(Steerable(len(p_register)), p_register), 1.0, cond))
    return c


def cmpn_operator(component: ComponentSpec, x_mode: Encoding | float = 0.0,
                  gate_saving: bool = True) -> Assembly:
    """Single component in H-minus form (no interference stage)."""
    arg = Direct(float(x_mode)) if isinstance(x_mode, (int, float)) else x_mode
    return assemble(QCoSampSpec(component, arg), interference=False, gate_saving=gate_saving)


@dataclass
class Assembly2D:
    circuit: Circuit
    first: Assembly
    second: Assembly
    offset: int

    @property
    def measured(self) -> tuple[int, int]:
        return self.first.layout.measured, self.second.layout.measured + self.offset

    def p00(self) -> float:
        p = measure_probabilities(simulate(self.circuit), list(self.measured))
        return float(p[0])


def compose_2d(a: QCoSampSpec, b: QCoSampSpec, *, superpose: tuple[Sequence[str], Sequence[str]]
               = ((), ()), max_qubits: int = DEFAULT_MAX_QUBITS) -> Assembly2D:
    """Two operators on disjoint registers; ``P(00)`` of both measured ancillae is the product."""
    first = assemble(a, superpose=superpose[0], max_qubits=max_qubits)
    second = assemble(b, superpose=superpose[1], max_qubits=max_qubits)
    total = first.layout.qubit_count + second.layout.qubit_count
    if total > max_qubits:
        raise GuardrailError(f"two-dimensional operator needs {total} qubits, "
                             f"above the {max_qubits}-qubit limit")
    off = first.layout.qubit_count
    circ = Circuit(total, list(first.circuit.ops)) + second.circuit.shifted(off, total)
    return Assembly2D(circ, first, second, off)

"""Operator descriptions: element encodings, component trees and normalization."""

from __future__ import annotations

import json
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

import numpy as np

from .errors import RangeError, ValidationError

PHASE_TOL = 1e-12


@dataclass(frozen=True)
class Direct:
    """A value set once by plain phase-shift gates."""

    value: float


@dataclass(frozen=True)
class ConstantData:
    """Per-eigenstate values stored on a uniformly superposed register."""

    values: tuple[float, ...]
    register_qubits: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.register_qubits < 1:
            raise ValidationError("constant data needs at least one register qubit")
        if len(self.values) > 1 << self.register_qubits:
            raise ValidationError(
                f"{len(self.values)} values do not fit in {self.register_qubits} qubits")

    def padded(self) -> np.ndarray:
        out = np.zeros(1 << self.register_qubits)
        out[: len(self.values)] = self.values
        return out


@dataclass(frozen=True)
class Steerable:
    """A value read from the basis state of a quantum register."""

    register_qubits: int

    def __post_init__(self) -> None:
        if self.register_qubits < 1:
            raise ValidationError("steerable register needs at least one qubit")


Encoding = Union[Direct, ConstantData, Steerable]


def register_qubits(enc: Encoding) -> int:
    return 0 if isinstance(enc, Direct) else enc.register_qubits


# Register value conventions. Phase-like registers read their first qubit as
# the weight-pi bit: x = -pi + sum_j pi x_j / 2^j. Frequency registers read
# their first qubit as the least significant bit: n = sum_k n_k 2^k.

def phase_value(index: int, qubits: int) -> float:
    """Angle encoded by basis index ``index`` of a phase-like register."""
    return -np.pi + 2 * np.pi * index / (1 << qubits)


def phase_index(value: float, qubits: int) -> int:
    """Basis index whose grid angle equals ``value`` (must lie on the grid)."""
    k = (value + np.pi) * (1 << qubits) / (2 * np.pi)
    r = int(round(k))
    if abs(k - r) > 1e-9 or not 0 <= r < 1 << qubits:
        raise RangeError(f"angle {value} is not on the {qubits}-qubit grid")
    return r


def frequency_value(index: int, qubits: int) -> int:
    bits = format(index, f"0{qubits}b")
    return sum(int(b) << k for k, b in enumerate(bits))


def frequency_index(n: int, qubits: int) -> int:
    if not 0 <= n < 1 << qubits:
        raise RangeError(f"frequency {n} does not fit in {qubits} qubits")
    bits = "".join(str((n >> k) & 1) for k in range(qubits))
    return int(bits, 2)


@dataclass(frozen=True)
class ComponentSpec:
    frequency: Encoding
    phase_r: Encoding
    phase_s: Encoding

    def __post_init__(self) -> None:
        f = self.frequency
        if isinstance(f, Direct):
            if f.value < 0 or f.value != int(f.value):
                raise ValidationError(f"direct frequency must be a nonnegative integer, got {f.value}")
        elif isinstance(f, ConstantData):
            if any(v < 0 or v != int(v) for v in f.values):
                raise ValidationError("constant frequencies must be nonnegative integers")
        for name in ("phase_r", "phase_s"):
            p = getattr(self, name)
            if isinstance(p, Direct) and abs(p.value) > np.pi + PHASE_TOL:
                raise ValidationError(f"{name}={p.value} outside [-pi, pi]")

    @classmethod
    def direct(cls, n: int, r: float, s: float) -> ComponentSpec:
        return cls(Direct(n), Direct(r), Direct(s))


@dataclass(frozen=True)
class Node:
    """Connection of two subtrees; both children are mandatory."""

    left: Tree
    right: Tree

    def __post_init__(self) -> None:
        for child in (self.left, self.right):
            if not isinstance(child, (Node, ComponentSpec)):
                raise ValidationError("every connection needs two subtree children")


Tree = Union[Node, ComponentSpec]


def iter_leaves(tree: Tree, depth: int = 0) -> Iterator[tuple[ComponentSpec, int]]:
    """Leaves in left-to-right order with their depth."""
    if isinstance(tree, ComponentSpec):
        yield tree, depth
    else:
        yield from iter_leaves(tree.left, depth + 1)
        yield from iter_leaves(tree.right, depth + 1)


def balanced_tree(leaves: Sequence[ComponentSpec]) -> Tree:
    """Pair leaves by halving; perfect whenever the count is a power of two."""
    if not leaves:
        raise ValidationError("a tree needs at least one component")
    if len(leaves) == 1:
        return leaves[0]
    mid = (len(leaves) + 1) // 2
    return Node(balanced_tree(leaves[:mid]), balanced_tree(leaves[mid:]))


def random_tree(leaves: Sequence[ComponentSpec], rng: np.random.Generator) -> Tree:
    """Random full binary tree shape over the given leaves (order preserved)."""
    if len(leaves) == 1:
        return leaves[0]
    cut = int(rng.integers(1, len(leaves)))
    return Node(random_tree(leaves[:cut], rng), random_tree(leaves[cut:], rng))


@dataclass(frozen=True)
class QCoSampSpec:
    tree: Tree
    argument: Encoding = field(default_factory=lambda: Direct(0.0))

    def __post_init__(self) -> None:
        if not isinstance(self.tree, (Node, ComponentSpec)):
            raise ValidationError("tree must be a component or a connection")
        if isinstance(self.argument, Direct) and not np.isfinite(self.argument.value):
            raise ValidationError("argument must be finite")

    @property
    def leaves(self) -> tuple[ComponentSpec, ...]:
        return tuple(leaf for leaf, _ in iter_leaves(self.tree))

    @property
    def depths(self) -> tuple[int, ...]:
        return tuple(d for _, d in iter_leaves(self.tree))

    @property
    def height(self) -> int:
        return max(self.depths)

    @property
    def balanced(self) -> bool:
        return len(set(self.depths)) == 1

    def with_argument(self, argument: Encoding) -> QCoSampSpec:
        return QCoSampSpec(self.tree, argument)

    def with_leaves(self, leaves: Sequence[ComponentSpec]) -> QCoSampSpec:
        it = iter(leaves)

        def rebuild(t: Tree) -> Tree:
            if isinstance(t, ComponentSpec):
                return next(it)
            return Node(rebuild(t.left), rebuild(t.right))

        return QCoSampSpec(rebuild(self.tree), self.argument)


def single(n: int, r: float, s: float, argument: Encoding | float = 0.0) -> QCoSampSpec:
    arg = Direct(float(argument)) if isinstance(argument, (int, float)) else argument
    return QCoSampSpec(ComponentSpec.direct(n, r, s), arg)


def tree_sum(spec: QCoSampSpec | Tree) -> Fraction:
    tree = spec.tree if isinstance(spec, QCoSampSpec) else spec
    return sum((Fraction(1, 1 << d) for _, d in iter_leaves(tree)), Fraction(0))


def tree_sum_check(spec: QCoSampSpec | Tree) -> bool:
    """Exact rational check that the leaf weights ``1 / 2^depth`` add up to one."""
    return tree_sum(spec) == 1


def eleven_leaf_tree(leaf: ComponentSpec | None = None) -> Tree:
    """Eleven leaves: eight at depth 5, two at depth 3, one at depth 1."""
    leaf = leaf or ComponentSpec.direct(1, 0.0, 0.0)
    deep = balanced_tree([leaf] * 8)
    return Node(Node(deep, Node(leaf, leaf)), leaf)


@dataclass(frozen=True)
class NormalizationInfo:
    Lambda: float
    tau: tuple[float, ...]
    L: tuple[int, ...]
    T: tuple[int, ...]
    X: int


def normalization(spec: QCoSampSpec) -> NormalizationInfo:
    """Pre-measurement factor, appearance factors and post-measurement lengths.

    ``T_n`` counts a component's register qubits plus its two ancillae; ``X`` is
    the argument register width. ``L_n = 4 * 2^depth`` in every case.
    """
    T = tuple(register_qubits(c.frequency) + register_qubits(c.phase_r)
              + register_qubits(c.phase_s) + 2 for c in spec.leaves)
    X = register_qubits(spec.argument)
    NT = sum(T)
    lam = 2.0 ** (-NT / 2) * 2.0 ** (-X / 2) / np.sqrt(2.0)
    tau = tuple(2.0 ** (NT - 2) * 2.0 ** X / (1 << d) for d in spec.depths)
    L = tuple(4 * (1 << d) for d in spec.depths)
    return NormalizationInfo(lam, tau, L, T, X)


# JSON documents ------------------------------------------------------------

def encoding_to_json(enc: Encoding) -> Any:
    if isinstance(enc, Direct):
        return enc.value
    if isinstance(enc, Steerable):
        return {"mode": "steerable", "qubits": enc.register_qubits}
    return {"mode": "constant", "qubits": enc.register_qubits, "values": list(enc.values)}


def encoding_from_json(obj: Any, where: str) -> Encoding:
    if isinstance(obj, bool):
        raise ValidationError(f"{where}: boolean is not a valid value")
    if isinstance(obj, (int, float)):
        return Direct(obj)
    if not isinstance(obj, dict) or "mode" not in obj:
        raise ValidationError(f"{where}: expected a number or an object with 'mode'")
    mode = obj["mode"]
    try:
        if mode == "direct":
            return Direct(obj["value"])
        if mode == "steerable":
            return Steerable(int(obj["qubits"]))
        if mode == "constant":
            return ConstantData(tuple(obj["values"]), int(obj["qubits"]))
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{where}: missing or malformed field {exc}") from None
    raise ValidationError(f"{where}: unknown mode {mode!r}")


def spec_to_json(spec: QCoSampSpec) -> dict:
    comps = []
    for c in spec.leaves:
        comps.append({"n": encoding_to_json(c.frequency), "r": encoding_to_json(c.phase_r),
                      "s": encoding_to_json(c.phase_s)})
    counter = iter(range(len(comps)))

    def shape(t: Tree) -> Any:
        if isinstance(t, ComponentSpec):
            return next(counter)
        return [shape(t.left), shape(t.right)]

    arg = spec.argument
    if isinstance(arg, Direct):
        arg_doc: dict = {"mode": "direct", "value": arg.value}
    else:
        arg_doc = encoding_to_json(arg)
    return {"components": comps, "tree": shape(spec.tree), "argument": arg_doc}


def spec_from_json(doc: Any) -> QCoSampSpec:
    if not isinstance(doc, dict) or "components" not in doc:
        raise ValidationError("spec document needs a 'components' list")
    raw = doc["components"]
    if not isinstance(raw, list) or not raw:
        raise ValidationError("'components' must be a non-empty list")
    comps = []
    for i, c in enumerate(raw):
        if not isinstance(c, dict) or not {"n", "r", "s"} <= set(c):
            raise ValidationError(f"components[{i}] needs fields n, r, s")
        comps.append(ComponentSpec(encoding_from_json(c["n"], f"components[{i}].n"),
                                   encoding_from_json(c["r"], f"components[{i}].r"),
                                   encoding_from_json(c["s"], f"components[{i}].s")))
    if "tree" in doc and doc["tree"] is not None:
        used: list[int] = []

        def build(t: Any) -> Tree:
            if isinstance(t, int) and not isinstance(t, bool):
                if not 0 <= t < len(comps):
                    raise ValidationError(f"tree references unknown component {t}")
                used.append(t)
                return comps[t]
            if isinstance(t, list) and len(t) == 2:
                return Node(build(t[0]), build(t[1]))
            raise ValidationError("tree nodes must be component indices or [left, right] pairs")

        tree = build(doc["tree"])
        if sorted(used) != list(range(len(comps))):
            raise ValidationError("tree must use every component exactly once")
    else:
        tree = balanced_tree(comps)
    arg = doc.get("argument", {"mode": "direct", "value": 0.0})
    argument = encoding_from_json(arg, "argument")
    return QCoSampSpec(tree, argument)


def load_spec(path: str) -> QCoSampSpec:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    return spec_from_json(doc)

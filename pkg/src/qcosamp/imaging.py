"""Phase-encoded gray images, parallel mean filtering and window similarity."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .applications import compare_states
from .builder import compose_2d, constant_encode
from .errors import RangeError, ValidationError
from .spec import Direct, QCoSampSpec, Steerable
from .statevec import (Circuit, StateVector, hadamard, measure_probabilities, pattern_phase,
                       simulate)


def _is_pow2(k: int) -> bool:
    return k >= 1 and k & (k - 1) == 0


@dataclass(frozen=True)
class GrayImage:
    """Intensities in ``[0, imax]`` stored row-major with shape ``(height, width)``."""

    pixels: np.ndarray
    imax: int = 255

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValidationError("image must be a nonempty 2-D array")
        if self.imax < 1:
            raise ValidationError("imax must be positive")
        if np.any(px < 0) or np.any(px > self.imax):
            raise ValidationError(f"intensities must lie in [0, {self.imax}]")
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def padded(self) -> GrayImage:
        """Zero-pad to power-of-two sides."""
        h = 1 << max(0, (self.height - 1).bit_length())
        w = 1 << max(0, (self.width - 1).bit_length())
        out = np.zeros((h, w), dtype=self.pixels.dtype)
        out[:self.height, :self.width] = self.pixels
        return GrayImage(out, self.imax)

    def angles(self) -> np.ndarray:
        return intensity_to_angle(self.pixels, self.imax)


@dataclass(frozen=True)
class WindowSpec:
    width: int
    height: int
    shift_right: int = 1
    shift_down: int = 1

    def __post_init__(self) -> None:
        if not (_is_pow2(self.width) and _is_pow2(self.height)):
            raise ValidationError("window sides must be powers of two")
        if self.shift_right < 1 or self.shift_down < 1:
            raise ValidationError("shifts must be at least 1")

    @property
    def size(self) -> int:
        return self.width * self.height


def intensity_to_angle(intensity: np.ndarray | float, imax: int) -> np.ndarray:
    return np.pi * np.asarray(intensity, dtype=float) / imax


def angle_to_intensity(angle: np.ndarray | float, imax: int) -> np.ndarray:
    return np.rint(np.asarray(angle) * imax / np.pi).astype(int)


def _qubits(img: GrayImage) -> int:
    if not (_is_pow2(img.width) and _is_pow2(img.height)):
        raise ValidationError(f"image is {img.height}x{img.width}; sides must be powers of two "
                              f"(use pad=True)")
    return int(np.log2(img.width * img.height))


def encode_image(img: GrayImage, pad: bool = False) -> StateVector:
    """Uniform superposition over ``|row, col>`` with phase ``pi I / imax`` per pixel."""
    img = img.padded() if pad else img
    q = _qubits(img)
    return simulate(constant_encode(tuple(img.angles().reshape(-1)), q))


def decode_angles(state: StateVector, shape: tuple[int, int]) -> np.ndarray:
    """Per-coordinate phase, wrapped into ``[0, 2 pi)``."""
    return np.remainder(np.angle(state.amplitudes), 2 * np.pi).reshape(shape)


def decode_image(state: StateVector, shape: tuple[int, int], imax: int) -> GrayImage:
    ang = decode_angles(state, shape)
    # angles just below 2 pi are rounding noise around 0
    ang = np.where(ang > 2 * np.pi - 1e-9, 0.0, ang)
    return GrayImage(np.clip(angle_to_intensity(ang, imax), 0, imax), imax)


def window_centers(size: int, window: int, shift: int) -> list[int]:
    """Centers ``c`` with ``window/2 <= c <= size - window/2`` stepped by ``shift``."""
    half = window // 2
    if window > size:
        raise RangeError(f"window {window} does not fit in {size} pixels")
    return list(range(half, size - half + 1, shift))


def _window(c: int, window: int) -> range:
    half = window // 2
    return range(c - half, c - half + window)


def filter_circuit(img: GrayImage, win: WindowSpec) -> Circuit:
    """All window operators fused into one diagonal pass on a uniform register.

    Each filtered center accumulates ``theta_q / |window|`` from every window
    pixel ``q``; other pixels keep their own phase.
    """
    q = _qubits(img)
    H, W = img.height, img.width
    theta = img.angles()
    rows = window_centers(H, win.height, win.shift_down)
    cols = window_centers(W, win.width, win.shift_right)
    if not rows or not cols:
        raise RangeError("window leaves no valid center")
    centers = {(i, j) for i in rows if i < H for j in cols if j < W}
    circ = Circuit(q, [hadamard(k) for k in range(q)])

    def pattern(i: int, j: int):
        idx = i * W + j
        return tuple((k, (idx >> (q - 1 - k)) & 1) for k in range(q))

    for i in range(H):
        for j in range(W):
            if (i, j) not in centers:
                circ.extend(pattern_phase(pattern(i, j), theta[i, j]))
                continue
            for a in _window(i, win.height):
                for b in _window(j, win.width):
                    circ.extend(pattern_phase(pattern(i, j), theta[a, b] / win.size))
    return circ


def mean_kernel_angles(img: GrayImage, win: WindowSpec) -> np.ndarray:
    """Angle-domain output of the quantum mean filter."""
    state = simulate(filter_circuit(img, win))
    ang = decode_angles(state, (img.height, img.width))
    return np.where(ang > 2 * np.pi - 1e-9, ang - 2 * np.pi, ang)


def mean_kernel_filter(img: GrayImage, win: WindowSpec) -> GrayImage:
    ang = mean_kernel_angles(img, win)
    return GrayImage(np.clip(angle_to_intensity(ang, img.imax), 0, img.imax), img.imax)


# window similarity ------------------------------------------------------------------

def kernel_values(kernel: tuple[QCoSampSpec, QCoSampSpec], win: WindowSpec) -> np.ndarray:
    """``mu(w, g) = mu_a(x_w) mu_b(x_g)`` on the window grid, shape ``(height, width)``.

    The first factor runs over window rows and the second over columns. Both
    arguments are superposed registers, so one composed circuit yields every
    value; each joint outcome ``(row, col, 0, 0)`` has probability
    ``mu(row, col) / |window|``.
    """
    a, b = kernel
    qa, qb = int(np.log2(win.height)), int(np.log2(win.width))
    for sp in kernel:
        if not isinstance(sp.argument, (Direct, Steerable)):
            raise ValidationError("kernel specs take their argument from the window grid")
    specs = []
    for sp, q in ((a, qa), (b, qb)):
        specs.append(sp.with_argument(Steerable(q)) if q else sp.with_argument(Direct(-np.pi)))
    comp = compose_2d(specs[0], specs[1], superpose=(("x",) if qa else (), ("x",) if qb else ()))
    ma, mb = comp.measured
    xa = comp.first.layout.reg("x")
    xb = tuple(q + comp.offset for q in comp.second.layout.reg("x"))
    p = measure_probabilities(simulate(comp.circuit), list(xa) + list(xb) + [ma, mb])
    p = p.reshape(1 << qa, 1 << qb, 4)[:, :, 0]
    return p * win.size


def _window_angles(img: GrayImage, center: tuple[int, int], win: WindowSpec) -> np.ndarray:
    i, j = center
    rows, cols = _window(i, win.height), _window(j, win.width)
    if rows.start < 0 or cols.start < 0 or rows.stop > img.height or cols.stop > img.width:
        raise RangeError(f"window at {center} leaves the {img.height}x{img.width} image")
    return img.angles()[rows.start:rows.stop, cols.start:cols.stop]


def similarity_formula(window_angles: np.ndarray, mu: np.ndarray) -> float:
    """``sum (1 - cos(pi mu - theta)) / (4 |window|)``, between 0 and 1/2."""
    d = np.pi * np.asarray(mu) - np.asarray(window_angles)
    return float(np.sum(1 - np.cos(d)) / (4 * d.size))


def window_similarity(img: GrayImage, center: tuple[int, int],
                      kernel: tuple[QCoSampSpec, QCoSampSpec],
                      win: WindowSpec) -> tuple[float, float]:
    """Feature value by the comparison circuit and by formula, in that order."""
    theta = _window_angles(img, center, win)
    mu = kernel_values(kernel, win)
    q = int(np.log2(win.size))
    wprep = constant_encode(tuple(theta.reshape(-1)), q, tuple(range(q)))
    yprep = constant_encode(tuple((np.pi * mu).reshape(-1)), q, tuple(range(q)))
    circuit_value = 1.0 - compare_states(wprep, yprep)
    return circuit_value, similarity_formula(theta, mu)


def render_window(img: GrayImage, center: tuple[int, int], mu: np.ndarray) -> GrayImage:
    """Copy of ``img`` whose window at ``center`` holds the kernel itself (phase ``pi mu``)."""
    h, w = mu.shape
    rows, cols = _window(center[0], h), _window(center[1], w)
    px = np.asarray(img.pixels, dtype=float).copy()
    px[rows.start:rows.stop, cols.start:cols.stop] = np.asarray(mu) * img.imax
    return GrayImage(px, img.imax)


# PGM I/O --------------------------------------------------------------------------------

def _tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    toks, pos = [], 0
    while len(toks) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ValidationError("truncated PGM header")
        toks.append(data[start:pos])
    return toks, pos


def read_pgm(path: str) -> GrayImage:
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        (magic, w, h, mx), pos = _tokens(data, 4)
        w, h, mx = int(w), int(h), int(mx)
    except (ValueError, IndexError) as exc:
        raise ValidationError(f"{path}: malformed PGM header ({exc})")
    if not 0 < mx < 65536:
        raise ValidationError(f"{path}: maxval {mx} out of range")
    if magic == b"P2":
        vals = data[pos:].split()
        if len(vals) < w * h:
            raise ValidationError(f"{path}: expected {w * h} samples, found {len(vals)}")
        px = np.array([int(v) for v in vals[:w * h]]).reshape(h, w)
    elif magic == b"P5":
        raw = data[pos + 1:]
        dt = np.dtype(">u2") if mx > 255 else np.dtype("u1")
        if len(raw) < w * h * dt.itemsize:
            raise ValidationError(f"{path}: truncated raster")
        px = np.frombuffer(raw, dtype=dt, count=w * h).reshape(h, w).astype(int)
    else:
        raise ValidationError(f"{path}: unsupported magic {magic!r}, expected P2 or P5")
    return GrayImage(px, mx)


def write_pgm(img: GrayImage, path: str, binary: bool = False) -> None:
    px = np.rint(img.pixels).astype(int)
    header = f"{'P5' if binary else 'P2'}\n{img.width} {img.height}\n{img.imax}\n".encode()
    with open(path, "wb") as fh:
        fh.write(header)
        if binary:
            dt = ">u2" if img.imax > 255 else "u1"
            fh.write(px.astype(dt).tobytes())
        else:
            for row in px:
                fh.write((" ".join(str(v) for v in row) + "\n").encode())


def random_image(rng: np.random.Generator, shape: Sequence[int] = (8, 8),
                 imax: int = 255) -> GrayImage:
    return GrayImage(rng.integers(0, imax + 1, size=tuple(shape)), imax)

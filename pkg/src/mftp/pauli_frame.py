"""Pauli frame: accumulated X/Z errors on edges and their syndromes.

The frame records errors modulo stabilizers as two 0/1 arrays over
edges.  A Y error on an edge is both bits set.  Frames are mutable and
confined to one trial; everything here is cheap desk-scale numpy.
"""

from __future__ import annotations

import enum

import numpy as np

from .lattice import LatticeGeometry


class LogicalClass(enum.Enum):
    """Residual logical action on the tracked qubit (Klein four-group)."""

    I = (0, 0)
    X = (1, 0)
    Z = (0, 1)
    Y = (1, 1)

    @property
    def x_bit(self) -> int:
        return self.value[0]

    @property
    def z_bit(self) -> int:
        return self.value[1]

    @staticmethod
    def from_bits(x_bit: int, z_bit: int) -> "LogicalClass":
        return LogicalClass((x_bit & 1, z_bit & 1))

    def __mul__(self, other: "LogicalClass") -> "LogicalClass":
        return LogicalClass.from_bits(self.x_bit ^ other.x_bit,
                                      self.z_bit ^ other.z_bit)


class PauliFrame:
    """Two error bit-fields over the edges of a lattice."""

    __slots__ = ("x_errors", "z_errors")

    def __init__(self, edge_count: int,
                 x_errors: np.ndarray | None = None,
                 z_errors: np.ndarray | None = None):
        self.x_errors = _as_bits(x_errors, edge_count)
        self.z_errors = _as_bits(z_errors, edge_count)

    @property
    def edge_count(self) -> int:
        return self.x_errors.shape[0]

    def clone(self) -> "PauliFrame":
        return PauliFrame(self.edge_count, self.x_errors.copy(), self.z_errors.copy())

    def is_clean(self) -> bool:
        return not self.x_errors.any() and not self.z_errors.any()

    # Debug-dump serialisation: bit i of the field is edge i; bits are
    # packed little-first into bytes and rendered as lowercase hex of
    # ceil(E/8) bytes.  Round-trips bit-exactly.
    def to_hex(self) -> tuple[str, str]:
        return (_bits_to_hex(self.x_errors), _bits_to_hex(self.z_errors))

    @staticmethod
    def from_hex(edge_count: int, x_hex: str, z_hex: str) -> "PauliFrame":
        return PauliFrame(edge_count,
                          _hex_to_bits(x_hex, edge_count),
                          _hex_to_bits(z_hex, edge_count))

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliFrame)
                and np.array_equal(self.x_errors, other.x_errors)
                and np.array_equal(self.z_errors, other.z_errors))


def _as_bits(arr, edge_count: int) -> np.ndarray:
    if arr is None:
        return np.zeros(edge_count, dtype=np.uint8)
    arr = np.asarray(arr, dtype=np.uint8) & 1
    if arr.shape != (edge_count,):
        raise ValueError(f"bit-field length {arr.shape} != edge count {edge_count}")
    return arr


def _bits_to_hex(bits: np.ndarray) -> str:
    return np.packbits(bits, bitorder="little").tobytes().hex()


def _hex_to_bits(s: str, edge_count: int) -> np.ndarray:
    raw = np.frombuffer(bytes.fromhex(s), dtype=np.uint8)
    bits = np.unpackbits(raw, bitorder="little")
    if bits.shape[0] < edge_count or bits[edge_count:].any():
        raise ValueError("hex string does not match edge count")
    return bits[:edge_count].copy()


class SyndromeField:
    """Stabilizer eigenvalues: ``b`` (+-1 per vertex star), ``a`` (+-1 per face)."""

    __slots__ = ("b", "a")

    def __init__(self, b: np.ndarray, a: np.ndarray):
        self.b = np.asarray(b, dtype=np.int8)
        self.a = np.asarray(a, dtype=np.int8)

    def vertex_defects(self) -> np.ndarray:
        return np.flatnonzero(self.b < 0)

    def face_defects(self) -> np.ndarray:
        return np.flatnonzero(self.a < 0)

    def is_trivial(self) -> bool:
        return bool((self.b > 0).all() and (self.a > 0).all())


def inject_errors(frame: PauliFrame, p: float, rng: np.random.Generator) -> PauliFrame:
    """Flip each edge's x bit and z bit independently with probability ``p``.

    Mutates ``frame`` in place and returns it.  The x field is drawn
    first, then the z field (fixed order for reproducibility).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"error probability must be in [0, 1], got {p}")
    E = frame.edge_count
    frame.x_errors ^= (rng.random(E) < p).astype(np.uint8)
    frame.z_errors ^= (rng.random(E) < p).astype(np.uint8)
    return frame


def compute_syndrome(frame: PauliFrame, geom: LatticeGeometry) -> SyndromeField:
    """b_v = (-1)^(#Z errors in E_v), a_f = (-1)^(#X errors in E_f)."""
    if frame.edge_count != geom.edge_count:
        raise ValueError("frame does not match geometry")
    b = 1 - 2 * ((geom.vertex_incidence @ frame.z_errors) & 1).astype(np.int8)
    a = 1 - 2 * ((geom.face_incidence @ frame.x_errors) & 1).astype(np.int8)
    return SyndromeField(b, a)


def apply_correction(frame: PauliFrame, correction: np.ndarray, kind: str) -> PauliFrame:
    """XOR a correction bit-field into the frame.

    ``kind='Z'`` targets the z field (the Pauli-frame effect of the
    transversal CZ feedback), ``kind='X'`` the x field (feedback after
    the Hadamard basis change).
    """
    correction = _as_bits(correction, frame.edge_count)
    if kind == "Z":
        frame.z_errors ^= correction
    elif kind == "X":
        frame.x_errors ^= correction
    else:
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    return frame


def apply_stabilizer(frame: PauliFrame, geom: LatticeGeometry, site: int, kind: str) -> PauliFrame:
    """XOR one stabilizer's support into the frame (test utility).

    ``kind='X'`` applies the vertex star (X on every edge of E_v);
    ``kind='Z'`` applies the face boundary (Z on every edge of E_f).
    Never changes the syndrome or the homology class.
    """
    if kind == "X":
        if not 0 <= site < geom.vertex_count:
            raise IndexError(f"vertex index {site} out of range")
        edges = geom.vertex_edges[site, :geom.vertex_degree[site]]
        frame.x_errors[edges] ^= 1
    elif kind == "Z":
        if not 0 <= site < geom.face_count:
            raise IndexError(f"face index {site} out of range")
        edges = geom.face_edges[site, :geom.face_degree[site]]
        frame.z_errors[edges] ^= 1
    else:
        raise ValueError(f"kind must be 'X' or 'Z', got {kind!r}")
    return frame


def homology_class(frame: PauliFrame, geom: LatticeGeometry, decoder) -> LogicalClass:
    """Logical action of the frame's residual on the tracked qubit.

    Clones the frame, applies ``decoder``'s correction (which must clear
    the syndrome), and reads the intersection parities of the residual
    with the two reference chains: a zero-syndrome z pattern acts as
    logical Z exactly when it crosses the reference X chain an odd
    number of times, and vice versa.
    """
    work = frame.clone()
    z_corr, x_corr = decoder(work, geom)
    apply_correction(work, z_corr, "Z")
    apply_correction(work, x_corr, "X")
    syn = compute_syndrome(work, geom)
    if not syn.is_trivial():
        raise RuntimeError("decoder correction did not clear the syndrome")
    z_bit = int(work.z_errors[geom.logical_x_edges].sum() & 1)
    x_bit = int(work.x_errors[geom.logical_z_edges].sum() & 1)
    return LogicalClass.from_bits(x_bit, z_bit)

"""Exact single-photon quantum kernel.

States live in the 0-or-1 photon sector over a set of labeled optical
modes.  A mode is a (path, time_bin) pair; the vacuum is an explicit
basis element so that reduced states of delocalized photons are
well-formed.  All matrices involved are tiny (<= ~16x16), so everything
is computed exactly with dense complex arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

STATE_TOL = 1e-12    # tolerance for norm / hermiticity / trace identities
UNITARY_TOL = 1e-10  # tolerance for U†U = I

# Canonical path labels. A/B are the two wavepacket branches of the first
# interferometer, A2/B2 the second one (GV2); ancilla paths host an
# eavesdropper's probe modes.
PATH_A = "A"
PATH_B = "B"
PATH_A2 = "A2"
PATH_B2 = "B2"


def ancilla_path(k: int) -> str:
    """Path label for the k-th ancilla mode."""
    return f"anc{k}"


class BasisMismatchError(ValueError):
    """Raised when an operation is applied across incompatible mode bases."""


@dataclass(frozen=True, order=True)
class ModeLabel:
    """A single optical mode: which path, and which time bin it occupies."""

    path: str
    time_bin: int = 0

    def __post_init__(self):
        if self.time_bin < 0:
            raise ValueError(f"time_bin must be >= 0, got {self.time_bin}")

    def shifted(self, bins: int) -> "ModeLabel":
        return ModeLabel(self.path, self.time_bin + bins)

    def __repr__(self):
        return f"({self.path},{self.time_bin})"


class PureState:
    """Normalized single-photon state: amplitudes over modes plus vacuum.

    Immutable after construction; the amplitude map is exposed through a
    read-only view.  The squared amplitudes (including vacuum) sum to 1
    within ``STATE_TOL``.
    """

    __slots__ = ("_amps", "_vacuum")

    def __init__(self, amplitudes: Mapping[ModeLabel, complex], vacuum: complex = 0.0):
        amps = {m: complex(a) for m, a in amplitudes.items() if a != 0}
        norm_sq = sum(abs(a) ** 2 for a in amps.values()) + abs(vacuum) ** 2
        if abs(norm_sq - 1.0) > STATE_TOL:
            raise ValueError(f"state not normalized: sum |amp|^2 = {norm_sq!r}")
        object.__setattr__(self, "_amps", MappingProxyType(amps))
        object.__setattr__(self, "_vacuum", complex(vacuum))

    def __setattr__(self, *_):
        raise AttributeError("PureState is immutable")

    @property
    def amplitudes(self) -> Mapping[ModeLabel, complex]:
        return self._amps

    @property
    def vacuum(self) -> complex:
        return self._vacuum

    @property
    def modes(self) -> frozenset[ModeLabel]:
        return frozenset(self._amps)

    def amplitude(self, mode: ModeLabel) -> complex:
        return self._amps.get(mode, 0.0)

    def norm(self) -> float:
        return float(
            np.sqrt(sum(abs(a) ** 2 for a in self._amps.values()) + abs(self._vacuum) ** 2)
        )

    def __repr__(self):
        terms = [f"{a:.4g}|{m!r}>" for m, a in sorted(self._amps.items())]
        if self._vacuum != 0:
            terms.append(f"{self._vacuum:.4g}|vac>")
        return " + ".join(terms) if terms else "|vac? 0>"


def basis_state(mode: ModeLabel) -> PureState:
    """The photon sitting entirely in one mode."""
    return PureState({mode: 1.0})


def vacuum_state() -> PureState:
    return PureState({}, vacuum=1.0)


def inner_product(s1: PureState, s2: PureState) -> complex:
    """<s1|s2> over the shared mode space (missing modes count as 0)."""
    acc = np.conj(s1.vacuum) * s2.vacuum
    for m, a in s2.amplitudes.items():
        acc += np.conj(s1.amplitude(m)) * a
    return complex(acc)


def encode_bit(bit: int, path_a: str = PATH_A, path_b: str = PATH_B,
               time_bin: int = 0) -> PureState:
    """Phase-encode one key bit across two wavepacket modes.

    Returns (|path_a, t0> + (-1)^bit |path_b, t0>) / sqrt(2).  The two
    coding states are orthonormal; the bit lives entirely in the relative
    phase between the wavepackets.
    """
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    s = 1.0 / np.sqrt(2.0)
    return PureState({
        ModeLabel(path_a, time_bin): s,
        ModeLabel(path_b, time_bin): s if bit == 0 else -s,
    })


class UnitaryOp:
    """A unitary matrix mapping a tuple of input modes to output modes.

    ``matrix[i, j]`` is the amplitude sent from ``in_modes[j]`` to
    ``out_modes[i]``.  Input and output labels may coincide (an in-place
    optical element) or differ (a relabeling such as a delay line).
    """

    __slots__ = ("in_modes", "out_modes", "matrix")

    def __init__(self, in_modes: Sequence[ModeLabel], out_modes: Sequence[ModeLabel],
                 matrix: np.ndarray):
        in_modes = tuple(in_modes)
        out_modes = tuple(out_modes)
        matrix = np.asarray(matrix, dtype=complex)
        if len(set(in_modes)) != len(in_modes) or len(set(out_modes)) != len(out_modes):
            raise BasisMismatchError("duplicate mode labels in unitary basis")
        if matrix.shape != (len(out_modes), len(in_modes)):
            raise BasisMismatchError(
                f"matrix shape {matrix.shape} does not match modes "
                f"({len(out_modes)}, {len(in_modes)})")
        if matrix.size:
            dev = np.abs(matrix.conj().T @ matrix - np.eye(len(in_modes))).max()
            if dev > UNITARY_TOL:
                raise ValueError(f"matrix is not unitary (deviation {dev:.3e})")
        matrix.setflags(write=False)
        object.__setattr__(self, "in_modes", in_modes)
        object.__setattr__(self, "out_modes", out_modes)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, *_):
        raise AttributeError("UnitaryOp is immutable")

    def dagger(self) -> "UnitaryOp":
        return UnitaryOp(self.out_modes, self.in_modes, self.matrix.conj().T)


def identity_op() -> UnitaryOp:
    """The do-nothing element (empty basis; every mode passes through)."""
    return UnitaryOp((), (), np.zeros((0, 0)))


def beam_splitter_5050(in1: ModeLabel, in2: ModeLabel,
                       out1: ModeLabel, out2: ModeLabel) -> UnitaryOp:
    """Symmetric 50/50 beam splitter.

    |in1> -> (|out1> + |out2>)/sqrt(2),  |in2> -> (|out1> - |out2>)/sqrt(2).
    Output labels may reuse the input labels.
    """
    if in1 == in2 or out1 == out2:
        raise BasisMismatchError("beam splitter ports must be distinct")
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
    return UnitaryOp((in1, in2), (out1, out2), h)


def mode_rotation(m1: ModeLabel, m2: ModeLabel, theta: float, phi: float = 0.0) -> UnitaryOp:
    """Two-mode rotation: a tunable coupler between modes m1 and m2.

    |m1> -> cos(theta)|m1> + e^{i phi} sin(theta)|m2>, orthogonal image
    for |m2>.  theta=pi/4, phi=0 is a (non-symmetric) 50/50 coupling.
    """
    c, s = np.cos(theta), np.sin(theta)
    m = np.array([[c, -s * np.exp(-1j * phi)],
                  [s * np.exp(1j * phi), c]], dtype=complex)
    return UnitaryOp((m1, m2), (m1, m2), m)


def delay(path: str, bins: int, time_bins: Sequence[int] = (0,)) -> UnitaryOp:
    """Delay line: relabels (path, t) -> (path, t + bins) for the given path.

    Acts on the listed time bins; everything else passes through apply()
    untouched.  bins=0 is the identity.
    """
    if bins < 0:
        raise ValueError("delay bins must be >= 0")
    if bins == 0:
        return identity_op()
    ins = tuple(ModeLabel(path, t) for t in time_bins)
    outs = tuple(ModeLabel(path, t + bins) for t in time_bins)
    return UnitaryOp(ins, outs, np.eye(len(ins)))


def apply(u: UnitaryOp, s: PureState) -> PureState:
    """Apply a unitary element to a state; modes outside u pass through.

    Raises BasisMismatchError if a passed-through mode collides with one
    of u's output modes (the result would not be unitary).
    """
    in_set = set(u.in_modes)
    out_set = set(u.out_modes)
    out_amps: dict[ModeLabel, complex] = {}
    vec = np.zeros(len(u.in_modes), dtype=complex)
    for m, a in s.amplitudes.items():
        if m in in_set:
            vec[u.in_modes.index(m)] = a
        else:
            if m in out_set:
                raise BasisMismatchError(
                    f"mode {m!r} passes through but collides with an output of the unitary")
            out_amps[m] = a
    if len(u.in_modes):
        image = u.matrix @ vec
        for i, m in enumerate(u.out_modes):
            if image[i] != 0:
                out_amps[m] = out_amps.get(m, 0.0) + image[i]
    return PureState(out_amps, vacuum=s.vacuum)


class DensityOp:
    """Hermitian trace-1 operator over {vacuum} + a declared mode basis.

    Index 0 of the matrix is the vacuum; indices 1..n follow ``modes`` in
    sorted order.
    """

    __slots__ = ("modes", "matrix")

    def __init__(self, modes: Iterable[ModeLabel], matrix: np.ndarray):
        modes = tuple(sorted(set(modes)))
        matrix = np.asarray(matrix, dtype=complex)
        n = len(modes) + 1
        if matrix.shape != (n, n):
            raise BasisMismatchError(
                f"matrix shape {matrix.shape} does not match basis size {n}")
        if np.abs(matrix - matrix.conj().T).max() > STATE_TOL:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(matrix).real - 1.0) > STATE_TOL or abs(np.trace(matrix).imag) > STATE_TOL:
            raise ValueError(f"density operator trace is {np.trace(matrix)!r}, expected 1")
        if np.linalg.eigvalsh(matrix).min() < -STATE_TOL:
            raise ValueError("density operator has a negative eigenvalue")
        matrix.setflags(write=False)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "matrix", matrix)

    def __setattr__(self, *_):
        raise AttributeError("DensityOp is immutable")

    def index_of(self, mode: ModeLabel) -> int:
        return 1 + self.modes.index(mode)


def projector_onto(s: PureState) -> DensityOp:
    """|s><s| as a DensityOp over the state's own modes plus vacuum."""
    modes = tuple(sorted(s.modes))
    vec = np.empty(len(modes) + 1, dtype=complex)
    vec[0] = s.vacuum
    for i, m in enumerate(modes):
        vec[i + 1] = s.amplitude(m)
    return DensityOp(modes, np.outer(vec, vec.conj()))


def partial_trace(s: "PureState | DensityOp", keep: Iterable[ModeLabel]) -> DensityOp:
    """Reduced operator on the kept modes (plus vacuum).

    In the 0/1-photon sector the reduction is closed-form: kept one-photon
    coherences survive, population of traced-out modes folds into the
    vacuum, and photon/vacuum coherences survive only against the global
    vacuum amplitude.
    """
    keep = tuple(sorted(set(keep)))
    if not keep:
        raise ValueError("keep set must not be empty")
    if isinstance(s, PureState):
        s = projector_onto(s)
    for m in keep:
        if m not in s.modes:
            raise BasisMismatchError(f"mode {m!r} is not in the operator's basis")
    n = len(keep) + 1
    out = np.zeros((n, n), dtype=complex)
    kept_idx = [s.index_of(m) for m in keep]
    traced_idx = [s.index_of(m) for m in s.modes if m not in keep]
    out[0, 0] = s.matrix[0, 0] + sum(s.matrix[j, j] for j in traced_idx)
    for a, ia in enumerate(kept_idx):
        out[a + 1, 0] = s.matrix[ia, 0]
        out[0, a + 1] = s.matrix[0, ia]
        for b, ib in enumerate(kept_idx):
            out[a + 1, b + 1] = s.matrix[ia, ib]
    return DensityOp(keep, out)


def trace_distance(r1: DensityOp, r2: DensityOp) -> float:
    """(1/2) sum |eigenvalues(r1 - r2)|; 0 iff the operators coincide."""
    if r1.modes != r2.modes:
        raise BasisMismatchError(
            f"density operators live on different bases: {r1.modes} vs {r2.modes}")
    eig = np.linalg.eigvalsh(r1.matrix - r2.matrix)
    return float(0.5 * np.abs(eig).sum())


def measure(s: PureState, projectors: Sequence[Iterable[ModeLabel]], rng,
            vacuum_outcome: int | None = None) -> tuple[int, PureState]:
    """Projective measurement onto groups of modes.

    ``projectors[k]`` is the set of modes whose total occupation maps to
    outcome k; the groups must be disjoint and jointly cover every mode
    the state occupies.  Any vacuum amplitude is assigned to
    ``vacuum_outcome``.  Returns (outcome index, renormalized collapsed
    state); sampling uses the caller's random generator.
    """
    groups = [frozenset(p) for p in projectors]
    seen: set[ModeLabel] = set()
    for g in groups:
        if g & seen:
            raise ValueError("projector groups are not disjoint")
        seen |= g
    if not s.modes <= seen:
        raise ValueError(
            f"projectors do not cover the state's modes: missing {s.modes - seen}")
    vac_p = abs(s.vacuum) ** 2
    if vac_p > STATE_TOL and vacuum_outcome is None:
        raise ValueError("state has vacuum amplitude but no vacuum_outcome designated")
    probs = np.array([sum(abs(s.amplitude(m)) ** 2 for m in g) for g in groups])
    if vacuum_outcome is not None:
        if not 0 <= vacuum_outcome < len(groups):
            raise ValueError(f"vacuum_outcome {vacuum_outcome} out of range")
        probs[vacuum_outcome] += vac_p
    outcome = int(np.searchsorted(np.cumsum(probs), rng.random() * probs.sum(),
                                  side="right"))
    outcome = min(outcome, len(groups) - 1)
    keep = groups[outcome]
    kept_amps = {m: a for m, a in s.amplitudes.items() if m in keep}
    kept_vac = s.vacuum if outcome == vacuum_outcome else 0.0
    norm = np.sqrt(sum(abs(a) ** 2 for a in kept_amps.values()) + abs(kept_vac) ** 2)
    collapsed = PureState({m: a / norm for m, a in kept_amps.items()},
                          vacuum=kept_vac / norm)
    return outcome, collapsed


def born_probabilities(s: PureState, projectors: Sequence[Iterable[ModeLabel]],
                       vacuum_outcome: int | None = None) -> np.ndarray:
    """Outcome distribution of measure() without sampling or collapse."""
    groups = [frozenset(p) for p in projectors]
    probs = np.array([sum(abs(s.amplitude(m)) ** 2 for m in g) for g in groups])
    if vacuum_outcome is not None:
        probs[vacuum_outcome] += abs(s.vacuum) ** 2
    return probs

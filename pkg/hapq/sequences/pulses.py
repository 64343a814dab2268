"""
Pulse program representation: multi-channel piecewise-constant rf segments.

Each plane is treated in the frame rotating at its own gradient-shifted resonance, so a
channel's ``offset_hz`` is measured from the resonance of the planes it targets. Within a
segment the rf Hamiltonian on a spin of plane ``p`` is

    2*pi * sum_channels [nu1 * (cos(phase) Ix + sin(phase) Iy) + offset_hz * Iz]

summed over the channels addressing ``p``. A channel with ``target=None`` is broadband
(all planes); a channel naming ``p`` explicitly replaces every broadband channel on ``p``.

Rotation sense: ``R = exp(-i * angle * (u . I))``, so ``exp(-i theta Ix)`` takes y to z.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from hapq.core.exceptions import SequenceError
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import SINGLE_SPIN, Operator

logger = logging.getLogger(__name__)

PlaneTarget = tuple[int, ...] | None


def _normalize_target(target: PlaneTarget | list[int] | int) -> PlaneTarget:
    if target is None:
        return None
    if isinstance(target, int):
        target = (target,)
    planes = tuple(sorted(set(int(p) for p in target)))
    if not planes:
        raise SequenceError("A channel target must name at least one plane (or None for all planes)")
    if planes[0] < 0:
        raise SequenceError(f"Plane indices must be nonnegative, got {planes}")
    return planes


@dataclass(frozen=True)
class PulseChannel:
    """One rf field; ``target=None`` irradiates every plane."""

    target: PlaneTarget = None
    offset_hz: float = 0.0
    amplitude_hz: float = 0.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", _normalize_target(self.target))
        if not (self.amplitude_hz >= 0.0 and math.isfinite(self.amplitude_hz)):
            raise SequenceError(f"Channel amplitude must be finite and nonnegative, got {self.amplitude_hz}")
        if not (math.isfinite(self.offset_hz) and math.isfinite(self.phase)):
            raise SequenceError("Channel offset and phase must be finite")

    @classmethod
    def from_field(cls, target: PlaneTarget | int, field_hz: np.ndarray) -> "PulseChannel":
        """Channel producing the field vector ``(x, y, z)`` in Hz on its planes."""
        return cls(
            target=target,  # type: ignore[arg-type]
            offset_hz=float(field_hz[2]),
            amplitude_hz=float(math.hypot(field_hz[0], field_hz[1])),
            phase=float(math.atan2(field_hz[1], field_hz[0])),
        )

    @property
    def selective(self) -> bool:
        return self.target is not None

    def field_hz(self) -> np.ndarray:
        """Field vector ``(nu1 cos(phase), nu1 sin(phase), offset)`` in Hz."""
        return np.array(
            [self.amplitude_hz * math.cos(self.phase), self.amplitude_hz * math.sin(self.phase), self.offset_hz]
        )


@dataclass(frozen=True)
class IdealRotation:
    """Instantaneous rotation by ``angle`` about the unit ``axis`` on the target planes."""

    angle: float
    axis: tuple[float, float, float] = (1.0, 0.0, 0.0)
    target: PlaneTarget = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", _normalize_target(self.target))
        norm = math.sqrt(sum(c * c for c in self.axis))
        if abs(norm - 1.0) > 1e-9:
            raise SequenceError(f"Rotation axis must be a unit vector, got {self.axis}")

    @classmethod
    def in_plane(cls, angle: float, phase: float, target: PlaneTarget | int = None) -> "IdealRotation":
        """Rotation about ``cos(phase) x + sin(phase) y``."""
        axis = (math.cos(phase), math.sin(phase), 0.0)
        return cls(angle=angle, axis=axis, target=target)  # type: ignore[arg-type]


@dataclass(frozen=True)
class PulseSegment:
    """A constant-rf interval, or a zero-duration ideal rotation."""

    duration: float
    channels: tuple[PulseChannel, ...] = ()
    rotation: IdealRotation | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        if not (self.duration >= 0.0 and math.isfinite(self.duration)):
            raise SequenceError(f"Segment duration must be finite and nonnegative, got {self.duration}")
        if self.rotation is not None:
            if self.duration != 0.0 or self.channels:
                raise SequenceError("An ideal-rotation segment has zero duration and no channels")
        elif self.duration == 0.0:
            raise SequenceError("Only ideal-rotation segments may have zero duration")

    def field_for_plane(self, plane: int) -> np.ndarray:
        """Total rf field (Hz) seen by ``plane``; selective channels override broadband ones."""
        selective = [c for c in self.channels if c.target is not None and plane in c.target]
        active = selective if selective else [c for c in self.channels if c.target is None]
        total = np.zeros(3)
        for channel in active:
            total += channel.field_hz()
        return total

    def planes_referenced(self) -> set[int]:
        planes: set[int] = set()
        for channel in self.channels:
            planes.update(channel.target or ())
        if self.rotation is not None:
            planes.update(self.rotation.target or ())
        return planes


@dataclass(frozen=True)
class FrameHint:
    """
    Effective-field frame of a plane whose rf is modulated within a segment train.

    Spins on the plane are decomposed in the frame with z' along ``axis``; ``field_hz`` is
    the magnitude of their effective field in that frame.
    """

    axis: tuple[float, float, float]
    field_hz: float


@dataclass(frozen=True)
class PulseSequence:
    """
    An ordered cycle of segments repeated ``n_repeats`` times.

    ``frames`` maps planes to explicit effective-field frames; planes not listed get the
    frame of their (collinear) fields.
    """

    segments: tuple[PulseSegment, ...]
    n_repeats: int = 1
    name: str = ""
    info: dict[str, float] = field(default_factory=dict, compare=False)
    frames: dict[int, FrameHint] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        if not self.segments:
            raise SequenceError("A pulse sequence needs at least one segment", sequence=self.name)
        if self.n_repeats < 1:
            raise SequenceError(f"n_repeats must be positive, got {self.n_repeats}", sequence=self.name)
        if self.cycle_time == 0.0 and not (len(self.segments) == 1 and self.segments[0].rotation is not None):
            raise SequenceError("Zero cycle time is only allowed for a single ideal rotation", sequence=self.name)

    @property
    def cycle_time(self) -> float:
        return float(sum(segment.duration for segment in self.segments))

    def planes_referenced(self) -> set[int]:
        planes: set[int] = set()
        for segment in self.segments:
            planes |= segment.planes_referenced()
        return planes

    def with_repeats(self, n_repeats: int) -> "PulseSequence":
        return PulseSequence(
            self.segments, n_repeats=n_repeats, name=self.name, info=dict(self.info), frames=dict(self.frames)
        )


def check_targets(seq: PulseSequence, model: SpinSystemModel) -> None:
    """Reject sequences addressing planes the model does not contain."""
    missing = sorted(seq.planes_referenced() - set(model.planes()))
    if missing:
        raise SequenceError(f"Sequence targets planes {missing} absent from the model", sequence=seq.name)


def single_spin_field(field_hz: np.ndarray) -> np.ndarray:
    return 2.0 * math.pi * (
        field_hz[0] * SINGLE_SPIN["x"] + field_hz[1] * SINGLE_SPIN["y"] + field_hz[2] * SINGLE_SPIN["z"]
    )


def segment_fields(segment: PulseSegment, model: SpinSystemModel) -> list[np.ndarray]:
    """Field vector (Hz) on every spin of the model for one segment."""
    return [segment.field_for_plane(site.plane_index) for site in model.sites]


def single_spin_sum(local_terms: list[np.ndarray]) -> np.ndarray:
    """``sum_i 1 x ... x h_i x ... x 1`` for 2x2 local terms ``h_i``."""
    n = len(local_terms)
    matrix = np.zeros((2**n, 2**n), dtype=complex)
    for i, term in enumerate(local_terms):
        if not np.any(term):
            continue
        matrix += np.kron(np.kron(np.eye(2**i), term), np.eye(2 ** (n - i - 1)))
    return matrix


def rf_hamiltonian(seq: PulseSequence, segment_index: int, model: SpinSystemModel) -> Operator:
    """
    Rotating-frame rf Hamiltonian of one segment, in rad/s.

    Args:
        seq: Pulse sequence
        segment_index: Segment to evaluate
        model: Spin system supplying the plane of every spin

    Returns:
        Hermitian operator; zero for segments without channels or for ideal rotations
    """
    if not 0 <= segment_index < len(seq.segments):
        raise SequenceError(f"Segment index {segment_index} out of range", sequence=seq.name)
    check_targets(seq, model)
    segment = seq.segments[segment_index]
    local = [single_spin_field(f) for f in segment_fields(segment, model)]
    return Operator(single_spin_sum(local), f"H_rf[{segment_index}]")


def single_spin_rotation(angle: float, axis: tuple[float, float, float] | np.ndarray) -> np.ndarray:
    """``exp(-i angle u.I) = cos(angle/2) 1 - i sin(angle/2) u.sigma`` as a 2x2 matrix."""
    u = np.asarray(axis, dtype=float)
    sigma_u = 2.0 * (u[0] * SINGLE_SPIN["x"] + u[1] * SINGLE_SPIN["y"] + u[2] * SINGLE_SPIN["z"])
    return math.cos(angle / 2.0) * np.eye(2, dtype=complex) - 1j * math.sin(angle / 2.0) * sigma_u


def rotation_unitary(rotation: IdealRotation, model: SpinSystemModel) -> Operator:
    """Propagator of an ideal rotation on the model's spins in the targeted planes."""
    absent = sorted(set(rotation.target or ()) - set(model.planes()))
    if absent:
        raise SequenceError(f"Rotation targets planes {absent} absent from the model")
    local = single_spin_rotation(rotation.angle, rotation.axis)
    matrix = np.array([[1.0]], dtype=complex)
    for site in model.sites:
        hit = rotation.target is None or site.plane_index in rotation.target
        matrix = np.kron(matrix, local if hit else np.eye(2, dtype=complex))
    return Operator(matrix, f"R({rotation.angle:.4g})")

"""
Sequence library: Lee-Goldburg, MREV-8, selective pulses and double irradiation.
"""

import logging
import math
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from hapq.core.exceptions import SequenceError
from hapq.sequences.pulses import (
    FrameHint,
    IdealRotation,
    PulseChannel,
    PulseSegment,
    PulseSequence,
    single_spin_field,
    single_spin_sum,
)
from hapq.spins.evolution import evolve, polarized_state, propagator, z_polarization
from hapq.spins.model import SpinSystemModel
from hapq.spins.operators import Operator

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
SQRT3_2 = math.sqrt(1.5)

# X, -Y, Y, -X, -X, -Y, Y, X
MREV8_PHASES = (0.0, 1.5 * math.pi, 0.5 * math.pi, math.pi, math.pi, 1.5 * math.pi, 0.5 * math.pi, 0.0)
# Free-evolution windows in units of tau: one before each pulse plus the closing window
MREV8_WINDOWS = (1, 1, 2, 1, 2, 1, 2, 1, 1)


def _require_positive(value: float, name: str, sequence: str) -> None:
    if not (value > 0.0 and math.isfinite(value)):
        raise SequenceError(f"{name} must be positive and finite, got {value}", sequence=sequence)


def lee_goldburg(
    amplitude_hz: float,
    n_cycles: int = 1,
    sign: int = 1,
    alternate: bool = False,
    target: int | tuple[int, ...] | None = None,
) -> PulseSequence:
    """
    Lee-Goldburg off-resonance irradiation.

    The offset ``amplitude_hz/sqrt(2)`` tilts the effective field to the magic angle
    from +z (``sign=-1`` gives the supplementary 125.26 deg orientation). One cycle is one
    full precession about the effective field, ``1/nu_eff`` with ``nu_eff = amplitude*sqrt(3/2)``.

    Args:
        amplitude_hz: rf amplitude nu1
        n_cycles: Number of cycles
        sign: +1 or -1, sign of the offset
        alternate: Frequency-switched variant, a +offset cycle then a -offset cycle with
            the rf phase inverted, so the cycle doubles
        target: Planes to irradiate (all planes if None)

    Returns:
        The pulse sequence
    """
    _require_positive(amplitude_hz, "amplitude_hz", "lee_goldburg")
    if sign not in (1, -1):
        raise SequenceError(f"sign must be +1 or -1, got {sign}", sequence="lee_goldburg")
    offset = sign * amplitude_hz / SQRT2
    period = 1.0 / (amplitude_hz * SQRT3_2)

    segments = [PulseSegment(period, (PulseChannel(target, offset, amplitude_hz, 0.0),))]
    if alternate:
        segments.append(PulseSegment(period, (PulseChannel(target, -offset, amplitude_hz, math.pi),)))
    return PulseSequence(
        tuple(segments),
        n_repeats=n_cycles,
        name="lg-fslg" if alternate else "lg",
        info={"amplitude_hz": amplitude_hz, "offset_hz": offset, "nu_eff_hz": amplitude_hz * SQRT3_2},
    )


def lg_tilt_angle(amplitude_hz: float, offset_hz: float) -> float:
    """Angle of the effective field from +z, ``atan2(nu1, offset)``."""
    return math.atan2(amplitude_hz, offset_hz)


def mrev8(
    tau: float,
    n_cycles: int = 1,
    ideal_pulses: bool = True,
    pulse_fraction: float = 0.2,
    plane: int | None = None,
) -> PulseSequence:
    """
    MREV-8 multiple-pulse cycle of eight 90 degree pulses, cycle time ``12*tau``.

    Args:
        tau: Base window
        n_cycles: Number of cycles
        ideal_pulses: Instantaneous rotations if True, otherwise finite pulses of width
            ``pulse_fraction*tau`` placed at the start of the following window
        pulse_fraction: Pulse width as a fraction of tau (finite pulses only)
        plane: Apply selectively to one plane (all planes if None)

    Returns:
        The pulse sequence
    """
    _require_positive(tau, "tau", "mrev8")
    if not ideal_pulses and not 0.0 < pulse_fraction < 1.0:
        raise SequenceError(f"pulse_fraction must lie in (0, 1), got {pulse_fraction}", sequence="mrev8")

    segments: list[PulseSegment] = [PulseSegment(MREV8_WINDOWS[0] * tau)]
    width = pulse_fraction * tau
    for phase, window in zip(MREV8_PHASES, MREV8_WINDOWS[1:]):
        if ideal_pulses:
            segments.append(PulseSegment(0.0, rotation=IdealRotation.in_plane(math.pi / 2, phase, plane)))
            segments.append(PulseSegment(window * tau))
        else:
            channel = PulseChannel(plane, 0.0, 1.0 / (4.0 * width), phase)
            segments.append(PulseSegment(width, (channel,)))
            segments.append(PulseSegment(window * tau - width))

    return PulseSequence(
        tuple(segments),
        n_repeats=n_cycles,
        name="mrev8",
        info={"tau_s": tau, "pulse_width_s": 0.0 if ideal_pulses else width},
    )


def selective_pulse(
    plane: int,
    angle: float,
    phase: float = 0.0,
    amplitude_hz: float | None = None,
    available_planes: Iterable[int] | None = None,
) -> PulseSequence:
    """
    Rotation of one plane about the in-plane axis at ``phase``.

    An ideal (instantaneous) rotation when ``amplitude_hz`` is None, otherwise an
    on-resonance rectangular pulse of duration ``angle/(2*pi*amplitude_hz)``.
    """
    if available_planes is not None and plane not in set(available_planes):
        raise SequenceError(f"Unknown plane {plane}", sequence="selective_pulse")
    if amplitude_hz is None or angle == 0.0:
        return PulseSequence(
            (PulseSegment(0.0, rotation=IdealRotation.in_plane(angle, phase, plane)),), name="selective"
        )
    _require_positive(amplitude_hz, "amplitude_hz", "selective_pulse")
    if angle < 0:
        angle, phase = -angle, phase + math.pi
    duration = angle / (2.0 * math.pi * amplitude_hz)
    return PulseSequence(
        (PulseSegment(duration, (PulseChannel(plane, 0.0, amplitude_hz, phase),)),),
        name="selective",
        info={"angle_rad": angle, "amplitude_hz": amplitude_hz},
    )


@dataclass(frozen=True)
class CommensurateWindow:
    """Averaging window over which every effective precession closes (nearly) on 2*pi."""

    window_s: float
    cycles_of_slowest: int
    residual_rad: float
    converged: bool


def commensurate_window(
    frequencies_hz: Iterable[float], tolerance_rad: float = 1e-3, max_cycles: int = 10_000
) -> CommensurateWindow:
    """
    Smallest multiple of the slowest period after which all phases are near multiples of 2*pi.

    Args:
        frequencies_hz: Precession frequencies (zeros are ignored)
        tolerance_rad: Accepted phase residual
        max_cycles: Search cap in periods of the slowest frequency

    Returns:
        The window; when the cap is hit, the best window found with ``converged=False``
    """
    freqs = sorted({abs(f) for f in frequencies_hz if f != 0.0})
    if not freqs:
        raise SequenceError("commensurate_window needs at least one nonzero frequency")
    slowest = freqs[0]

    best = CommensurateWindow(1.0 / slowest, 1, math.inf, False)
    for k in range(1, max_cycles + 1):
        window = k / slowest
        residual = max(
            (abs(2.0 * math.pi * (f * window - round(f * window))) for f in freqs[1:]),
            default=0.0,
        )
        if residual <= tolerance_rad:
            return CommensurateWindow(window, k, residual, True)
        if residual < best.residual_rad:
            best = CommensurateWindow(window, k, residual, False)

    logger.warning(
        f"No commensurate window within {max_cycles} cycles; using {best.window_s:.6g} s "
        f"with phase residual {best.residual_rad:.3g} rad"
    )
    return best


RECOUPLE_STEPS_PER_TURN = 32
# Phase steps per half cycle before a sequence is rejected as too long
MAX_RECOUPLE_STEPS = 4096


def lg_axis(sign: int = 1) -> np.ndarray:
    """Unit LG effective-field axis z̄, at the magic angle from +z (supplementary for ``sign=-1``)."""
    return np.array([1.0, 0.0, sign / SQRT2]) / SQRT3_2


def toggling_frequencies(selective_hz: float, lg_hz: float) -> list[float]:
    """Precession frequencies of a doubly irradiated plane: ``nu_s, nu_lg, nu_lg +- nu_s``."""
    return [selective_hz, lg_hz, lg_hz + selective_hz, abs(lg_hz - selective_hz)]


def _matches(value: float, others: Iterable[float]) -> bool:
    return any(math.isclose(value, other, rel_tol=1e-6) for other in others)


def check_recoupling_frequencies(
    nu_a: float, nu_b: float, nu_lg: float, nu_broadband: float | None = None, sequence: str = "recouple"
) -> None:
    """
    Reject field ratios whose precessions resonate.

    Planes A and B may share only the LG frequency; each plane's own frequencies must be
    distinct and nonzero, and the broadband field must match none of them.

    Raises:
        SequenceError: Naming the coinciding frequencies
    """
    freqs_a = toggling_frequencies(nu_a, nu_lg)
    freqs_b = toggling_frequencies(nu_b, nu_lg)
    for label, freqs in (("A", freqs_a), ("B", freqs_b)):
        if any(math.isclose(f, 0.0, abs_tol=1e-6 * nu_lg) for f in freqs):
            raise SequenceError(f"Plane {label} selective field equals the LG field ({nu_lg:.6g} Hz)", sequence=sequence)
        for k, f in enumerate(freqs):
            if _matches(f, freqs[k + 1 :]):
                raise SequenceError(f"Plane {label} precessions coincide at {f:.6g} Hz", sequence=sequence)
    shared = [f for f in freqs_a[:1] + freqs_a[2:] if _matches(f, freqs_b)]
    if shared:
        raise SequenceError(f"Planes A and B resonate at {shared[0]:.6g} Hz besides the LG frequency", sequence=sequence)
    if nu_broadband is not None and _matches(nu_broadband, freqs_a + freqs_b):
        raise SequenceError(f"Broadband LG at {nu_broadband:.6g} Hz resonates with a recoupled plane", sequence=sequence)


def double_irradiation(
    plane_a: int,
    plane_b: int,
    amplitude_hz: float,
    duration: float,
    b_ratio: float = 2.0,
    lg_ratio: float = 6.0,
    decoupling_ratio: float = 3.0,
    broadband: bool = True,
    sign: int = 1,
    steps_per_turn: int = RECOUPLE_STEPS_PER_TURN,
    available_planes: Iterable[int] | None = None,
    tolerance_rad: float = 1e-3,
    max_cycles: int = 10_000,
) -> PulseSequence:
    """
    Recoupling of planes A and B by double irradiation under broadband LG.

    Planes A and B carry an LG field of ``lg_ratio*amplitude_hz`` along the magic-angle
    axis z̄ plus a selective field co-rotating with the LG precession, so that in the doubly
    rotating frame it stands still along x̄ (144.7 deg from +z): ``amplitude_hz`` on A,
    ``b_ratio*amplitude_hz`` on B. Every other plane gets broadband LG with effective field
    ``decoupling_ratio*amplitude_hz``. The co-rotating field is phase-stepped,
    ``steps_per_turn`` steps per LG turn, with its amplitude raised by the inverse sinc of
    half a step so the stepped field averages to the requested one.

    Half a cycle is one commensurate window of all effective fields; the second half is
    its mirror image (segments reversed, fields inverted), so the rf propagator of a full
    cycle is the identity. Cycles are repeated to approximate ``duration``.

    Args:
        plane_a: First plane
        plane_b: Second plane
        amplitude_hz: Selective field on plane A in the doubly rotating frame
        duration: Requested total irradiation time
        b_ratio: Plane B selective field relative to plane A's
        lg_ratio: LG field of planes A and B relative to ``amplitude_hz``
        decoupling_ratio: Broadband LG effective field relative to ``amplitude_hz``
        broadband: Add broadband LG on every other plane
        sign: Sign of the LG offsets
        steps_per_turn: Phase steps per LG turn
        available_planes: Planes that exist (unchecked if None)
        tolerance_rad: Commensuration tolerance
        max_cycles: Commensuration search cap

    Returns:
        The pulse sequence; ``info`` records the windows, residual and frequencies and
        ``frames`` the doubly rotating frame of planes A and B

    Raises:
        SequenceError: On equal or unknown planes, nonpositive inputs, resonant field
            ratios or a half cycle needing more than ``MAX_RECOUPLE_STEPS`` steps
    """
    name = "recouple"
    if plane_a == plane_b:
        raise SequenceError(f"Double irradiation needs two distinct planes, got {plane_a} twice", sequence=name)
    if available_planes is not None:
        missing = sorted({plane_a, plane_b} - set(available_planes))
        if missing:
            raise SequenceError(f"Unknown planes {missing}", sequence=name)
    _require_positive(amplitude_hz, "amplitude_hz", name)
    _require_positive(duration, "duration", name)
    for value, label in ((b_ratio, "b_ratio"), (lg_ratio, "lg_ratio"), (decoupling_ratio, "decoupling_ratio")):
        _require_positive(value, label, name)
    if sign not in (1, -1):
        raise SequenceError(f"sign must be +1 or -1, got {sign}", sequence=name)
    if steps_per_turn < 4:
        raise SequenceError(f"steps_per_turn must be at least 4, got {steps_per_turn}", sequence=name)

    nu_a, nu_b, nu_lg = amplitude_hz, b_ratio * amplitude_hz, lg_ratio * amplitude_hz
    nu_broadband = decoupling_ratio * amplitude_hz if broadband else None
    check_recoupling_frequencies(nu_a, nu_b, nu_lg, nu_broadband, sequence=name)

    frequencies = [nu_a, nu_b, nu_lg] + ([nu_broadband] if nu_broadband is not None else [])
    half = commensurate_window(frequencies, tolerance_rad, max_cycles)
    n_steps = max(1, round(nu_lg * half.window_s)) * steps_per_turn
    if n_steps > MAX_RECOUPLE_STEPS:
        raise SequenceError(
            f"Half cycle of {half.window_s:.6g} s needs {n_steps} phase steps (limit {MAX_RECOUPLE_STEPS}); "
            "use rational field ratios",
            sequence=name,
        )
    step = half.window_s / n_steps

    z_bar = lg_axis(sign)
    x_bar = np.cross(np.array([0.0, 1.0, 0.0]), z_bar)
    x_bar /= np.linalg.norm(x_bar)
    y_bar = np.cross(z_bar, x_bar)
    half_step = math.pi / steps_per_turn
    boost = half_step / math.sin(half_step)

    forward: list[list[tuple[int | None, np.ndarray]]] = []
    for k in range(n_steps):
        phase = 2.0 * math.pi * nu_lg * (k + 0.5) * step
        rotating = boost * (math.cos(phase) * x_bar + math.sin(phase) * y_bar)
        fields: list[tuple[int | None, np.ndarray]] = [
            (plane_a, nu_lg * z_bar + nu_a * rotating),
            (plane_b, nu_lg * z_bar + nu_b * rotating),
        ]
        if nu_broadband is not None:
            fields.append((None, nu_broadband * z_bar))
        forward.append(fields)

    segments = [PulseSegment(step, tuple(PulseChannel.from_field(t, f) for t, f in fields)) for fields in forward]
    segments += [
        PulseSegment(step, tuple(PulseChannel.from_field(t, -f) for t, f in fields)) for fields in reversed(forward)
    ]
    window = 2.0 * half.window_s
    n_repeats = max(1, round(duration / window))
    logger.debug(
        f"Double irradiation of planes {plane_a}, {plane_b}: {len(segments)} steps, window {window:.6g} s "
        f"x {n_repeats}, residual {half.residual_rad:.3g} rad"
    )
    return PulseSequence(
        tuple(segments),
        n_repeats=n_repeats,
        name=name,
        info={
            "plane_a": plane_a,
            "plane_b": plane_b,
            "half_window_s": half.window_s,
            "window_s": window,
            "residual_rad": half.residual_rad,
            "requested_duration_s": duration,
            "duration_s": window * n_repeats,
            "nu_eff_a_hz": nu_a,
            "nu_eff_b_hz": nu_b,
            "nu_lg_hz": nu_lg,
            "nu_broadband_hz": nu_broadband or 0.0,
            "steps_per_half": n_steps,
        },
        frames={plane_a: FrameHint(tuple(z_bar), nu_a), plane_b: FrameHint(tuple(z_bar), nu_b)},  # type: ignore[arg-type]
    )


@dataclass(frozen=True)
class ChannelFrequency:
    channel: int
    plane: int | None
    frequency_hz: float
    amplitude_hz: float


def channel_frequencies_hz(seq: PulseSequence, model: SpinSystemModel) -> list[ChannelFrequency]:
    """
    Frequency of every channel relative to the carrier.

    A selective channel sits at its planes' resonance plus its own offset; a broadband
    channel is referenced to the carrier plane.
    """
    result = []
    index = 0
    for segment in seq.segments:
        for channel in segment.channels:
            planes = channel.target if channel.target is not None else (None,)
            for plane in planes:
                base = model.plane_offset_hz(plane) if plane is not None else 0.0
                result.append(ChannelFrequency(index, plane, base + channel.offset_hz, channel.amplitude_hz))
            index += 1
    return result


@dataclass(frozen=True)
class ExcitationPoint:
    plane: int
    offset_hz: float
    depolarization: float
    off_resonance_factor: float


def excitation_profile(
    model: SpinSystemModel, plane: int, angle: float, phase: float, amplitude_hz: float
) -> list[ExcitationPoint]:
    """
    Effect of a finite selective pulse on every plane of the model.

    The pulse is simulated in the frame of the target plane, where every other plane sits
    at its gradient offset and sees the same rf. Couplings are ignored. Per plane the
    measured depolarization ``1 - <2Iz>`` (from full +z polarization) is reported next to
    the off-resonance factor ``nu1^2/(nu1^2 + offset^2)``.
    """
    if plane not in model.planes():
        raise SequenceError(f"Unknown plane {plane}", sequence="selective_pulse")
    pulse = selective_pulse(plane, angle, phase, amplitude_hz)
    duration = pulse.cycle_time
    reference = model.plane_offset_hz(plane)

    local = []
    for site in model.sites:
        offset = model.plane_offset_hz(site.plane_index) - reference
        local.append(
            single_spin_field(
                np.array([amplitude_hz * math.cos(phase), amplitude_hz * math.sin(phase), offset])
            )
        )
    h = Operator(single_spin_sum(local), "H_pulse")
    state = evolve(polarized_state(model.n, "z"), propagator(h, duration))

    points = []
    for p in model.planes():
        offset = model.plane_offset_hz(p) - reference
        polarization = z_polarization(state, model.n, model.spins_in_plane(p))
        points.append(
            ExcitationPoint(
                plane=p,
                offset_hz=offset,
                depolarization=1.0 - polarization,
                off_resonance_factor=amplitude_hz**2 / (amplitude_hz**2 + offset**2),
            )
        )
    return points

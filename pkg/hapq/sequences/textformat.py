"""
Line-oriented text format for pulse sequences and CSV export of average Hamiltonian reports.

One segment per line::

    # sequence name=lg n_repeats=10
    1.632993161855452e-05 | channel(target=all, offset_hz=35355.33905932738, amp_hz=50000.0, phase_rad=0.0)
    0.0 | rotation(target=0, axis=1.0 0.0 0.0, angle_rad=1.5707963267948966)

Floats are written with ``repr`` so a parsed sequence is identical to the written one.
"""

import csv
import re
from pathlib import Path

from hapq.core.exceptions import SequenceError
from hapq.sequences.averaging import EffectiveHamiltonianReport
from hapq.sequences.pulses import IdealRotation, PulseChannel, PulseSegment, PulseSequence
from hapq.utils.helpers import format_sig

_ITEM = re.compile(r"(channel|rotation)\(([^)]*)\)")


def _format_target(target: tuple[int, ...] | None) -> str:
    return "all" if target is None else " ".join(str(p) for p in target)


def _parse_target(text: str) -> tuple[int, ...] | None:
    text = text.strip()
    return None if text == "all" else tuple(int(p) for p in text.split())


def format_segment(segment: PulseSegment) -> str:
    items = []
    for c in segment.channels:
        items.append(
            f"channel(target={_format_target(c.target)}, offset_hz={c.offset_hz!r}, "
            f"amp_hz={c.amplitude_hz!r}, phase_rad={c.phase!r})"
        )
    if segment.rotation is not None:
        r = segment.rotation
        axis = " ".join(repr(float(a)) for a in r.axis)
        items.append(f"rotation(target={_format_target(r.target)}, axis={axis}, angle_rad={r.angle!r})")
    return f"{segment.duration!r} | {' '.join(items)}".rstrip()


def format_sequence(seq: PulseSequence) -> str:
    """Serialize a sequence, header line first."""
    lines = [f"# sequence name={seq.name or 'unnamed'} n_repeats={seq.n_repeats}"]
    lines.extend(format_segment(segment) for segment in seq.segments)
    return "\n".join(lines) + "\n"


def _fields(body: str, lineno: int) -> dict[str, str]:
    fields = {}
    for part in body.split(","):
        if not part.strip():
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise SequenceError(f"line {lineno}: expected key=value, got {part.strip()!r}")
        fields[key.strip()] = value.strip()
    return fields


def parse_sequence(text: str) -> PulseSequence:
    """
    Parse the text format.

    Args:
        text: Sequence text

    Returns:
        The pulse sequence

    Raises:
        SequenceError: On malformed lines, naming the line number
    """
    name, n_repeats = "", 1
    segments = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("sequence"):
                for token in line[1:].split()[1:]:
                    key, _, value = token.partition("=")
                    if key == "name":
                        name = "" if value == "unnamed" else value
                    elif key == "n_repeats":
                        n_repeats = int(value)
            continue

        duration_text, sep, rest = line.partition("|")
        if not sep:
            raise SequenceError(f"line {lineno}: expected 'duration_s | items'")
        try:
            duration = float(duration_text)
            channels, rotation = [], None
            consumed = _ITEM.sub("", rest).strip()
            if consumed:
                raise SequenceError(f"line {lineno}: unrecognized text {consumed!r}")
            for kind, body in _ITEM.findall(rest):
                fields = _fields(body, lineno)
                if kind == "channel":
                    channels.append(
                        PulseChannel(
                            target=_parse_target(fields.get("target", "all")),
                            offset_hz=float(fields.get("offset_hz", 0.0)),
                            amplitude_hz=float(fields.get("amp_hz", 0.0)),
                            phase=float(fields.get("phase_rad", 0.0)),
                        )
                    )
                else:
                    axis = tuple(float(a) for a in fields.get("axis", "1 0 0").split())
                    if len(axis) != 3:
                        raise SequenceError(f"line {lineno}: rotation axis needs 3 components")
                    rotation = IdealRotation(
                        angle=float(fields["angle_rad"]),
                        axis=axis,  # type: ignore[arg-type]
                        target=_parse_target(fields.get("target", "all")),
                    )
            segments.append(PulseSegment(duration, tuple(channels), rotation))
        except SequenceError as e:
            if not e.message.startswith("line "):
                raise SequenceError(f"line {lineno}: {e.message}") from e
            raise
        except (KeyError, ValueError) as e:
            raise SequenceError(f"line {lineno}: {e}") from e

    return PulseSequence(tuple(segments), n_repeats=n_repeats, name=name)


def load_sequence(path: str | Path) -> PulseSequence:
    path = Path(path)
    if not path.is_file():
        raise SequenceError(f"Sequence file not found: {path}")
    return parse_sequence(path.read_text(encoding="utf-8"))


def report_rows(report: EffectiveHamiltonianReport) -> list[tuple[str, float]]:
    """``(term_label, coefficient_hz)`` rows: product terms, then effective fields and residual."""
    rows = [(term.label, term.coefficient_hz) for term in report.decomposition]
    rows.extend((f"weff:I{spin}z'", value) for spin, value in sorted(report.effective_fields.items()))
    rows.append(("identity", report.identity_hz))
    rows.append(("residual_norm", report.residual_norm))
    return rows


def report_to_csv(report: EffectiveHamiltonianReport, path: str | Path) -> None:
    """Write the report as CSV with columns term_label, coefficient_hz."""
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["term_label", "coefficient_hz"])
        for label, value in report_rows(report):
            writer.writerow([label, format_sig(value)])

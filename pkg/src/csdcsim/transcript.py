"""Line-oriented session transcripts.

One tab-separated record per observable protocol event:

    seq <TAB> phase <TAB> actor <TAB> action <TAB> detail

Sequence numbers start at 1 and increase by 1.  Files are UTF-8 with
LF line endings and no header, so two runs with the same configuration
and seed compare byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

FIELD_SEP = "\t"


@dataclass(frozen=True)
class TranscriptRecord:
    seq: int
    phase: str
    actor: str
    action: str
    detail: str

    def __post_init__(self) -> None:
        if self.seq < 1:
            raise ValueError("sequence numbers start at 1")
        for field in (self.phase, self.actor, self.action, self.detail):
            if FIELD_SEP in field or "\n" in field or "\r" in field:
                raise ValueError(f"transcript field contains a separator: {field!r}")


def format_line(record: TranscriptRecord) -> str:
    return FIELD_SEP.join(
        (str(record.seq), record.phase, record.actor, record.action, record.detail)
    )


def parse_line(line: str) -> TranscriptRecord:
    parts = line.rstrip("\n").split(FIELD_SEP)
    if len(parts) != 5:
        raise ValueError(f"expected 5 tab-separated fields, got {len(parts)}")
    return TranscriptRecord(int(parts[0]), parts[1], parts[2], parts[3], parts[4])


def format_transcript(records: Iterable[TranscriptRecord]) -> str:
    return "".join(format_line(r) + "\n" for r in records)


def parse_transcript(text: str) -> list[TranscriptRecord]:
    return [parse_line(line) for line in text.splitlines()]

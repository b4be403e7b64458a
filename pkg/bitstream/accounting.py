# File: bitstream/accounting.py

"""Exact byte accounting of FCMS streams."""
from dataclasses import asdict, dataclass

from featurecodec.exceptions import CorruptStream
from signaling.params import MINMAX_BYTES
from .container import LENGTH_PREFIX_BYTES, demux

CATEGORIES = ('header', 'stats', 'minmax', 'framing', 'payload')


@dataclass(frozen=True)
class BitrateReport:
    header_bytes: int
    stats_bytes: int
    minmax_bytes: int
    framing_bytes: int
    payload_bytes: int
    frame_count: int
    coded_frames: int
    fps: float

    @property
    def total_bytes(self):
        return (
            self.header_bytes + self.stats_bytes + self.minmax_bytes
            + self.framing_bytes + self.payload_bytes
        )

    @property
    def total_bits(self):
        return 8 * self.total_bytes

    @property
    def overhead_bytes(self):
        """Normalization side information: statistics or MinMax"""
        return self.stats_bytes + self.minmax_bytes

    @property
    def kbps(self):
        return self.total_bits * self.fps / self.frame_count / 1000.0

    def split(self):
        return {name: getattr(self, f'{name}_bytes') for name in CATEGORIES}

    def as_dict(self):
        data = asdict(self)
        data.update(total_bytes=self.total_bytes, kbps=self.kbps)
        return data


def accounting(stream, bitstream=None):
    """
    Split a stream's size into header, statistics, MinMax, length-prefix and
    payload bytes. Pass an already demuxed ``bitstream`` to skip re-parsing.
    """
    if bitstream is None:
        bitstream = demux(stream)
    header = bitstream.header
    coded = len(bitstream.records)
    report = BitrateReport(
        header_bytes=header.size,
        stats_bytes=len(bitstream.stats) * header.stats_segment_size,
        minmax_bytes=sum(MINMAX_BYTES for r in bitstream.records if r.minmax is not None),
        framing_bytes=LENGTH_PREFIX_BYTES * coded,
        payload_bytes=sum(len(r.payload) for r in bitstream.records),
        frame_count=header.frame_count,
        coded_frames=coded,
        fps=float(header.fps),
    )
    if report.total_bytes != len(stream):
        raise CorruptStream(f"accounted {report.total_bytes} bytes for a {len(stream)}-byte stream")
    return report

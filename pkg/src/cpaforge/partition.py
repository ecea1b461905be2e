"""Three-region split of the final-adder span and per-region adder choice.

Region 1 is the rising (positive-slope) part of the arrival profile, region
2 the flat middle and region 3 the falling tail.  Partitions come either
from a measured profile (:func:`detect_regions`) or from the closed-form
widths n/2, n + 2**x and the remainder (:func:`closed_form_partition`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from .adders import AdderKind
from .timing import ArrivalProfile

log = logging.getLogger(__name__)

Range = tuple[int, int]  # inclusive; (s, s - 1) is empty


class PartitionError(ValueError):
    pass


class DegenerateProfile(PartitionError):
    """The classifier found no flat or falling part; widen epsilon."""


def _width(r: Range) -> int:
    return r[1] - r[0] + 1


@dataclass(frozen=True)
class RegionPartition:
    n: int
    r1: Range
    r2: Range
    r3: Range

    def __post_init__(self):
        span = 2 * self.n
        r1, r2, r3 = self.r1, self.r2, self.r3
        if (r1[0], r2[0], r3[0]) != (0, r1[1] + 1, r2[1] + 1) or r3[1] != span - 1:
            raise PartitionError(f"ranges {r1} {r2} {r3} do not tile 0..{span - 1}")
        if min(self.widths) < 0:
            raise PartitionError(f"negative region width in {self.widths}")

    @classmethod
    def from_widths(cls, n: int, widths: Sequence[int]) -> "RegionPartition":
        w1, w2, w3 = widths
        if w1 + w2 + w3 != 2 * n:
            raise PartitionError(f"widths {tuple(widths)} do not sum to {2 * n}")
        return cls(n, (0, w1 - 1), (w1, w1 + w2 - 1), (w1 + w2, 2 * n - 1))

    @property
    def widths(self) -> tuple[int, int, int]:
        return _width(self.r1), _width(self.r2), _width(self.r3)

    def merged(self) -> "RegionPartition":
        """The partition with region 3 folded into region 2."""
        return RegionPartition.from_widths(self.n, (self.widths[0], self.widths[1] + self.widths[2], 0))

    def to_dict(self) -> dict:
        return {"n": self.n, "r1": list(self.r1), "r2": list(self.r2), "r3": list(self.r3), "widths": list(self.widths)}

    @classmethod
    def from_dict(cls, d) -> "RegionPartition":
        return cls(int(d["n"]), tuple(d["r1"]), tuple(d["r2"]), tuple(d["r3"]))


def _classify(d: float, eps: float) -> int:
    if d > eps:
        return 1
    if d < -eps:
        return -1
    return 0


def detect_regions(profile: ArrivalProfile, epsilon: float) -> RegionPartition:
    """Rising prefix / flat middle / falling suffix of a measured profile.

    Bit i joins region 1 while the step to bit i+1 rises; single flat steps
    between rises are tolerated, two in a row end the region.  Bit i joins
    region 3 while the step into it from bit i-1 falls.  A one-bit region 3
    is folded into region 2.
    """
    arr = profile.arrivals
    if len(arr) < 4:
        raise PartitionError(f"profile too short ({len(arr)} bits)")
    if epsilon < 0:
        raise PartitionError("epsilon must be >= 0")
    steps = [_classify(arr[i + 1] - arr[i], epsilon) for i in range(len(arr) - 1)]

    end1 = 0  # bits [0, end1) are region 1
    i = 0
    while i < len(steps):
        if steps[i] == 1:
            i += 1
            end1 = i
        elif steps[i] == 0 and i + 1 < len(steps) and steps[i + 1] == 1:
            i += 1  # lone flat inside the rise
        else:
            break

    if end1 >= len(arr) - 1:
        raise DegenerateProfile("profile rises to the last bit at this epsilon")
    start3 = len(arr)
    while start3 - 1 > end1 and steps[start3 - 2] == -1:
        start3 -= 1
    if start3 == len(arr) - 1:
        start3 = len(arr)
    return RegionPartition.from_widths(profile.n, (end1, start3 - end1, len(arr) - start3))


def closed_form_partition(n: int) -> RegionPartition:
    """Widths floor(n/2), n + 2**x with x = floor(log2 n) - 2, and the remainder of 2n."""
    if n < 4:
        raise PartitionError(f"closed-form partition needs n >= 4, got {n}")
    w1 = n // 2
    w2 = n + 2 ** (int(math.log2(n)) - 2)
    return RegionPartition.from_widths(n, (w1, w2, 2 * n - w1 - w2))


@dataclass(frozen=True)
class RegionRecommendation:
    partition: RegionPartition  # region 3 empty when folded into region 2
    kinds: tuple[AdderKind, ...]  # one per non-empty region

    @property
    def widths(self) -> tuple[int, ...]:
        return tuple(w for w in self.partition.widths if w > 0)

    def to_dict(self) -> dict:
        return {"partition": self.partition.to_dict(), "kinds": [k.value for k in self.kinds]}


def recommend(partition: RegionPartition, n: int | None = None) -> RegionRecommendation:
    """RCA / BCSLA / BCLA over the three regions.

    With no usable third region (empty, a single bit, or n <= 8 where the
    tail is folded into the middle) the middle and tail become one BCLA
    region after the RCA.
    """
    n = partition.n if n is None else n
    if sum(w > 0 for w in partition.widths) == 1:
        log.warning("single-region partition %s: falling back to RCA", partition.widths)
        return RegionRecommendation(partition, (AdderKind.RCA,))
    if partition.widths[2] <= 1 or n <= 8:
        partition = partition.merged()
        order = (AdderKind.RCA, AdderKind.BCLA)
    else:
        order = (AdderKind.RCA, AdderKind.BCSLA, AdderKind.BCLA)
    return RegionRecommendation(partition, tuple(k for k, w in zip(order, partition.widths) if w > 0))


def compare_table(profile: ArrivalProfile | None, detected: RegionPartition, closed_form: RegionPartition) -> dict:
    """Signed bit offsets (closed form minus detected) of the two region boundaries."""
    if detected.n != closed_form.n or (profile is not None and profile.n != detected.n):
        raise PartitionError("partitions are for different operand widths")
    offsets = {
        "r1_end": closed_form.r1[1] - detected.r1[1],
        "r2_end": closed_form.r2[1] - detected.r2[1],
    }
    report = {
        "n": detected.n,
        "detected": detected.to_dict(),
        "closed_form": closed_form.to_dict(),
        "offsets": offsets,
        "width_deltas": [c - d for c, d in zip(closed_form.widths, detected.widths)],
    }
    if profile is not None:
        report["boundary_arrivals"] = {
            "detected": [profile[detected.r1[1]] if detected.r1[1] >= 0 else None, profile[detected.r2[1]]],
            "closed_form": [profile[closed_form.r1[1]] if closed_form.r1[1] >= 0 else None, profile[closed_form.r2[1]]],
        }
    return report

"""Closed-open character interval helpers shared by alignment and evaluation."""

from __future__ import annotations

from typing import Iterable, Sequence

Span = tuple[int, int]


def gap(a: Span, b: Span) -> int:
    """Distance between the nearest endpoints of two spans; <= 0 when they touch."""
    return max(a[0], b[0]) - min(a[1], b[1])


def overlaps(a: Span, b: Span) -> bool:
    return max(a[0], b[0]) < min(a[1], b[1])


def bounding(spans: Iterable[Span]) -> Span:
    begins, ends = zip(*spans)
    return (min(begins), max(ends))


def merge(spans: Iterable[Span]) -> list[Span]:
    """Union of spans as a sorted list of disjoint spans."""
    out: list[Span] = []
    for begin, end in sorted(spans):
        if out and begin <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], end))
        else:
            out.append((begin, end))
    return out


def total_length(merged: Sequence[Span]) -> int:
    return sum(end - begin for begin, end in merged)


def intersect_length(xs: Sequence[Span], ys: Sequence[Span]) -> int:
    """Total overlap between two merged (sorted, disjoint) span lists."""
    total = 0
    i = j = 0
    while i < len(xs) and j < len(ys):
        lo = max(xs[i][0], ys[j][0])
        hi = min(xs[i][1], ys[j][1])
        if lo < hi:
            total += hi - lo
        if xs[i][1] <= ys[j][1]:
            i += 1
        else:
            j += 1
    return total

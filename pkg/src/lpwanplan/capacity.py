"""Worst-case node and traffic densities for a shared unlicensed channel.

Two scenarios are covered:

* every transmitter talks to one receiver within radius ``d`` so at most
  one transmission per channel succeeds at a time (:func:`node_density`,
  :func:`traffic_density`);
* transmitters dropped uniformly in an ``h x h`` square succeed when they
  are further than ``d`` from earlier ones (:func:`distance_cdf`,
  :func:`expected_concurrent_transmitters`), whose large-square limit is
  again ``1 / (pi d^2)`` per channel.
"""

import math
from dataclasses import dataclass

__all__ = [
    "DensityInputs",
    "SquareField",
    "node_density",
    "traffic_density",
    "aggregate_capacity",
    "distance_cdf",
    "expected_concurrent_transmitters",
    "asymptotic_channel_density",
    "disc_area",
]


@dataclass(frozen=True)
class DensityInputs:
    """Inputs of the density model.

    ``duty_cycle`` is a fraction, ``radius`` in km, capacities in bit/s.
    ``aggregate_capacity`` defaults to ``channels * per_channel_capacity``.
    """

    duty_cycle: float
    channels: int
    radius: float
    per_channel_capacity: float | None = None
    aggregate_capacity: float | None = None

    def __post_init__(self):
        if not 0 < self.duty_cycle <= 1:
            raise ValueError(f"duty cycle must be in (0, 1], got {self.duty_cycle}")
        if self.channels < 1:
            raise ValueError(f"need at least one channel, got {self.channels}")
        if not self.radius > 0:
            raise ValueError(f"radius must be > 0 km, got {self.radius}")
        if self.per_channel_capacity is not None:
            total = self.channels * self.per_channel_capacity
            if self.aggregate_capacity is None:
                object.__setattr__(self, "aggregate_capacity", total)
            elif not math.isclose(self.aggregate_capacity, total, rel_tol=1e-12):
                raise ValueError(
                    f"aggregate capacity {self.aggregate_capacity} != "
                    f"{self.channels} x {self.per_channel_capacity}"
                )

    @property
    def area(self):
        return disc_area(self.radius)

    @property
    def node_density(self):
        return node_density(self.channels, self.duty_cycle, self.radius)

    @property
    def traffic_density(self):
        if self.aggregate_capacity is None:
            raise ValueError("aggregate capacity unknown")
        return traffic_density(self.aggregate_capacity, self.radius)


@dataclass(frozen=True)
class SquareField:
    """Square of side ``side`` km with exclusion distance ``exclusion`` km."""

    side: float
    exclusion: float

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError(f"side must be > 0, got {self.side}")
        if not 0 < self.exclusion <= self.side:
            raise ValueError(
                f"exclusion distance must be in (0, side], got {self.exclusion}"
            )

    def cdf(self):
        return distance_cdf(self.exclusion, self.side)

    def expected_concurrent(self, formula="geometric"):
        return expected_concurrent_transmitters(self.exclusion, self.side, formula)


def disc_area(radius):
    return math.pi * radius * radius


def node_density(r, alpha, d):
    """Sustainable transmitters per km^2: ``(r / alpha) / (pi d^2)``.

    >>> round(node_density(9, 0.01, 10), 2)
    2.86
    """
    if alpha == 0:
        raise ValueError("duty cycle of 0 gives an unbounded density")
    if not 0 < alpha <= 1:
        raise ValueError(f"duty cycle must be in (0, 1], got {alpha}")
    if not d > 0:
        raise ValueError(f"radius must be > 0 km, got {d}")
    return r / (alpha * disc_area(d))


def traffic_density(C, d):
    """Aggregate bit/s per km^2 for one receiver of radius ``d`` km.

    Duty cycle does not enter: a single concurrent transmission per
    channel carries the full channel capacity.
    """
    if C < 0:
        raise ValueError(f"capacity must be >= 0, got {C}")
    if not d > 0:
        raise ValueError(f"radius must be > 0 km, got {d}")
    return C / disc_area(d)


def aggregate_capacity(per_channel):
    """Sum of ``count * capacity`` over ``(count, bps)`` channel groups."""
    total = 0
    for count, bps in per_channel:
        if count < 0:
            raise ValueError(f"channel count must be >= 0, got {count}")
        total += count * bps
    return total


def distance_cdf(d, h):
    """P(distance between two uniform points of an h x h square <= d).

    Only the ``0 <= d <= h`` branch is implemented:
    ``pi t^2 - 8/3 t^3 + t^4 / 2`` with ``t = d / h``.
    """
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    if not h > 0:
        raise ValueError(f"side must be > 0, got {h}")
    if d > h:
        raise ValueError(f"distance {d} exceeds side {h}; only d <= h is supported")
    t = d / h
    return t * t * (math.pi - t * (8.0 / 3.0 - t / 2.0))


def expected_concurrent_transmitters(d, h, formula="geometric"):
    """Expected number of transmitters that succeed on one channel.

    ``"geometric"`` sums ``(1 - F)^i`` from ``i = 0`` (the first
    transmitter always succeeds) and gives ``1 / F``; ``"paper"`` starts
    the sum at ``i = 1`` and gives ``(1 - F) / F``. They differ by one.
    """
    if formula not in ("geometric", "paper"):
        raise ValueError(f"formula must be 'geometric' or 'paper', got {formula!r}")
    if not d > 0:
        raise ValueError("d = 0 gives a divergent sum")
    F = distance_cdf(d, h)
    if formula == "geometric":
        return 1.0 / F
    return (1.0 - F) / F


def asymptotic_channel_density(d):
    """Large-square limit of successful transmitters per km^2 per channel."""
    if not d > 0:
        raise ValueError(f"radius must be > 0 km, got {d}")
    return 1.0 / disc_area(d)

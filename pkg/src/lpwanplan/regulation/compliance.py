"""Evaluate a transmission schedule against a region profile.

Duty limits are checked over every sliding window of the rule's period,
not calendar-aligned windows. Events straddling a window edge count
pro rata. All arithmetic is on integer microseconds and integer Hz.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .profiles import (
    Interval,
    OutOfBandError,
    for_variant,
    khz_to_hz,
    mhz_to_hz,
    s_to_us,
)

__all__ = [
    "VERDICTS",
    "TransmissionEvent",
    "TransmissionSchedule",
    "Verdict",
    "ComplianceReport",
    "applicable_power_limit",
    "duty_cycle",
    "max_window_on_time",
    "check_schedule",
    "load_schedule",
]

PASS, FAIL, NA, INDET = "pass", "fail", "not-applicable", "indeterminate"
VERDICTS = (PASS, FAIL, NA, INDET)
HOUR_US = 3_600_000_000


@dataclass(frozen=True)
class TransmissionEvent:
    start_s: float
    duration_s: float
    center_mhz: float
    bandwidth_khz: float
    power_dbm: float

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ValueError(f"event duration must be > 0, got {self.duration_s}")
        if not self.bandwidth_khz > 0:
            raise ValueError(f"event bandwidth must be > 0, got {self.bandwidth_khz}")
        if s_to_us(self.duration_s) < 1:
            raise ValueError("event duration is below 1 us")

    @property
    def start_us(self):
        return s_to_us(self.start_s)

    @property
    def end_us(self):
        return self.start_us + s_to_us(self.duration_s)

    @property
    def center_hz(self):
        return mhz_to_hz(self.center_mhz)

    @property
    def bandwidth_hz(self):
        return khz_to_hz(self.bandwidth_khz)

    @property
    def span_hz(self):
        """Occupied spectrum ``[center - bw/2, center + bw/2]`` in Hz."""
        half = self.bandwidth_hz / 2
        return self.center_hz - half, self.center_hz + half

    def to_dict(self):
        return {
            "start_s": self.start_s,
            "duration_s": self.duration_s,
            "center_mhz": self.center_mhz,
            "bandwidth_khz": self.bandwidth_khz,
            "power_dbm": self.power_dbm,
        }


@dataclass(frozen=True)
class TransmissionSchedule:
    events: tuple
    channel_count: int = 1
    variant: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if self.channel_count < 1:
            raise ValueError("channel_count must be >= 1")
        starts = [e.start_us for e in self.events]
        if starts != sorted(starts):
            raise ValueError("events must be sorted by start time")
        last_end = {}
        for e in self.events:
            prev = last_end.get(e.center_hz)
            if prev is not None and e.start_us < prev:
                raise ValueError(
                    f"events overlap in time on {e.center_mhz} MHz at t={e.start_s} s"
                )
            last_end[e.center_hz] = e.end_us

    @classmethod
    def from_dict(cls, doc):
        if isinstance(doc, list):
            doc = {"events": doc}
        events = []
        for i, e in enumerate(doc.get("events", [])):
            try:
                events.append(TransmissionEvent(**e))
            except TypeError as exc:
                raise ValueError(f"events[{i}]: {exc}") from None
        return cls(
            tuple(events),
            channel_count=int(doc.get("channel_count", 1)),
            variant=doc.get("variant"),
        )

    def to_dict(self):
        out = {"events": [e.to_dict() for e in self.events], "channel_count": self.channel_count}
        if self.variant is not None:
            out["variant"] = self.variant
        return out


def load_schedule(source):
    if isinstance(source, (dict, list)):
        return TransmissionSchedule.from_dict(source)
    if hasattr(source, "read"):
        return TransmissionSchedule.from_dict(json.load(source))
    with open(source) as fh:
        return TransmissionSchedule.from_dict(json.load(fh))


@dataclass(frozen=True)
class Verdict:
    rule: str
    measured: float | None
    limit: float | None
    unit: str
    verdict: str
    note: str = ""

    def to_dict(self):
        return {
            "rule": self.rule,
            "measured": self.measured,
            "limit": self.limit,
            "unit": self.unit,
            "verdict": self.verdict,
            "note": self.note,
        }


@dataclass(frozen=True)
class ComplianceReport:
    region_id: str
    variant: str | None
    verdicts: tuple = field(default_factory=tuple)

    @property
    def overall(self):
        states = {v.verdict for v in self.verdicts}
        if FAIL in states:
            return FAIL
        if INDET in states:
            return INDET
        return PASS

    def get(self, rule):
        for v in self.verdicts:
            if v.rule == rule:
                return v
        raise KeyError(rule)

    def to_dict(self):
        return {
            "region": self.region_id,
            "variant": self.variant,
            "overall": self.overall,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)


# ------------------------------------------------------------ primitives


def applicable_power_limit(profile, freq_mhz, channel_count=1):
    """Transmit power limit (dBm) at ``freq_mhz``.

    The most permissive matching conditional tier wins over the
    unconditional default.
    """
    f = mhz_to_hz(freq_mhz)
    if profile.band_for(f) is None:
        raise OutOfBandError(f"{freq_mhz} MHz is outside the {profile.region_id} bands")
    return _power_limit_hz(profile, f, channel_count)


def _power_limit_hz(profile, f, channel_count):
    conditional = [t.limit_dbm for t in profile.power_tiers
                   if not t.unconditional and t.matches(f, channel_count)]
    if conditional:
        return max(conditional)
    default = [t.limit_dbm for t in profile.power_tiers if t.unconditional]
    if not default:
        return None
    return max(default)


def _on_time_before(starts, ends, s_cum, e_cum, x):
    """Total on-air time in ``(-inf, x)`` for each x (int64 arrays)."""
    ks = np.searchsorted(starts, x, side="left")
    ke = np.searchsorted(ends, x, side="left")
    s_sum = np.concatenate(([0], s_cum))[ks]
    e_sum = np.concatenate(([0], e_cum))[ke]
    return (ks * x - s_sum) - (ke * x - e_sum)


def max_window_on_time(intervals, window_us):
    """Largest on-air time (us) inside any window ``[t, t + window_us)``.

    ``intervals`` are ``(start_us, end_us)`` pairs; overlapping intervals
    each count in full. The on-time is piecewise linear in ``t`` so only
    breakpoints need checking.
    """
    if window_us <= 0:
        raise ValueError("window must be > 0")
    if not intervals:
        return 0
    arr = np.asarray(intervals, dtype=np.int64)
    starts = np.sort(arr[:, 0])
    ends = np.sort(arr[:, 1])
    s_cum = np.cumsum(starts)
    e_cum = np.cumsum(ends)
    t = np.unique(np.concatenate((starts, ends - window_us)))
    on = (_on_time_before(starts, ends, s_cum, e_cum, t + window_us)
          - _on_time_before(starts, ends, s_cum, e_cum, t))
    return int(on.max())


def duty_cycle(events, window, sub_band=None):
    """Worst sliding-window duty cycle of the events centred in ``sub_band``.

    ``window`` is in seconds and ``sub_band`` a ``(lo, hi)`` MHz pair,
    closed below and open above; None takes every event.
    """
    w = s_to_us(window)
    if w <= 0:
        raise ValueError("window must be > 0")
    if sub_band is not None and not isinstance(sub_band, Interval):
        sub_band = Interval(mhz_to_hz(sub_band[0]), mhz_to_hz(sub_band[1]))
    chosen = [(e.start_us, e.end_us) for e in events
              if sub_band is None or e.center_hz in sub_band]
    return max_window_on_time(chosen, w) / w


# ------------------------------------------------------------ rule checks


def _fmt_mhz(hz):
    return f"{hz / 1e6:g} MHz"


def _check_in_band(profile, events):
    outside = [e for e in events
               if not any(b.covers(*e.span_hz) for b in profile.bands)]
    note = ""
    if outside:
        note = f"first out-of-band event at t={outside[0].start_s} s, {outside[0].center_mhz} MHz"
    return Verdict("in_band", len(outside), 0, "events", FAIL if outside else PASS, note)


def _check_power(profile, events, channel_count):
    worst = None
    for e in events:
        if profile.band_for(e.center_hz) is None:
            continue
        limit = _power_limit_hz(profile, e.center_hz, channel_count)
        margin = limit - e.power_dbm
        if worst is None or margin < worst[0]:
            worst = (margin, e.power_dbm, limit)
    if worst is None:
        limit = max(t.limit_dbm for t in profile.power_tiers if t.unconditional)
        return Verdict("power", None, limit, "dBm", PASS)
    margin, power, limit = worst
    return Verdict("power", power, limit, "dBm", PASS if margin >= 0 else FAIL)


def _check_hop_bandwidth(profile, events, channel_count):
    hop = profile.hopping
    if hop is None:
        return Verdict("hop_bandwidth", None, None, "kHz", NA, "no hopping rules")
    limit = hop.max_hop_channel_bandwidth_hz
    if channel_count <= 1:
        return Verdict("hop_bandwidth", None, limit / 1e3, "kHz", NA, "device does not hop")
    widest = max((e.bandwidth_hz for e in events), default=0)
    return Verdict("hop_bandwidth", widest / 1e3, limit / 1e3, "kHz",
                   PASS if widest <= limit else FAIL)


def _check_hopping_count(profile, events, channel_count):
    hop = profile.hopping
    if hop is None:
        return Verdict("hopping_channels", None, None, "channels", NA, "no hopping rules")
    if channel_count <= 1:
        return Verdict("hopping_channels", channel_count, None, "channels", NA,
                       "device does not hop")
    widest = max((e.bandwidth_hz for e in events), default=None)
    if widest is None:
        return Verdict("hopping_channels", channel_count, None, "channels", PASS)
    tier = hop.tier_for(widest)
    if tier is None:
        return Verdict("hopping_channels", channel_count, None, "channels", INDET,
                       f"no hopping tier covers {widest / 1e3:g} kHz")
    return Verdict("hopping_channels", channel_count, tier.min_channels, "channels",
                   PASS if channel_count >= tier.min_channels else FAIL)


def _check_band_duty(profile, events):
    rules = profile.band_duty_rules
    if not rules:
        return [Verdict("band_duty", None, None, "%", NA, "no band duty rules")]
    in_band = [e for e in events if profile.band_for(e.center_hz) is not None]
    # narrowest matching rule governs each event
    governing = {}
    for e in in_band:
        match = [i for i, r in enumerate(rules) if e.center_hz in r.sub_band]
        if match:
            governing[id(e)] = min(match, key=lambda i: (rules[i].sub_band.width, i))
    out = []
    for i, r in enumerate(rules):
        members = [e for e in in_band if e.center_hz in r.sub_band]
        on = max_window_on_time([(e.start_us, e.end_us) for e in members], r.period_us)
        measured = 100 * on / r.period_us
        limit = 100 * r.max_duty
        if on <= r.budget_us:
            out.append(Verdict(r.name, measured, limit, "%", PASS))
        elif any(governing.get(id(e)) == i for e in members):
            out.append(Verdict(r.name, measured, limit, "%", FAIL))
        else:
            out.append(Verdict(r.name, measured, limit, "%", INDET,
                               "overlapping rule fails while the narrower governing rule passes"))
    gaps = [e for e in in_band if id(e) not in governing]
    if gaps:
        out.append(Verdict("band_duty_gap", len(gaps), 0, "events", INDET,
                           f"no duty rule covers {gaps[0].center_mhz} MHz"))
    return out


def _check_channel_duty(profile, events):
    rules = profile.channel_duty_rules
    if not rules:
        return [Verdict("channel_duty", None, None, "%", NA, "no channel duty rules")]
    out = []
    for r in rules:
        groups = {}
        for e in events:
            if e.bandwidth_hz in r.bandwidth:
                groups.setdefault((e.center_hz, e.bandwidth_hz), []).append(
                    (e.start_us, e.end_us))
        on = max((max_window_on_time(g, r.period_us) for g in groups.values()), default=0)
        out.append(Verdict(r.name, 100 * on / r.period_us, 100 * r.max_duty, "%",
                           PASS if on <= r.budget_us else FAIL))
    return out


def _check_tx_on(profile, events, variant):
    tx = profile.tx_on
    if tx is None:
        return Verdict("max_tx_on", None, None, "s", NA, "no continuous Tx-on limit")
    limit = for_variant(tx.max_continuous_on_us, variant)
    if limit is None:
        return Verdict("max_tx_on", None, None, "s", NA, f"no limit for variant {variant}")
    longest = max((e.end_us - e.start_us for e in events), default=0)
    return Verdict("max_tx_on", longest / 1e6, limit / 1e6, "s",
                   PASS if longest <= limit else FAIL)


def _check_min_off(profile, events, variant):
    pol = profile.polite
    limit = None if pol is None else for_variant(pol.min_off_time_us, variant)
    if limit is None:
        return Verdict("min_off_time", None, None, "ms", NA, "no minimum off-time")
    above = for_variant(pol.min_off_applies_above_on_us, variant)
    shortest = None
    last = {}
    for e in events:
        prev = last.get(e.center_hz)
        last[e.center_hz] = e
        if prev is None:
            continue
        if above is not None and prev.end_us - prev.start_us <= above:
            continue
        gap = e.start_us - prev.end_us
        if shortest is None or gap < shortest:
            shortest = gap
    if shortest is None:
        return Verdict("min_off_time", None, limit / 1e3, "ms", PASS)
    return Verdict("min_off_time", shortest / 1e3, limit / 1e3, "ms",
                   PASS if shortest >= limit else FAIL)


def _slices(profile, width):
    for b in profile.bands:
        if width is None:
            yield b
            continue
        lo = b.lo
        while lo < b.hi:
            yield Interval(lo, min(lo + width, b.hi))
            lo += width


def _check_cumulative(profile, events, variant):
    tx = profile.tx_on
    limit = None if tx is None else for_variant(tx.cumulative_on_us_per_hour, variant)
    if limit is None:
        return Verdict("cumulative_on_per_hour", None, None, "s", NA,
                       "no cumulative on-time limit")
    worst = 0
    for sl in _slices(profile, tx.cumulative_slice_hz):
        members = [(e.start_us, e.end_us) for e in events if sl.intersects(*e.span_hz)]
        worst = max(worst, max_window_on_time(members, HOUR_US))
    return Verdict("cumulative_on_per_hour", worst / 1e6, limit / 1e6, "s",
                   PASS if worst <= limit else FAIL)


def _informational(profile, variant):
    pol = profile.polite
    if pol is None:
        return [Verdict("carrier_sense", None, None, "dBm", NA, "no polite access rules")]
    out = []
    if pol.carrier_sense_level_dbm is None:
        out.append(Verdict("carrier_sense", None, None, "dBm", NA,
                           "carrier sense level not defined"))
    else:
        out.append(Verdict("carrier_sense", None, pol.carrier_sense_level_dbm, "dBm", NA,
                           "sensing is not evidenced by a schedule"))
    listen = for_variant(pol.min_listen_window_us, variant)
    out.append(Verdict("listen_window", None, listen, "us", NA,
                       "sensing is not evidenced by a schedule"))
    return out


def check_schedule(profile, schedule):
    """Evaluate every rule of ``profile`` against ``schedule``.

    Violations are verdicts, not exceptions. The overall verdict is
    ``fail`` if any rule fails, otherwise ``indeterminate`` if any rule
    is indeterminate, otherwise ``pass``.
    """
    variants = profile.variants
    variant = schedule.variant
    if variant is None:
        variant = profile.default_variant
    elif variants and variant not in variants:
        raise ValueError(
            f"variant {variant!r} is not defined for {profile.region_id}; "
            f"choose from {', '.join(variants)}"
        )
    events = schedule.events
    n = schedule.channel_count
    verdicts = [
        _check_in_band(profile, events),
        _check_power(profile, events, n),
        _check_hop_bandwidth(profile, events, n),
        _check_hopping_count(profile, events, n),
        *_check_band_duty(profile, events),
        *_check_channel_duty(profile, events),
        _check_tx_on(profile, events, variant),
        _check_min_off(profile, events, variant),
        _check_cumulative(profile, events, variant),
        *_informational(profile, variant),
        Verdict("spurious_emission", None, profile.spurious_limit_dbuv_m, "dBuV/m@3m", NA,
                "field strength is not evidenced by a schedule"),
    ]
    return ComplianceReport(profile.region_id, variant, tuple(verdicts))

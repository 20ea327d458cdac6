"""Regional sub-GHz rule sets and their JSON representation.

Frequencies are held as integer Hz and times as integer microseconds so
that boundary comparisons never depend on floating-point equality.
Frequency intervals are closed below and open above unless a rule says
``upper_inclusive``.
"""

import copy
import json
from dataclasses import dataclass, field
from importlib import resources

__all__ = [
    "ProfileError",
    "ProfileParseError",
    "ProfileValidationError",
    "OutOfBandError",
    "Interval",
    "PowerTier",
    "DutyRule",
    "ChannelDutyRule",
    "HoppingTier",
    "HoppingRule",
    "PoliteRule",
    "TxOnRule",
    "RegionProfile",
    "ALL_VARIANTS",
    "mhz_to_hz",
    "khz_to_hz",
    "s_to_us",
    "load_profiles",
    "builtin_profiles",
    "get_profile",
]

ALL_VARIANTS = "*"
POLITE_METHODS = ("LBT", "AFA")
_MIN_MHZ, _MAX_MHZ = 300.0, 1000.0


class ProfileError(ValueError):
    pass


class ProfileParseError(ProfileError):
    """The document is not shaped like a profile; names the offending field."""


class ProfileValidationError(ProfileError):
    """A value violates a rule-set invariant."""


class OutOfBandError(ValueError):
    pass


def mhz_to_hz(mhz):
    return round(mhz * 1_000_000)


def khz_to_hz(khz):
    return round(khz * 1_000)


def s_to_us(seconds):
    return round(seconds * 1_000_000)


@dataclass(frozen=True)
class Interval:
    """``[lo, hi)`` in integer units, ``[lo, hi]`` with ``upper_inclusive``."""

    lo: int
    hi: int
    upper_inclusive: bool = False

    def __contains__(self, x):
        if self.upper_inclusive:
            return self.lo <= x <= self.hi
        return self.lo <= x < self.hi

    def covers(self, lo, hi):
        return self.lo <= lo and hi <= self.hi

    def intersects(self, lo, hi):
        return lo < self.hi and hi > self.lo

    @property
    def width(self):
        return self.hi - self.lo

    def label(self, scale, unit):
        return f"{self.lo / scale:g}-{self.hi / scale:g} {unit}"


@dataclass(frozen=True)
class PowerTier:
    """Transmit power limit, optionally conditional.

    ``sub_band`` restricts the tier to carriers inside it;
    ``hop_channels_gt`` to devices hopping over strictly more channels.
    """

    limit_dbm: float
    sub_band: Interval | None = None
    hop_channels_gt: int | None = None

    @property
    def unconditional(self):
        return self.sub_band is None and self.hop_channels_gt is None

    def matches(self, freq_hz, channel_count):
        if self.sub_band is not None and freq_hz not in self.sub_band:
            return False
        if self.hop_channels_gt is not None and not channel_count > self.hop_channels_gt:
            return False
        return True

    def describe(self):
        if self.sub_band is not None:
            return f"{self.limit_dbm:g} dBm in {self.sub_band.label(1e6, 'MHz')}"
        if self.hop_channels_gt is not None:
            return f"{self.limit_dbm:g} dBm above {self.hop_channels_gt} hop channels"
        return f"{self.limit_dbm:g} dBm"


@dataclass(frozen=True)
class DutyRule:
    sub_band: Interval
    max_duty: float
    period_us: int

    @property
    def budget_us(self):
        return round(self.max_duty * self.period_us)

    @property
    def name(self):
        return f"band_duty[{self.sub_band.label(1e6, 'MHz')}]"


@dataclass(frozen=True)
class ChannelDutyRule:
    bandwidth: Interval  # Hz
    max_duty: float
    period_us: int

    @property
    def budget_us(self):
        return round(self.max_duty * self.period_us)

    @property
    def name(self):
        return f"channel_duty[{self.bandwidth.label(1e3, 'kHz')}]"


@dataclass(frozen=True)
class HoppingTier:
    bandwidth: Interval  # Hz
    min_channels: int


@dataclass(frozen=True)
class HoppingRule:
    tiers: tuple
    max_hop_channel_bandwidth_hz: int

    def tier_for(self, bandwidth_hz):
        for t in self.tiers:
            if bandwidth_hz in t.bandwidth:
                return t
        return None


@dataclass(frozen=True)
class PoliteRule:
    """Listen-before-talk style access parameters.

    ``carrier_sense_level_dbm`` is None where the level is not defined;
    per-variant values are keyed by variant name or ``"*"``.
    """

    methods: frozenset
    carrier_sense_level_dbm: float | None
    min_listen_window_us: dict
    min_off_time_us: dict
    min_off_applies_above_on_us: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TxOnRule:
    max_continuous_on_us: dict
    cumulative_on_us_per_hour: dict = field(default_factory=dict)
    cumulative_slice_hz: int | None = None


def for_variant(table, variant):
    if variant in table:
        return table[variant]
    return table.get(ALL_VARIANTS)


@dataclass(frozen=True)
class RegionProfile:
    region_id: str
    name: str
    bands: tuple
    power_tiers: tuple
    hopping: HoppingRule | None
    band_duty_rules: tuple
    channel_duty_rules: tuple
    polite: PoliteRule | None
    tx_on: TxOnRule | None
    spurious_limit_dbuv_m: float
    source: dict = field(default=None, compare=False, repr=False)

    @property
    def variants(self):
        """Declarable operating variants, strictest first."""
        names = []
        for table in self._variant_tables():
            for k in table:
                if k != ALL_VARIANTS and k not in names:
                    names.append(k)
        return tuple(names)

    def _variant_tables(self):
        if self.tx_on is not None:
            yield self.tx_on.max_continuous_on_us
            yield self.tx_on.cumulative_on_us_per_hour
        if self.polite is not None:
            yield self.polite.min_listen_window_us
            yield self.polite.min_off_time_us

    @property
    def default_variant(self):
        v = self.variants
        return v[0] if v else None

    def band_for(self, freq_hz):
        for b in self.bands:
            if freq_hz in b:
                return b
        return None

    def to_dict(self):
        return copy.deepcopy(self.source)


# ---------------------------------------------------------------- parsing


def _get(doc, key, where, required=True):
    if not isinstance(doc, dict):
        raise ProfileParseError(f"{where}: expected an object")
    if key not in doc:
        if required:
            raise ProfileParseError(f"{where}: missing field {key!r}")
        return None
    return doc[key]


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProfileParseError(f"{where}: expected a number, got {value!r}")
    return value


def _pair(value, where):
    if not (isinstance(value, list) and len(value) == 2):
        raise ProfileParseError(f"{where}: expected [lo, hi]")
    lo, hi = (_number(v, where) for v in value)
    if not lo < hi:
        raise ProfileValidationError(f"{where}: lower edge {lo} must be below {hi}")
    return lo, hi


def _mhz_interval(value, where):
    lo, hi = _pair(value, where)
    if not (_MIN_MHZ <= lo and hi <= _MAX_MHZ):
        raise ProfileValidationError(f"{where}: {lo}-{hi} MHz outside 300-1000 MHz")
    return Interval(mhz_to_hz(lo), mhz_to_hz(hi))


def _khz_interval(doc, where):
    lo, hi = _pair(_get(doc, "bandwidth_khz", where), f"{where}.bandwidth_khz")
    if not (0 <= lo and hi <= 500):
        raise ProfileValidationError(f"{where}: bandwidth interval must lie in (0, 500] kHz")
    return Interval(khz_to_hz(lo), khz_to_hz(hi), bool(doc.get("upper_inclusive", False)))


def _duty(doc, where):
    pct = _number(_get(doc, "max_duty_percent", where), f"{where}.max_duty_percent")
    period = _number(_get(doc, "period_s", where), f"{where}.period_s")
    if not 0 < pct <= 100:
        raise ProfileValidationError(f"{where}: duty {pct}% outside (0, 100]")
    if not period > 0:
        raise ProfileValidationError(f"{where}: period must be > 0")
    return pct / 100.0, s_to_us(period)


def _variant_table(doc, where, scale):
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ProfileParseError(f"{where}: expected an object keyed by variant")
    out = {}
    for k, v in doc.items():
        v = _number(v, f"{where}.{k}")
        if not v > 0:
            raise ProfileValidationError(f"{where}.{k}: must be > 0")
        out[str(k)] = round(v * scale)
    return out


def _parse_profile(doc, where):
    rid = _get(doc, "region_id", where)
    if not isinstance(rid, str) or not rid:
        raise ProfileParseError(f"{where}.region_id: expected a non-empty string")
    where = f"profile {rid}"
    raw_bands = _get(doc, "bands_mhz", where)
    if not isinstance(raw_bands, list):
        raise ProfileParseError(f"{where}.bands_mhz: expected a list")
    bands = tuple(_mhz_interval(b, f"{where}.bands_mhz[{i}]") for i, b in enumerate(raw_bands))
    if not bands:
        raise ProfileValidationError(f"{where}.bands_mhz: at least one band required")

    tiers = []
    for i, t in enumerate(_get(doc, "power_tiers", where)):
        tw = f"{where}.power_tiers[{i}]"
        limit = _number(_get(t, "limit_dbm", tw), f"{tw}.limit_dbm")
        if not -30 <= limit <= 36:
            raise ProfileValidationError(f"{tw}: limit {limit} dBm outside [-30, 36]")
        cond = _get(t, "condition", tw, required=False) or {}
        sub = None
        gt = None
        if "sub_band_mhz" in cond:
            sub = _mhz_interval(cond["sub_band_mhz"], f"{tw}.condition.sub_band_mhz")
            if not any(b.covers(sub.lo, sub.hi) for b in bands):
                raise ProfileValidationError(f"{tw}: sub-band lies outside the profile bands")
        if "hop_channels_gt" in cond:
            gt = int(_number(cond["hop_channels_gt"], f"{tw}.condition.hop_channels_gt"))
        unknown = set(cond) - {"sub_band_mhz", "hop_channels_gt"}
        if unknown:
            raise ProfileParseError(f"{tw}.condition: unknown key(s) {sorted(unknown)}")
        tiers.append(PowerTier(limit, sub, gt))

    hopping = None
    hdoc = _get(doc, "hopping", where)
    if hdoc is not None:
        hw = f"{where}.hopping"
        htiers = []
        for i, t in enumerate(_get(hdoc, "tiers", hw)):
            tw = f"{hw}.tiers[{i}]"
            m = int(_number(_get(t, "min_channels", tw), f"{tw}.min_channels"))
            if m < 1:
                raise ProfileValidationError(f"{tw}: min_channels must be >= 1")
            htiers.append(HoppingTier(_khz_interval(t, tw), m))
        mbw = _number(_get(hdoc, "max_hop_channel_bandwidth_khz", hw), hw)
        hopping = HoppingRule(tuple(htiers), khz_to_hz(mbw))

    band_duty = []
    for i, r in enumerate(_get(doc, "band_duty_rules", where)):
        rw = f"{where}.band_duty_rules[{i}]"
        sub = _mhz_interval(_get(r, "sub_band_mhz", rw), f"{rw}.sub_band_mhz")
        band_duty.append(DutyRule(sub, *_duty(r, rw)))

    channel_duty = []
    for i, r in enumerate(_get(doc, "channel_duty_rules", where)):
        rw = f"{where}.channel_duty_rules[{i}]"
        channel_duty.append(ChannelDutyRule(_khz_interval(r, rw), *_duty(r, rw)))

    polite = None
    pdoc = _get(doc, "polite", where)
    if pdoc is not None:
        pw = f"{where}.polite"
        methods = _get(pdoc, "methods", pw)
        bad = [m for m in methods if m not in POLITE_METHODS]
        if bad:
            raise ProfileValidationError(f"{pw}.methods: unknown method(s) {bad}")
        # must be present even when undefined, so absence is never silent
        csl = _get(pdoc, "carrier_sense_level_dbm", pw)
        if csl is not None:
            csl = _number(csl, f"{pw}.carrier_sense_level_dbm")
        listen = _variant_table(_get(pdoc, "min_listen_window_us", pw), f"{pw}.min_listen_window_us", 1)
        if not listen:
            raise ProfileValidationError(f"{pw}: a listen window is required")
        polite = PoliteRule(
            methods=frozenset(methods),
            carrier_sense_level_dbm=csl,
            min_listen_window_us=listen,
            min_off_time_us=_variant_table(
                _get(pdoc, "min_off_time_ms", pw, required=False), f"{pw}.min_off_time_ms", 1000
            ),
            min_off_applies_above_on_us=_variant_table(
                _get(pdoc, "min_off_applies_above_on_ms", pw, required=False),
                f"{pw}.min_off_applies_above_on_ms", 1000,
            ),
        )

    tx_on = None
    tdoc = _get(doc, "tx_on", where)
    if tdoc is not None:
        tw = f"{where}.tx_on"
        slice_khz = _get(tdoc, "cumulative_slice_khz", tw, required=False)
        tx_on = TxOnRule(
            max_continuous_on_us=_variant_table(
                _get(tdoc, "max_continuous_on_s", tw), f"{tw}.max_continuous_on_s", 1_000_000
            ),
            cumulative_on_us_per_hour=_variant_table(
                _get(tdoc, "cumulative_on_s_per_hour", tw, required=False),
                f"{tw}.cumulative_on_s_per_hour", 1_000_000,
            ),
            cumulative_slice_hz=(
                None if slice_khz is None
                else khz_to_hz(_number(slice_khz, f"{tw}.cumulative_slice_khz"))
            ),
        )

    spurious = _number(
        _get(doc, "spurious_limit_dbuv_m_3m", where), f"{where}.spurious_limit_dbuv_m_3m"
    )
    return RegionProfile(
        region_id=rid.upper(),
        name=str(doc.get("name", rid)),
        bands=bands,
        power_tiers=tuple(tiers),
        hopping=hopping,
        band_duty_rules=tuple(band_duty),
        channel_duty_rules=tuple(channel_duty),
        polite=polite,
        tx_on=tx_on,
        spurious_limit_dbuv_m=spurious,
        source=doc,
    )


def load_profiles(source=None):
    """Load region profiles.

    ``source`` may be None (the built-in dataset), a parsed dict or list, a JSON
    string, a path or a readable file object. Empty documents give ``[]``.
    """
    if source is None:
        return builtin_profiles()
    if isinstance(source, (dict, list)):
        doc = source
    elif hasattr(source, "read"):
        doc = _loads(source.read())
    elif isinstance(source, str) and source.lstrip().startswith(("{", "[")):
        doc = _loads(source)
    elif isinstance(source, str) and not source.strip():
        return []
    else:
        with open(source) as fh:
            doc = _loads(fh.read())
    if doc is None:
        return []
    if isinstance(doc, list):
        items = doc
    elif isinstance(doc, dict):
        items = doc.get("profiles", [])
        if not isinstance(items, list):
            raise ProfileParseError("profiles: expected a list")
    else:
        raise ProfileParseError("document: expected an object or a list")
    return [_parse_profile(p, f"profiles[{i}]") for i, p in enumerate(items)]


def _loads(text):
    if not text.strip():
        return None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProfileParseError(f"document: invalid JSON ({exc})") from None


_BUILTIN = None


def builtin_profiles():
    global _BUILTIN
    if _BUILTIN is None:
        text = resources.files("lpwanplan.data").joinpath("profiles.json").read_text()
        _BUILTIN = tuple(load_profiles(json.loads(text)))
    return list(_BUILTIN)


def get_profile(region_id, profiles=None):
    key = str(region_id).strip().upper()
    for p in profiles if profiles is not None else builtin_profiles():
        if p.region_id == key:
            return p
    raise KeyError(f"no profile for region {region_id!r}")

"""LoRa and Sigfox regional channel plans and the rural density table.

The pipeline for one (technology, region) pair is::

    plan      -> aggregate capacity C and channel count r
    region    -> regulatory duty cycle alpha
    anchor    -> coverage radius d scaled to the region's power/frequency
    (r, alpha, d, C) -> node density and traffic density

Only the tabulated pairs are available; anything else raises
:class:`NotAvailableError` instead of guessing.
"""

import csv
import io
import json
from dataclasses import dataclass
from importlib import resources

from . import capacity
from .propagation import scale_range

__all__ = [
    "NotAvailableError",
    "ChannelGroup",
    "ChannelPlan",
    "CoverageAnchor",
    "DensityEstimate",
    "TECHNOLOGIES",
    "COVERAGE_ANCHORS",
    "TX_CONDITIONS",
    "DENSITY_PAIRS",
    "canonical_technology",
    "canonical_region",
    "builtin_plan",
    "load_plans",
    "regulatory_duty",
    "estimate_radius",
    "printed_radius",
    "radius_discrepancy",
    "density_estimate",
    "density_table",
    "to_csv",
]


class NotAvailableError(LookupError):
    """Raised for a (technology, region) pair without tabulated data."""


# descriptive only: category, governing body, capacity kbps, access, modulation
TECHNOLOGIES = {
    "LoRa": {
        "category": "Dedicated Star Networks",
        "governing_body": "LoRa Alliance",
        "bands": "<1 GHz",
        "capacity_kbps": 50,
        "multiple_access": "CSS",
        "modulation": "(G)FSK",
    },
    "Sigfox": {
        "category": "Dedicated Star Networks",
        "governing_body": "SIGFOX",
        "bands": "<1 GHz",
        "capacity_kbps": 0.6,
        "multiple_access": "UNB/FHSS",
        "modulation": "GFSK/DBPSK",
    },
}

_REGION_ALIASES = {
    "EU": "EU",
    "EUROPE": "EU",
    "US": "US/CA",
    "CA": "US/CA",
    "US/CA": "US/CA",
    "US/CANADA": "US/CA",
    "CN": "CN",
    "CHINA": "CN",
    "IN": "IN",
    "INDIA": "IN",
}


def canonical_technology(technology):
    for name in TECHNOLOGIES:
        if name.lower() == str(technology).strip().lower():
            return name
    raise NotAvailableError(f"unknown technology {technology!r}")


def canonical_region(region):
    key = str(region).strip().upper()
    try:
        return _REGION_ALIASES[key]
    except KeyError:
        raise NotAvailableError(f"no tabulated data for region {region!r}") from None


@dataclass(frozen=True)
class ChannelGroup:
    """Identical channels within a plan.

    ``total_bps`` records a tabulated group total that disagrees with
    ``channel_count * capacity_bps``; when set it is the group's
    contribution to the aggregate capacity.
    """

    channel_count: int
    bandwidth_khz: float
    modulation: str
    capacity_bps: float
    total_bps: float | None = None

    def __post_init__(self):
        if self.channel_count < 1:
            raise ValueError(f"channel count must be >= 1, got {self.channel_count}")
        if not self.capacity_bps > 0:
            raise ValueError(f"capacity must be > 0, got {self.capacity_bps}")
        if self.total_bps is not None and not self.total_bps > 0:
            raise ValueError(f"group total must be > 0, got {self.total_bps}")

    @property
    def effective_capacity_bps(self):
        if self.total_bps is None:
            return self.capacity_bps
        return self.total_bps / self.channel_count


@dataclass(frozen=True)
class ChannelPlan:
    technology: str
    region: str
    groups: tuple

    @property
    def channels(self):
        return sum(g.channel_count for g in self.groups)

    def capacity_groups(self):
        return [(g.channel_count, g.effective_capacity_bps) for g in self.groups]

    @property
    def aggregate_capacity(self):
        return capacity.aggregate_capacity(
            (1, g.total_bps) if g.total_bps is not None
            else (g.channel_count, g.capacity_bps)
            for g in self.groups
        )

    def discrepancies(self):
        out = []
        for g in self.groups:
            if g.total_bps is not None:
                out.append(
                    f"{self.technology} {self.region}: {g.channel_count} x "
                    f"{g.capacity_bps:g} bps = {g.channel_count * g.capacity_bps:g} "
                    f"but the tabulated total is {g.total_bps:g} bps"
                )
        return out

    def to_dict(self):
        return {
            "technology": self.technology,
            "region": self.region,
            "groups": [_group_dict(g) for g in self.groups],
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            groups = tuple(
                ChannelGroup(
                    channel_count=int(g["channel_count"]),
                    bandwidth_khz=float(g["bandwidth_khz"]),
                    modulation=str(g["modulation"]),
                    capacity_bps=float(g["capacity_bps"]),
                    total_bps=(
                        float(g["total_bps"]) if g.get("total_bps") is not None else None
                    ),
                )
                for g in doc["groups"]
            )
            return cls(str(doc["technology"]), str(doc["region"]), groups)
        except KeyError as exc:
            raise ValueError(f"channel plan is missing field {exc.args[0]!r}") from None


def _group_dict(g):
    out = {
        "channel_count": g.channel_count,
        "bandwidth_khz": g.bandwidth_khz,
        "modulation": g.modulation,
        "capacity_bps": g.capacity_bps,
    }
    if g.total_bps is not None:
        out["total_bps"] = g.total_bps
    return out


def load_plans(source):
    """Read channel plans from a JSON path, file object or parsed dict."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    return [ChannelPlan.from_dict(p) for p in doc.get("plans", [])]


def _builtin_plans():
    text = resources.files("lpwanplan.data").joinpath("channel_plans.json").read_text()
    plans = load_plans(json.loads(text))
    return {(p.technology, p.region): p for p in plans}


_PLANS = _builtin_plans()


def builtin_plan(technology, region):
    key = (canonical_technology(technology), canonical_region(region))
    try:
        return _PLANS[key]
    except KeyError:
        raise NotAvailableError(f"no channel plan for {key[0]} in {key[1]}") from None


_DUTY = {
    ("LoRa", "EU"): 0.01,
    ("LoRa", "IN"): 0.01,
    ("LoRa", "CN"): 0.001,
    ("LoRa", "US/CA"): 1.0,
    # Sigfox self-imposed limits, printed as 0.0004 % and 0.0003 %
    ("Sigfox", "EU"): 4e-6,
    ("Sigfox", "US/CA"): 3e-6,
}


def regulatory_duty(technology, region):
    key = (canonical_technology(technology), canonical_region(region))
    try:
        return _DUTY[key]
    except KeyError:
        raise NotAvailableError(f"no duty cycle for {key[0]} in {key[1]}") from None


@dataclass(frozen=True)
class CoverageAnchor:
    technology: str
    radius_km: float
    power_dbm: float
    frequency_mhz: float

    def __post_init__(self):
        if not self.radius_km > 0:
            raise ValueError(f"anchor radius must be > 0, got {self.radius_km}")


# rural Europe, 16 dBm at 868 MHz
COVERAGE_ANCHORS = {
    "LoRa": CoverageAnchor("LoRa", 10.0, 16.0, 868.0),
    "Sigfox": CoverageAnchor("Sigfox", 20.0, 16.0, 868.0),
}

# (tx power dBm, frequency MHz) per region for the radius table
TX_CONDITIONS = {
    "EU": (16.0, 868.0),
    "US/CA": (30.0, 915.0),
    "CN": (12.5, 780.0),
    "IN": (30.0, 866.0),
}

_PRINTED_RADIUS = {
    ("LoRa", "EU"): 10.0,
    ("LoRa", "US/CA"): 47.5,
    ("LoRa", "CN"): 7.4,
    ("LoRa", "IN"): 50.2,
    ("Sigfox", "EU"): 20.0,
    ("Sigfox", "US/CA"): 95.0,
    ("Sigfox", "CN"): 100.4,
    ("Sigfox", "IN"): 14.8,
}


def estimate_radius(technology, region):
    """Coverage radius in km, scaled from the technology's rural anchor."""
    tech = canonical_technology(technology)
    reg = canonical_region(region)
    if reg not in TX_CONDITIONS:
        raise NotAvailableError(f"no transmit conditions for {reg}")
    a = COVERAGE_ANCHORS[tech]
    return scale_range((a.radius_km, a.power_dbm, a.frequency_mhz), TX_CONDITIONS[reg])


def printed_radius(technology, region):
    key = (canonical_technology(technology), canonical_region(region))
    try:
        return _PRINTED_RADIUS[key]
    except KeyError:
        raise NotAvailableError(f"no printed radius for {key[0]} in {key[1]}") from None


def radius_discrepancy(technology, region, rtol=0.01):
    """Describe a mismatch between the computed and printed radius, or None."""
    computed = estimate_radius(technology, region)
    printed = printed_radius(technology, region)
    if abs(computed - printed) <= rtol * printed:
        return None
    tech = canonical_technology(technology)
    swapped = [
        reg
        for reg in TX_CONDITIONS
        if abs(estimate_radius(tech, reg) - printed) <= rtol * printed
    ]
    note = (
        f"{tech} {canonical_region(region)}: computed {computed:.1f} km, "
        f"printed {printed:.1f} km"
    )
    if swapped:
        note += f" (printed value matches the computed {', '.join(swapped)} radius)"
    return note


@dataclass(frozen=True)
class DensityEstimate:
    technology: str
    region: str
    duty_cycle: float
    channels: int
    radius: float
    capacity: float
    node_density: float
    traffic_density: float

    def row(self):
        return (
            self.duty_cycle,
            self.channels,
            self.radius,
            self.capacity,
            self.node_density,
            self.traffic_density,
        )

    def to_dict(self):
        return {
            "technology": self.technology,
            "region": self.region,
            "alpha": self.duty_cycle,
            "r": self.channels,
            "d_km": self.radius,
            "c_bps": self.capacity,
            "n_rho": self.node_density,
            "c_rho": self.traffic_density,
        }


DENSITY_PAIRS = (
    ("LoRa", "EU"),
    ("LoRa", "US/CA"),
    ("LoRa", "CN"),
    ("LoRa", "IN"),
    ("Sigfox", "EU"),
    ("Sigfox", "US/CA"),
)


def density_estimate(technology, region, plan=None):
    """One row of the rural density table.

    A custom ``plan`` replaces the built-in channel plan; duty cycle and
    radius still come from the built-in tables.
    """
    tech = canonical_technology(technology)
    reg = canonical_region(region)
    if plan is None:
        plan = builtin_plan(tech, reg)
    alpha = regulatory_duty(tech, reg)
    d = estimate_radius(tech, reg)
    r = plan.channels
    C = plan.aggregate_capacity
    return DensityEstimate(
        technology=tech,
        region=reg,
        duty_cycle=alpha,
        channels=r,
        radius=d,
        capacity=C,
        node_density=capacity.node_density(r, alpha, d),
        traffic_density=capacity.traffic_density(C, d),
    )


def density_table():
    return [density_estimate(t, r) for t, r in DENSITY_PAIRS]


CSV_COLUMNS = ("technology", "alpha", "r", "d_km", "c_bps", "n_rho", "c_rho")


def to_csv(estimates, fh=None):
    """Write estimates as CSV with full float precision; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for e in estimates:
        w.writerow([f"{e.technology} {e.region}", *(repr(v) for v in e.row())])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text

"""Bring literature density studies onto common metrics.

Each study is reduced to an aggregate uplink rate ``C`` (bit/s), an
effective number of successful transmitters ``n`` and a covered area, from
which node density ``n / area`` and traffic density ``C / area`` follow.

Traffic may be described in one of four ways:

========  ===============================================  ==================
form      fields                                           C (bit/s)
========  ===============================================  ==================
period    ``t_msg_s``, ``s_msg_bytes``                     n * S * 8 / T
rate      ``f_pph``, ``s_msg_bytes``                       n * f * S * 8 / 3600
totals    ``total_packets``, ``observation_s``,            P * S * 8 / t
          ``mean_payload_bytes``
direct    ``c_bps``                                        as given
========  ===============================================  ==================

Message sizes are bytes and are converted to bits.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field, fields
from importlib import resources

__all__ = [
    "KINDS",
    "StudyRecord",
    "HarmonizedRow",
    "load_studies",
    "builtin_studies",
    "effective_transmitters",
    "aggregate_traffic",
    "study_area",
    "study_densities",
    "harmonize",
    "to_csv",
]

KINDS = ("analytical", "simulation", "deployment")

_FORMS = {
    "period": ("t_msg_s", "s_msg_bytes"),
    "rate": ("f_pph", "s_msg_bytes"),
    "totals": ("total_packets", "observation_s", "mean_payload_bytes"),
    "direct": ("c_bps",),
}
_FORM_ONLY = {
    "period": ("t_msg_s",),
    "rate": ("f_pph",),
    "totals": ("total_packets", "observation_s", "mean_payload_bytes"),
    "direct": ("c_bps",),
}


@dataclass(frozen=True)
class StudyRecord:
    label: str
    kind: str
    n_total: float | None = None
    t_msg_s: float | None = None
    s_msg_bytes: float | None = None
    f_pph: float | None = None
    total_packets: float | None = None
    observation_s: float | None = None
    mean_payload_bytes: float | None = None
    c_bps: float | None = None
    p_per: float | None = None
    p_psr: float | None = None
    d_km: float | None = None
    area_km2: float | None = None
    table: int | None = None
    printed: dict = field(default_factory=dict, compare=False)
    assumed: tuple = ()
    note: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"{self.label}: kind must be one of {KINDS}")
        forms = [f for f, keys in _FORM_ONLY.items()
                 if any(getattr(self, k) is not None for k in keys)]
        if len(forms) > 1:
            raise ValueError(f"{self.label}: more than one traffic spec ({', '.join(forms)})")
        if forms:
            missing = [k for k in _FORMS[forms[0]] if getattr(self, k) is None]
            if missing:
                raise ValueError(f"{self.label}: {forms[0]} form needs {', '.join(missing)}")
        for name in ("p_per", "p_psr"):
            p = getattr(self, name)
            if p is not None and not 0 <= p <= 1:
                raise ValueError(f"{self.label}: {name} must be in [0, 1], got {p}")
        if self.d_km is not None and self.area_km2 is not None:
            raise ValueError(f"{self.label}: give either d_km or area_km2, not both")
        for name in ("d_km", "area_km2"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{self.label}: {name} must be > 0, got {v}")
        if self.n_total is not None and self.n_total < 0:
            raise ValueError(f"{self.label}: n_total must be >= 0")

    @property
    def traffic_form(self):
        for form, keys in _FORM_ONLY.items():
            if any(getattr(self, k) is not None for k in keys):
                return form
        return None

    def to_dict(self):
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or v == () or v == {}:
                continue
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, doc):
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown study field(s): {', '.join(sorted(unknown))}")
        for req in ("label", "kind"):
            if req not in doc:
                raise ValueError(f"study record is missing field {req!r}")
        doc = dict(doc)
        doc["assumed"] = tuple(doc.get("assumed", ()))
        return cls(**doc)


def load_studies(source):
    """Read study records from a JSON path, file object or parsed dict."""
    if isinstance(source, dict):
        doc = source
    elif hasattr(source, "read"):
        doc = json.load(source)
    else:
        with open(source) as fh:
            doc = json.load(fh)
    return [StudyRecord.from_dict(r) for r in doc.get("studies", [])]


def builtin_studies():
    text = resources.files("lpwanplan.data").joinpath("studies.json").read_text()
    return load_studies(json.loads(text))


def effective_transmitters(record):
    """Successful transmitters: ``n_total * P_psr`` (``= n_total * (1 - P_per)``)."""
    if record.n_total is None:
        raise ValueError(f"{record.label}: no population given")
    psr, per = record.p_psr, record.p_per
    if psr is not None and per is not None and abs(psr + per - 1) > 1e-9:
        raise ValueError(
            f"{record.label}: P_psr {psr} and P_per {per} do not sum to 1"
        )
    if psr is None and per is not None:
        psr = 1.0 - per
    if psr is None:
        return record.n_total
    return record.n_total * psr


def aggregate_traffic(record):
    """Aggregate uplink traffic in bit/s."""
    form = record.traffic_form
    if form is None:
        raise ValueError(f"{record.label}: no traffic specification")
    if form == "direct":
        return record.c_bps
    if form == "totals":
        return record.total_packets * record.mean_payload_bytes * 8 / record.observation_s
    n = effective_transmitters(record)
    if form == "period":
        return n * record.s_msg_bytes * 8 / record.t_msg_s
    return n * record.f_pph * record.s_msg_bytes * 8 / 3600


def study_area(record):
    if record.area_km2 is not None:
        return record.area_km2
    if record.d_km is not None:
        return math.pi * record.d_km ** 2
    raise ValueError(f"{record.label}: no radius or area given")


def study_densities(record):
    """``(n_rho, c_rho)``; ``c_rho`` is None for studies without traffic data."""
    area = study_area(record)
    n_rho = effective_transmitters(record) / area
    if record.traffic_form is None:
        return n_rho, None
    return n_rho, aggregate_traffic(record) / area


@dataclass(frozen=True)
class HarmonizedRow:
    label: str
    table: int | None
    t_msg_s: float | None
    s_msg_bytes: float | None
    n: float
    d_km: float
    c_bps: float | None
    n_rho: float
    c_rho: float | None


def harmonize(record):
    if record.t_msg_s is not None:
        t_msg = record.t_msg_s
    elif record.f_pph is not None:
        t_msg = 3600 / record.f_pph
    else:
        t_msg = None
    area = study_area(record)
    n_rho, c_rho = study_densities(record)
    return HarmonizedRow(
        label=record.label,
        table=record.table,
        t_msg_s=t_msg,
        s_msg_bytes=record.s_msg_bytes,
        n=effective_transmitters(record),
        d_km=math.sqrt(area / math.pi),
        c_bps=None if record.traffic_form is None else aggregate_traffic(record),
        n_rho=n_rho,
        c_rho=c_rho,
    )


CSV_COLUMNS = ("study", "t_msg_s", "s_msg_bytes", "n", "d_km", "c_bps", "n_rho", "c_rho")


def to_csv(records, fh=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rec in records:
        row = harmonize(rec)
        w.writerow([
            row.label,
            *("" if v is None else repr(v) for v in (
                row.t_msg_s, row.s_msg_bytes, row.n, row.d_km,
                row.c_bps, row.n_rho, row.c_rho)),
        ])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text

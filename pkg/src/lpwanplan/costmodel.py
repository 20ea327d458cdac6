"""Deployment cost versus coverage radius and duty cycle.

A deployment of ``n`` devices over ``a`` km^2 needs ``a / (pi d^2)``
gateways of radius ``d`` and is only feasible while the required density
``n / a`` stays strictly below what the channel supports,
``r / (alpha pi d^2)``. Infeasible deployments cost infinity.
"""

import csv
import io
import math
from dataclasses import dataclass

from .capacity import disc_area, node_density

__all__ = [
    "DeploymentScenario",
    "CostPoint",
    "REFERENCE_SCENARIO",
    "deployment_cost",
    "cost_surface",
    "min_cost",
    "feasibility_bound",
    "to_csv",
]

ROUNDING = ("ceil", "continuous")


@dataclass(frozen=True)
class DeploymentScenario:
    area: float
    devices: float
    gateway_cost: float
    device_cost: float
    channels: int

    def __post_init__(self):
        for name in ("area", "gateway_cost", "device_cost", "channels"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.area > 0:
            raise ValueError("area must be > 0")
        if self.channels < 1:
            raise ValueError("need at least one channel")
        if self.devices < 0:
            raise ValueError("devices must be >= 0")


@dataclass(frozen=True)
class CostPoint:
    radius: float
    duty_cycle: float
    gateways: float
    total_cost: float
    supported_density: float

    @property
    def feasible(self):
        return math.isfinite(self.total_cost)


# 100 km^2, 1e5 devices, 1000 per gateway, 10 per device, 8 channels
REFERENCE_SCENARIO = DeploymentScenario(
    area=100.0, devices=100_000, gateway_cost=1000.0, device_cost=10.0, channels=8
)


def feasibility_bound(scenario, d):
    """Duty cycles strictly below this value are feasible at radius ``d``."""
    if scenario.devices == 0:
        return math.inf
    return scenario.channels * scenario.area / (scenario.devices * disc_area(d))


def deployment_cost(scenario, d, alpha, gateway_rounding="ceil"):
    """Cost of covering the scenario with gateways of radius ``d`` km."""
    if gateway_rounding not in ROUNDING:
        raise ValueError(f"gateway_rounding must be one of {ROUNDING}")
    if not d > 0:
        raise ValueError(f"radius must be > 0, got {d}")
    supported = node_density(scenario.channels, alpha, d)
    gateways = scenario.area / disc_area(d)
    if gateway_rounding == "ceil":
        gateways = math.ceil(gateways)
    # strict: required density must stay below the supported one
    if scenario.devices / scenario.area < supported:
        cost = gateways * scenario.gateway_cost + scenario.devices * scenario.device_cost
    else:
        cost = math.inf
    return CostPoint(d, alpha, gateways, cost, supported)


def cost_surface(scenario, d_grid, alpha_grid, gateway_rounding="ceil"):
    """Evaluate every (d, alpha) pair, d outer and alpha inner."""
    d_grid = list(d_grid)
    alpha_grid = list(alpha_grid)
    if not d_grid or not alpha_grid:
        raise ValueError("grids must be non-empty")
    return [
        deployment_cost(scenario, d, a, gateway_rounding)
        for d in d_grid
        for a in alpha_grid
    ]


def min_cost(scenario, d_grid, alpha_grid, gateway_rounding="ceil"):
    """Cheapest feasible grid point.

    Ties go to the larger radius, then the larger duty cycle. Returns an
    infeasible point (infinite cost, at the largest radius and duty cycle)
    when no grid point is feasible.
    """
    surface = cost_surface(scenario, d_grid, alpha_grid, gateway_rounding)
    feasible = [p for p in surface if p.feasible]
    if not feasible:
        return max(surface, key=lambda p: (p.radius, p.duty_cycle))
    return min(feasible, key=lambda p: (p.total_cost, -p.radius, -p.duty_cycle))


CSV_COLUMNS = ("d_km", "alpha", "gateways", "cost", "feasible")


def to_csv(points, fh=None):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in points:
        w.writerow([
            repr(p.radius),
            repr(p.duty_cycle),
            repr(p.gateways),
            repr(p.total_cost) if p.feasible else "inf",
            "true" if p.feasible else "false",
        ])
    text = buf.getvalue()
    if fh is not None:
        fh.write(text)
    return text

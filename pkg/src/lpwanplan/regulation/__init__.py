"""Regional spectrum rules and schedule compliance checking."""

from .compliance import (
    ComplianceReport,
    TransmissionEvent,
    TransmissionSchedule,
    Verdict,
    applicable_power_limit,
    check_schedule,
    duty_cycle,
    load_schedule,
)
from .profiles import (
    OutOfBandError,
    ProfileError,
    ProfileParseError,
    ProfileValidationError,
    RegionProfile,
    builtin_profiles,
    get_profile,
    load_profiles,
)

__all__ = [
    "ComplianceReport",
    "TransmissionEvent",
    "TransmissionSchedule",
    "Verdict",
    "applicable_power_limit",
    "check_schedule",
    "duty_cycle",
    "load_schedule",
    "OutOfBandError",
    "ProfileError",
    "ProfileParseError",
    "ProfileValidationError",
    "RegionProfile",
    "builtin_profiles",
    "get_profile",
    "load_profiles",
]

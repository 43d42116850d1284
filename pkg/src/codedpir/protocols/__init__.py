"""Query planning, recovery and privacy auditing for the PIR protocols."""

from .audit import PrivacyVerdict, audit_privacy
from .directsum import plan_protocolB
from .filedep import plan_protocol1, plan_protocolA
from .fileindep import masked_layout, plan_protocol2, plan_protocolA_inf
from .plan import (
    Download,
    ProtocolError,
    QueryPlan,
    RecoveryError,
    ScheduleCounts,
    schedule_counts,
    transcript,
)
from .recovery import recover
from .schedule import Schedule, ScheduleError, ScheduleVerdict, bundled_schedule, plan_schedule, verify_schedule

__all__ = [
    "Download",
    "PrivacyVerdict",
    "ProtocolError",
    "QueryPlan",
    "RecoveryError",
    "Schedule",
    "ScheduleCounts",
    "ScheduleError",
    "ScheduleVerdict",
    "audit_privacy",
    "bundled_schedule",
    "masked_layout",
    "plan_protocol1",
    "plan_protocol2",
    "plan_protocolA",
    "plan_protocolA_inf",
    "plan_protocolB",
    "plan_schedule",
    "recover",
    "schedule_counts",
    "transcript",
    "verify_schedule",
]

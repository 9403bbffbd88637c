"""Append-only audit ledger for observation sessions.

A session freezes one pricing policy, accumulates observation events
(each priced with the linear rule at recording time), and closes with a
consent decision. Events are never mutated or removed; sequence numbers
are dense and start at 1. The production cost enters once per session,
at closure, not per event.

Per-event surcharges are quantized onto the money grid when recorded,
so the ledger total is a sum of representable amounts; it may drift
from the single-shot price of the summed leakage by rounding, bounded
by half a minor unit per event. Totals also assume events are
independent; every report carries a fixed disclaimer saying so.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path

from .errors import ParseError, ValidationError
from .infotheory import NATS, InfoQuantity
from .pricing import LINEAR, PricingPolicy, quantize_money, to_decimal

CONSENT_PENDING = "pending"
CONSENT_GRANTED = "granted"
CONSENT_DENIED = "denied"
_DECISIONS = (CONSENT_GRANTED, CONSENT_DENIED)

#: Fixed line carried verbatim on every closure report.
DISCLAIMER = (
    "note: total leakage sums per-event values assuming independent "
    "observations; correlated events are not adjusted for"
)


@dataclass(frozen=True)
class AuditEvent:
    """One recorded observation: what was observed, how much it leaked,
    and what that cost. Surcharge is already on the money grid."""

    sequence: int
    timestamp: str
    observable: str
    leakage_nats: float
    surcharge: Decimal
    rule: str

    def __post_init__(self) -> None:
        if self.sequence < 1:
            raise ValidationError("event sequence numbers start at 1")
        if not self.leakage_nats >= 0:
            raise ValidationError(
                f"event leakage must be nonnegative, got {self.leakage_nats!r}"
            )
        if self.surcharge < 0:
            raise ValidationError("event surcharge must be nonnegative")


@dataclass
class SessionLedger:
    """Ordered events under a frozen policy, with a consent state.

    Consent starts ``pending``; closing moves it to ``granted`` or
    ``denied`` exactly once, after which no event may be appended.
    """

    session_id: str
    policy: PricingPolicy
    consent: str = CONSENT_PENDING
    events: list[AuditEvent] = field(default_factory=list)

    @property
    def total_leakage_nats(self) -> float:
        # fixed left-to-right order keeps the float sum reproducible
        total = 0.0
        for event in self.events:
            total += event.leakage_nats
        return total

    @property
    def total_surcharge(self) -> Decimal:
        total = Decimal("0.0000")
        for event in self.events:
            total += event.surcharge
        return total

    @property
    def grand_total(self) -> Decimal:
        """Production cost (once per session) plus all event surcharges."""
        return self.policy.production_cost + self.total_surcharge


def open_session(policy: PricingPolicy, session_id: str | None = None) -> SessionLedger:
    """Start an empty ledger with consent pending.

    Events are priced linearly as they arrive, so the policy must carry
    a scalar rate.
    """
    if policy.rate_per_nat is None:
        raise ValidationError(
            "sessions price events with the linear rule; the policy needs a scalar rate"
        )
    return SessionLedger(session_id=session_id or uuid.uuid4().hex, policy=policy)


def record_event(
    ledger: SessionLedger,
    observable: str,
    leakage: InfoQuantity,
    timestamp: str | None = None,
) -> AuditEvent:
    """Append one observation event and return it.

    The surcharge is the policy rate times the leakage in nats,
    quantized onto the money grid at recording time.
    """
    if ledger.consent != CONSENT_PENDING:
        raise ValidationError(
            f"session is closed ({ledger.consent}); no further events"
        )
    nats = leakage.in_nats()
    surcharge = quantize_money(to_decimal(ledger.policy.rate_per_nat) * to_decimal(nats))
    event = AuditEvent(
        sequence=len(ledger.events) + 1,
        timestamp=timestamp or datetime.now(timezone.utc).isoformat(),
        observable=str(observable),
        leakage_nats=nats,
        surcharge=surcharge,
        rule=LINEAR,
    )
    ledger.events.append(event)
    return event


@dataclass(frozen=True)
class SessionReport:
    """Immutable closure summary of one session."""

    session_id: str
    decision: str
    currency: str
    events: tuple[AuditEvent, ...]
    total_leakage: InfoQuantity
    production_cost: Decimal
    total_surcharge: Decimal
    grand_total: Decimal
    disclaimer: str = DISCLAIMER

    def render(self) -> str:
        """Human-readable summary; deterministic for identical reports."""
        lines = [
            f"session {self.session_id}",
            f"decision: {self.decision}",
            "",
            "  seq  timestamp                  observable            "
            "leakage (nats)  surcharge",
        ]
        for event in self.events:
            lines.append(
                f"  {event.sequence:>3}  {event.timestamp:<25}  "
                f"{event.observable:<20}  {event.leakage_nats:>14.6f}  "
                f"{event.surcharge:>10}"
            )
        nats = self.total_leakage.in_nats()
        bits = self.total_leakage.in_bits()
        lines += [
            "",
            f"total leakage:   {nats:.6f} nats ({bits:.6f} bits)",
            f"production cost: {quantize_money(self.production_cost)} {self.currency}",
            f"total surcharge: {self.total_surcharge} {self.currency}",
            f"grand total:     {quantize_money(self.grand_total)} {self.currency}",
            self.disclaimer,
        ]
        return "\n".join(lines) + "\n"


def build_report(ledger: SessionLedger) -> SessionReport:
    """Summarize a closed ledger; open sessions have nothing to report."""
    if ledger.consent == CONSENT_PENDING:
        raise ValidationError("session is still open; close it before reporting")
    return SessionReport(
        session_id=ledger.session_id,
        decision=ledger.consent,
        currency=ledger.policy.currency,
        events=tuple(ledger.events),
        total_leakage=InfoQuantity(ledger.total_leakage_nats, NATS),
        production_cost=ledger.policy.production_cost,
        total_surcharge=ledger.total_surcharge,
        grand_total=ledger.grand_total,
    )


def close_session(ledger: SessionLedger, decision: str) -> SessionReport:
    """Move consent from pending to the decision and return the report.

    Closing twice is an error; the ledger stays append-only throughout.
    """
    if decision not in _DECISIONS:
        raise ValidationError(
            f"decision must be one of {_DECISIONS}, got {decision!r}"
        )
    if ledger.consent != CONSENT_PENDING:
        raise ValidationError(f"session already closed ({ledger.consent})")
    ledger.consent = decision
    return build_report(ledger)


# ---------------------------------------------------------------------------
# file format: line-delimited JSON, one header, one line per event,
# one closure line once the session is decided


def _policy_payload(policy: PricingPolicy) -> dict:
    return {
        "c_p": str(policy.production_cost),
        "lambda": policy.rate_per_nat,
        "lambda_unit": "per_nat",
        "pi_max": str(policy.max_penalty) if policy.max_penalty is not None else None,
        "currency": policy.currency,
        "exchange_rate": policy.exchange_rate,
    }


def write_ledger(ledger: SessionLedger, path) -> None:
    """Serialize header, events in order, and the closure line if closed."""
    lines = [
        json.dumps(
            {
                "session": ledger.session_id,
                "policy": _policy_payload(ledger.policy),
                "consent": ledger.consent,
            }
        )
    ]
    for event in ledger.events:
        lines.append(
            json.dumps(
                {
                    "sequence": event.sequence,
                    "timestamp": event.timestamp,
                    "observable": event.observable,
                    "leakage_nats": event.leakage_nats,
                    "surcharge": str(event.surcharge),
                    "rule": event.rule,
                }
            )
        )
    if ledger.consent != CONSENT_PENDING:
        lines.append(
            json.dumps(
                {
                    "decision": ledger.consent,
                    "total_leakage_nats": ledger.total_leakage_nats,
                    "total_surcharge": str(ledger.total_surcharge),
                    "grand_total": str(quantize_money(ledger.grand_total)),
                }
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_ledger(path) -> SessionLedger:
    """Rebuild a ledger from its file; round-trips :func:`write_ledger`."""
    p = Path(path)
    if not p.exists():
        raise ParseError(f"{p}: no such file")
    records = []
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append((lineno, json.loads(line)))
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p}:{lineno}: invalid ledger line: {exc}") from None
    if not records:
        raise ParseError(f"{p}: empty ledger file")
    _, header = records[0]
    if not isinstance(header, dict) or "session" not in header or "policy" not in header:
        raise ParseError(f"{p}: first ledger line must be the session header")
    raw_policy = header["policy"]
    try:
        policy = PricingPolicy(
            production_cost=Decimal(raw_policy["c_p"]),
            rate_per_nat=raw_policy.get("lambda"),
            max_penalty=(
                Decimal(raw_policy["pi_max"])
                if raw_policy.get("pi_max") is not None
                else None
            ),
            currency=raw_policy.get("currency", "USD"),
            exchange_rate=raw_policy.get("exchange_rate"),
        )
    except (KeyError, TypeError, ArithmeticError) as exc:
        raise ParseError(f"{p}: malformed policy header: {exc}") from None
    consent = header.get("consent", CONSENT_PENDING)
    if consent not in (CONSENT_PENDING, *_DECISIONS):
        raise ParseError(f"{p}: unknown consent state {consent!r}")
    events: list[AuditEvent] = []
    closure = None
    for lineno, record in records[1:]:
        if "decision" in record:
            if closure is not None:
                raise ParseError(f"{p}:{lineno}: duplicate closure line")
            closure = (lineno, record)
            continue
        if closure is not None:
            raise ParseError(f"{p}:{lineno}: event after the closure line")
        try:
            event = AuditEvent(
                sequence=int(record["sequence"]),
                timestamp=str(record["timestamp"]),
                observable=str(record["observable"]),
                leakage_nats=float(record["leakage_nats"]),
                surcharge=Decimal(record["surcharge"]),
                rule=str(record["rule"]),
            )
        except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
            raise ParseError(f"{p}:{lineno}: malformed event: {exc}") from None
        if event.sequence != len(events) + 1:
            raise ParseError(
                f"{p}:{lineno}: event sequence {event.sequence} breaks the "
                f"dense 1..n order"
            )
        events.append(event)
    if closure is not None:
        lineno, record = closure
        if record.get("decision") != consent:
            raise ParseError(
                f"{p}:{lineno}: closure decision {record.get('decision')!r} "
                f"contradicts header consent {consent!r}"
            )
    elif consent != CONSENT_PENDING:
        raise ParseError(f"{p}: consent is {consent!r} but no closure line found")
    return SessionLedger(
        session_id=str(header["session"]),
        policy=policy,
        consent=consent,
        events=events,
    )

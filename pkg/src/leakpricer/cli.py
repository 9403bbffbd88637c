"""Command-line front door.

Every subcommand is deterministic given its input files, flags, and
seed: session identifiers are content hashes, timestamps come from the
event stream (defaulting to the epoch), and numeric display is fixed at
six decimal places for information and four for money. Exit codes: 0
success, 2 file or parse problems, 3 validation or domain problems.
"""

from __future__ import annotations

import functools
import hashlib
import json
import sys
from decimal import Decimal
from pathlib import Path

import click

from . import __version__, audit as audit_lib, estimation, infotheory, pricing
from . import schema as schema_lib
from .errors import ParseError, ValidationError
from .infotheory import BITS, NATS, InfoQuantity
from .pricing import EXPOSURE, LINEAR, MONEY_QUANTUM, WEIGHTED, quantize_money

EXIT_PARSE = 2
EXIT_VALIDATION = 3

#: Default per-event timestamp when the stream does not supply one.
EPOCH = "1970-01-01T00:00:00+00:00"

UNIT_CHOICE = click.Choice([NATS, BITS])
FORMAT_CHOICE = click.Choice(["text", "machine"])


def _fmt_info(value: float) -> str:
    return f"{value:.6f}"


def _fmt_money(amount) -> str:
    return str(quantize_money(amount))


def _emit(doc: dict) -> None:
    click.echo(json.dumps(doc))


def _handle_errors(command):
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ParseError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_PARSE)
        except ValidationError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VALIDATION)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_PARSE)

    return wrapper


@click.group()
@click.version_option(version=__version__, prog_name="leakpricer")
def main() -> None:
    """Measure how much an observable leaks about a protected profile
    and price the leakage as a surcharge."""


@main.command()
@click.option("--table", "table_path", required=True, help="Joint-table file.")
@click.option("--unit", type=UNIT_CHOICE, default=NATS, show_default=True)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def entropy(table_path, unit, fmt):
    """Entropy of the protected profile's marginal in a joint table."""
    table = infotheory.read_joint_table(table_path)
    quantity = infotheory.entropy(table.s_marginal(), unit)
    if fmt == "machine":
        _emit({"quantity": "profile_entropy", "value": quantity.value, "unit": unit})
    else:
        click.echo(f"H(S) = {_fmt_info(quantity.value)} {unit}")


@main.command()
@click.option("--table", "table_path", required=True, help="Joint-table file.")
@click.option("--unit", type=UNIT_CHOICE, default=NATS, show_default=True)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def mi(table_path, unit, fmt):
    """Mutual information between the observable and the profile."""
    table = infotheory.read_joint_table(table_path)
    quantity = infotheory.mutual_information(table, unit)
    if fmt == "machine":
        _emit({"quantity": "mutual_information", "value": quantity.value, "unit": unit})
    else:
        click.echo(f"I(X;S) = {_fmt_info(quantity.value)} {unit}")


def _parse_bin_flag(text: str) -> tuple[str, schema_lib.BinRule]:
    name, eq, rest = text.partition("=")
    method, colon, args = rest.partition(":")
    if not eq or not colon or not name or not args:
        raise ValidationError(
            f"--bins expects NAME=METHOD:ARGS (methods: equal-width, quantile, "
            f"cuts), got {text!r}"
        )
    try:
        if method == "equal-width":
            return name, schema_lib.BinRule.equal_width(int(args))
        if method == "quantile":
            return name, schema_lib.BinRule.quantile(int(args))
        if method == "cuts":
            return name, schema_lib.BinRule.explicit(
                [float(c) for c in args.split(",")]
            )
    except ValueError:
        raise ValidationError(f"--bins has non-numeric arguments: {text!r}") from None
    raise ValidationError(f"unknown binning method {method!r} in {text!r}")


@main.command()
@click.option("--schema", "schema_path", required=True, help="Schema file.")
@click.option("--samples", "samples_path", required=True, help="Sample file.")
@click.option(
    "--bins",
    "bin_flags",
    multiple=True,
    help="Binning rule per continuous attribute, e.g. age=equal-width:4, "
    "score=quantile:2, delay=cuts:0.33,0.66. Repeatable.",
)
@click.option("--out", "out_path", default=None, help="Write here instead of stdout.")
@_handle_errors
def discretize(schema_path, samples_path, bin_flags, out_path):
    """Bin continuous attributes so exact counting applies."""
    schema = schema_lib.load_schema(schema_path)
    samples = schema_lib.load_samples(samples_path, schema)
    policy = schema_lib.BinningPolicy(dict(_parse_bin_flag(f) for f in bin_flags))
    binned = schema_lib.discretize(samples, policy)
    text = schema_lib.samples_to_csv(binned)
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {binned.n} rows to {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--schema", "schema_path", required=True, help="Schema file.")
@click.option("--samples", "samples_path", required=True, help="Sample file.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--bandwidth",
    "bandwidth_flags",
    multiple=True,
    help="Kernel width override, NAME=WIDTH. Repeatable; Silverman otherwise.",
)
@click.option(
    "--method",
    type=click.Choice(["auto", "plugin", "kde"]),
    default="auto",
    show_default=True,
    help="auto routes by schema kind: counts when all-categorical, KDE otherwise.",
)
@click.option("--unit", type=UNIT_CHOICE, default=NATS, show_default=True)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def estimate(schema_path, samples_path, seed, bandwidth_flags, method, unit, fmt):
    """Estimate leakage I(X;S) from paired samples."""
    schema = schema_lib.load_schema(schema_path)
    samples = schema_lib.load_samples(samples_path, schema)
    bandwidths = {}
    for flag in bandwidth_flags:
        name, sep, width = flag.partition("=")
        if not sep or not name:
            raise ValidationError(f"--bandwidth expects NAME=WIDTH, got {flag!r}")
        try:
            bandwidths[name] = estimation.Bandwidth(float(width))
        except ValueError:
            raise ValidationError(
                f"--bandwidth has a non-numeric width: {flag!r}"
            ) from None
    chosen = {"auto": None, "plugin": estimation.PLUGIN, "kde": estimation.KDE_MC}[method]
    result = estimation.estimate_mi(samples, bandwidths or None, seed=seed, method=chosen)
    shown = result.value.to(unit)
    if fmt == "machine":
        _emit(
            {
                "quantity": "mutual_information_estimate",
                "value": shown.value,
                "unit": unit,
                "value_nats": result.value.value,
                "raw_nats": result.raw_nats,
                "method": result.method,
                "n": result.n,
                "seed": result.seed,
                "bandwidths": result.bandwidths,
            }
        )
        return
    click.echo(f"method = {result.method}")
    click.echo(f"n = {result.n}")
    if result.seed is not None:
        click.echo(f"seed = {result.seed}")
    if result.bandwidths:
        for name in sorted(result.bandwidths):
            click.echo(f"bandwidth[{name}] = {_fmt_info(result.bandwidths[name])}")
    click.echo(f"I(X;S) = {_fmt_info(shown.value)} {unit}")


def _infer_rule(policy) -> str:
    if policy.subset_rates_per_nat is not None:
        return WEIGHTED
    if policy.rate_per_nat is not None:
        return LINEAR
    return EXPOSURE


@main.command()
@click.option("--policy", "policy_path", required=True, help="Pricing-policy file.")
@click.option(
    "--rule",
    type=click.Choice([LINEAR, WEIGHTED, EXPOSURE]),
    default=None,
    help="Defaults to whatever the policy parameterizes.",
)
@click.option("--leakage", type=float, default=None, help="Leakage for the linear rule.")
@click.option("--table", "table_path", default=None, help="Joint table (weighted, exposure).")
@click.option("--schema", "schema_path", default=None, help="Schema file (weighted).")
@click.option("--unit", type=UNIT_CHOICE, default=NATS, show_default=True,
              help="Unit of --leakage and of the displayed leakage.")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def price(policy_path, rule, leakage, table_path, schema_path, unit, fmt):
    """Price an observable: production cost plus leakage surcharge."""
    policy = pricing.load_policy(policy_path)
    rule = rule or _infer_rule(policy)
    subset_report = None
    if rule == LINEAR:
        if leakage is None:
            raise ValidationError("linear pricing needs --leakage")
        quote = pricing.price_linear(policy, InfoQuantity(leakage, unit))
    elif rule == EXPOSURE:
        if table_path is None:
            raise ValidationError("exposure pricing needs --table")
        quote = pricing.price_exposure(policy, infotheory.read_joint_table(table_path))
    else:
        if table_path is None or schema_path is None:
            raise ValidationError("weighted pricing needs --table and --schema")
        schema = schema_lib.load_schema(schema_path)
        table = infotheory.read_joint_table(table_path)
        subset_report = infotheory.intersection_leakage_report(table, schema)
        quote = pricing.price_weighted(policy, subset_report)
    shown = quote.leakage.to(unit)
    if fmt == "machine":
        doc = {
            "rule": quote.rule,
            "leakage": shown.value,
            "unit": unit,
            "leakage_nats": quote.leakage.value,
            "production": _fmt_money(quote.production_component),
            "surcharge": _fmt_money(quote.surcharge_component),
            "total": _fmt_money(quote.total),
            "currency": quote.currency,
        }
        if subset_report is not None:
            doc["subsets"] = {
                key: subset_report[key].in_nats()
                for key in policy.subset_rates_per_nat
            }
        _emit(doc)
        return
    click.echo(f"rule = {quote.rule}")
    if subset_report is not None:
        for key in policy.subset_rates_per_nat:
            value = subset_report[key].to(unit)
            click.echo(f"leakage[{key}] = {_fmt_info(value.value)} {unit}")
    click.echo(f"leakage = {_fmt_info(shown.value)} {unit}")
    click.echo(f"production = {_fmt_money(quote.production_component)} {quote.currency}")
    click.echo(f"surcharge = {_fmt_money(quote.surcharge_component)} {quote.currency}")
    click.echo(f"total = {_fmt_money(quote.total)} {quote.currency}")


@main.command()
@click.option("--pi-max", required=True, help="Statutory maximum penalty.")
@click.option("--entropy", "entropy_value", type=float, required=True,
              help="Baseline profile entropy H(S).")
@click.option("--unit", type=UNIT_CHOICE, default=NATS, show_default=True,
              help="Unit of --entropy.")
@click.option("--currency", default="USD", show_default=True)
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def calibrate(pi_max, entropy_value, unit, currency, fmt):
    """Rate per nat that reaches the maximum penalty at full disclosure."""
    rate = pricing.calibrate_lambda(
        pricing.to_decimal(pi_max), InfoQuantity(entropy_value, unit)
    )
    if fmt == "machine":
        _emit({"lambda_per_nat": rate, "currency": currency})
    else:
        click.echo(f"lambda = {rate:.4f} {currency} per nat")


@main.command()
@click.option("--policy", "policy_path", required=True, help="Pricing-policy file.")
@click.option("--rule", type=click.Choice([LINEAR, EXPOSURE]), default=LINEAR,
              show_default=True)
@click.option("--start", type=float, default=0.0, show_default=True,
              help="First leakage value, nats.")
@click.option("--stop", type=float, required=True, help="Last leakage value, nats.")
@click.option("--step", type=float, required=True, help="Leakage increment, nats.")
@click.option("--entropy", "entropy_value", type=float, default=None,
              help="Baseline H(S) in nats; required by the exposure rule.")
@click.option("--out", "out_path", default=None, help="Write here instead of stdout.")
@_handle_errors
def curve(policy_path, rule, start, stop, step, entropy_value, out_path):
    """Tabulate price against leakage for plotting."""
    policy = pricing.load_policy(policy_path)
    baseline = InfoQuantity(entropy_value, NATS) if entropy_value is not None else None
    points = pricing.price_curve(policy, rule, start, stop, step, baseline)
    lines = ["leakage,value"]
    lines += [f"{_fmt_info(nats)},{_fmt_money(total)}" for nats, total in points]
    text = "\n".join(lines) + "\n"
    if out_path:
        Path(out_path).write_text(text, encoding="utf-8")
        click.echo(f"wrote {len(points)} points to {out_path}")
    else:
        click.echo(text, nl=False)


def _read_event_stream(path):
    """Parse observation events plus an optional decision line.

    Line format: ``{"observable": ..., "leakage": ..., "unit": ...,
    "timestamp": ...}`` with unit and timestamp optional, or
    ``{"decision": "granted"|"denied"}`` exactly once, after which no
    further event may appear.
    """
    p = Path(path)
    if not p.exists():
        raise ParseError(f"{p}: no such file")
    events = []
    decision = None
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{p}:{lineno}: invalid event line: {exc}") from None
        if not isinstance(record, dict):
            raise ParseError(f"{p}:{lineno}: event line must be a JSON object")
        if "decision" in record:
            unknown = set(record) - {"decision"}
            if unknown:
                raise ValidationError(
                    f"{p}:{lineno}: unknown key {sorted(unknown)[0]!r} on a decision line"
                )
            if decision is not None:
                raise ValidationError(f"{p}:{lineno}: duplicate decision line")
            if record["decision"] not in (audit_lib.CONSENT_GRANTED, audit_lib.CONSENT_DENIED):
                raise ValidationError(
                    f"{p}:{lineno}: decision must be granted or denied, "
                    f"got {record['decision']!r}"
                )
            decision = record["decision"]
            continue
        if decision is not None:
            raise ValidationError(f"{p}:{lineno}: event after the decision line")
        unknown = set(record) - {"observable", "leakage", "unit", "timestamp"}
        if unknown:
            raise ValidationError(
                f"{p}:{lineno}: unknown event key {sorted(unknown)[0]!r}"
            )
        if "observable" not in record or "leakage" not in record:
            raise ValidationError(
                f"{p}:{lineno}: event needs 'observable' and 'leakage'"
            )
        try:
            amount = float(record["leakage"])
        except (TypeError, ValueError):
            raise ValidationError(
                f"{p}:{lineno}: non-numeric leakage {record['leakage']!r}"
            ) from None
        try:
            quantity = InfoQuantity(amount, record.get("unit", NATS))
        except ValidationError as exc:
            raise ValidationError(f"{p}:{lineno}: {exc}") from None
        events.append(
            {
                "observable": str(record["observable"]),
                "leakage": quantity,
                "timestamp": str(record.get("timestamp", EPOCH)),
            }
        )
    return events, decision


def _content_session_id(*paths) -> str:
    digest = hashlib.sha256()
    for path in paths:
        digest.update(Path(path).read_bytes())
        digest.update(b"\x00")
    return digest.hexdigest()[:16]


@main.command(name="audit")
@click.option("--policy", "policy_path", required=True, help="Pricing-policy file.")
@click.option("--events", "events_path", required=True, help="Event-stream file.")
@click.option("--out", "ledger_path", required=True, help="Ledger file to write.")
@click.option("--decision", type=click.Choice(["granted", "denied"]), default=None,
              help="Consent decision when the stream carries none.")
@click.option("--session-id", default=None,
              help="Defaults to a content hash of policy and events.")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def audit_cmd(policy_path, events_path, ledger_path, decision, session_id, fmt):
    """Replay an event stream into a priced, closed ledger."""
    policy = pricing.load_policy(policy_path)
    events, stream_decision = _read_event_stream(events_path)
    if stream_decision is not None and decision is not None:
        raise ValidationError(
            "decision given twice: in the stream and as --decision"
        )
    final = stream_decision or decision
    if final is None:
        raise ValidationError(
            "the stream carries no decision line; pass --decision"
        )
    ledger = audit_lib.open_session(
        policy, session_id or _content_session_id(policy_path, events_path)
    )
    for event in events:
        audit_lib.record_event(
            ledger, event["observable"], event["leakage"], timestamp=event["timestamp"]
        )
    report = audit_lib.close_session(ledger, final)
    # recompute through the pricing layer; rounding drift is bounded by
    # half a minor unit per recorded event
    single_shot = pricing.price_linear(policy, report.total_leakage)
    drift_bound = MONEY_QUANTUM * Decimal(len(events) + 1) / 2
    if abs(report.grand_total - single_shot.total) > drift_bound:
        raise ValidationError(
            f"ledger total {report.grand_total} drifted from single-shot "
            f"pricing {single_shot.total} beyond {drift_bound}"
        )
    audit_lib.write_ledger(ledger, ledger_path)
    _print_report(report, fmt)


def _print_report(report, fmt):
    if fmt == "machine":
        _emit(
            {
                "session": report.session_id,
                "decision": report.decision,
                "events": len(report.events),
                "total_leakage_nats": report.total_leakage.in_nats(),
                "production_cost": _fmt_money(report.production_cost),
                "total_surcharge": str(report.total_surcharge),
                "grand_total": _fmt_money(report.grand_total),
                "currency": report.currency,
                "disclaimer": report.disclaimer,
            }
        )
    else:
        click.echo(report.render(), nl=False)


@main.command(name="report")
@click.option("--ledger", "ledger_path", required=True, help="Ledger file to read.")
@click.option("--format", "fmt", type=FORMAT_CHOICE, default="text", show_default=True)
@_handle_errors
def report_cmd(ledger_path, fmt):
    """Re-render the closure report of an existing ledger."""
    ledger = audit_lib.read_ledger(ledger_path)
    _print_report(audit_lib.build_report(ledger), fmt)


if __name__ == "__main__":
    main()

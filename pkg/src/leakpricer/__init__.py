"""Price the privacy leakage of observable data.

The library measures how much an observable X reveals about a protected
profile S as the mutual information I(X;S), reports the leaked fraction
of the profile's entropy, and converts leakage into a monetary
surcharge on top of a production cost: linearly per nat, as weighted
per-subset rates, or as a fraction of a statutory maximum penalty.
An append-only session ledger prices observation events as they happen
and closes on an explicit consent decision.
"""

from .audit import (
    CONSENT_DENIED,
    CONSENT_GRANTED,
    CONSENT_PENDING,
    DISCLAIMER,
    AuditEvent,
    SessionLedger,
    SessionReport,
    build_report,
    close_session,
    open_session,
    read_ledger,
    record_event,
    write_ledger,
)
from .errors import (
    EstimationError,
    LeakPricerError,
    ParseError,
    ValidationError,
)
from .estimation import (
    KDE_MC,
    PLUGIN,
    Bandwidth,
    MIEstimate,
    empirical_joint,
    estimate_mi,
    kde_log_densities,
    mc_mutual_information,
    silverman_bandwidth,
)
from .infotheory import (
    BITS,
    LN2,
    NATS,
    InfoQuantity,
    JointTable,
    conditional_entropy,
    convert_units,
    entropy,
    exposure_ratio,
    intersection_leakage_report,
    marginal_mi,
    mutual_information,
    read_joint_table,
    subset_key,
    write_joint_table,
)
from .pricing import (
    EXPOSURE,
    LINEAR,
    MONEY_QUANTUM,
    WEIGHTED,
    PriceQuote,
    PricingPolicy,
    calibrate_lambda,
    convert_lambda,
    load_policy,
    price_curve,
    price_exposure,
    price_linear,
    price_weighted,
    quantize_money,
    to_decimal,
)
from .schema import (
    AttributeSpec,
    BinningPolicy,
    BinRule,
    ProfileSchema,
    SampleSet,
    build_intersection_labels,
    discretize,
    load_samples,
    load_schema,
    samples_to_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AttributeSpec",
    "AuditEvent",
    "BITS",
    "Bandwidth",
    "BinRule",
    "BinningPolicy",
    "CONSENT_DENIED",
    "CONSENT_GRANTED",
    "CONSENT_PENDING",
    "DISCLAIMER",
    "EXPOSURE",
    "EstimationError",
    "InfoQuantity",
    "JointTable",
    "KDE_MC",
    "LINEAR",
    "LN2",
    "LeakPricerError",
    "MIEstimate",
    "MONEY_QUANTUM",
    "NATS",
    "PLUGIN",
    "ParseError",
    "PriceQuote",
    "PricingPolicy",
    "ProfileSchema",
    "SampleSet",
    "SessionLedger",
    "SessionReport",
    "ValidationError",
    "WEIGHTED",
    "build_intersection_labels",
    "build_report",
    "calibrate_lambda",
    "close_session",
    "conditional_entropy",
    "convert_lambda",
    "convert_units",
    "discretize",
    "empirical_joint",
    "entropy",
    "estimate_mi",
    "exposure_ratio",
    "intersection_leakage_report",
    "kde_log_densities",
    "load_policy",
    "load_samples",
    "load_schema",
    "marginal_mi",
    "mc_mutual_information",
    "mutual_information",
    "open_session",
    "price_curve",
    "price_exposure",
    "price_linear",
    "price_weighted",
    "quantize_money",
    "read_joint_table",
    "read_ledger",
    "record_event",
    "samples_to_csv",
    "silverman_bandwidth",
    "subset_key",
    "to_decimal",
    "write_joint_table",
    "write_ledger",
]

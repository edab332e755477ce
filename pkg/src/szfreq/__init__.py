"""Structured seizure-frequency labels: parsing, normalization, binning,
synthetic-letter pipelines, and evaluation.

The label scheme covers six surface forms (unknown, no reference, seizure
freedom, plain rates, clustered rates, and unknown-rate clusters). Every
label normalizes deterministically to a seizures-per-month value, which
two category schemes then bin for reporting: a fine 10-way one and a
coarse 4-way one.
"""

from .binning import (
    BIN_TABLE,
    MAX_BINNABLE,
    PragmaticClass,
    PuristClass,
    bin_pragmatic,
    bin_purist,
    coarsen,
)
from .clients import (
    ClientConfig,
    CoTExemplar,
    HttpTeacherClient,
    Inference,
    MockTeacherClient,
    ScriptedTeacherClient,
    TeacherClient,
)
from .config import DEFAULT_RUN_CONFIG, RunConfig
from .corpus import (
    BaseLetter,
    GoldRecord,
    PredictionRecord,
    align_by_id,
    load_base_letters,
    load_exemplars,
    load_gold,
    load_identities,
    load_letters,
    load_pairs,
    load_predictions,
    load_templates,
    read_jsonl,
    save_base_letters,
    save_exemplars,
    save_gold,
    save_identities,
    save_letters,
    save_pairs,
    save_predictions,
    save_templates,
    write_jsonl,
)
from .errors import (
    ClientError,
    DataError,
    DomainError,
    FillerOutOfDomain,
    LabelParseError,
    MalformedDraft,
    MissingIdentity,
    MissingSlot,
    ParseError,
    SzfreqError,
    TemplateError,
    UnresolvedPlaceholder,
)
from .formats import (
    CotPrediction,
    EvidenceCheck,
    Prediction,
    PredictionFormat,
    check_evidence,
    parse_format1,
    parse_format2,
    parse_format3,
    parse_format4,
    parse_prediction,
    to_categories,
)
from .labels import (
    DEFAULT_NORM_CONFIG,
    MULTIPLE,
    NO_SEIZURE_REFERENCE,
    UNKNOWN,
    UNKNOWN_FREQUENCY,
    Cluster,
    Exact,
    FrequencyLabel,
    Multiple,
    NoSeizureReference,
    NormConfig,
    Range,
    Rate,
    SeizureFree,
    TimeUnit,
    Unknown,
    UnknownCluster,
    format_label,
    normalize,
    parse_label,
    raw_frequency,
    resolve_quantity,
)
from .metrics import (
    SYSTEM_INVALID,
    Aggregate,
    ClassScores,
    Report,
    aggregate_metric_runs,
    aggregate_runs,
    class_report,
    confusion,
    distribution,
    render_confusion,
    render_distribution,
    render_report,
    report_from_matrix,
    report_to_dict,
)
from .pipeline import (
    DEFAULT_SCREENING_CONFIG,
    GroupStats,
    LetterRecord,
    PassResult,
    ScreeningConfig,
    ScreeningResult,
    ScreeningStats,
    VerificationOutcome,
    check_retention_soundness,
    draft_letter,
    find_exemplar,
    render_screening,
    run_screening,
    verify_letter,
)
from .scoring import (
    PRAGMATIC_CLASSES,
    PURIST_CLASSES,
    SchemeResult,
    evaluate_records,
    gold_categories,
    predicted_categories,
)
from .templates import (
    DescriptionPair,
    DescriptionTemplate,
    SyntheticIdentity,
    expand,
    expand_corpus,
    fill_placeholders,
    instantiate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""girt-forge: issue report template parsing, dataset construction,
generation, and evaluation."""

from .errors import BackendUnavailable, DataError, GirtForgeError, InvalidBackendOutput
from .irt import (
    HeadlineStyle,
    IrtBody,
    IrtMetadata,
    IssueReportTemplate,
    Section,
    Violation,
    parse_irt,
    render_irt,
    validate_irt,
)
from .instruct import (
    EMPTY_TOKEN,
    MASK_TOKEN,
    FieldValue,
    InstructPair,
    Instruction,
    build_instruction,
    expand_variants,
    mask_instruction,
    parse_instruction,
    serialize_instruction,
    split_dataset,
    summarize,
)
from .metrics import MetricScore, bleu, meteor, rouge1, rougeL, score_pair, tokenize
from .generate import (
    DecodingConfig,
    RemoteBackend,
    RetrievalBackend,
    RetrievalIndex,
    evaluate,
    remote_generate,
    retrieve_generate,
)

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailable",
    "DataError",
    "DecodingConfig",
    "EMPTY_TOKEN",
    "FieldValue",
    "GirtForgeError",
    "HeadlineStyle",
    "InstructPair",
    "Instruction",
    "InvalidBackendOutput",
    "IrtBody",
    "IrtMetadata",
    "IssueReportTemplate",
    "MASK_TOKEN",
    "MetricScore",
    "RemoteBackend",
    "RetrievalBackend",
    "RetrievalIndex",
    "Section",
    "Violation",
    "bleu",
    "build_instruction",
    "evaluate",
    "expand_variants",
    "mask_instruction",
    "meteor",
    "parse_instruction",
    "parse_irt",
    "remote_generate",
    "render_irt",
    "retrieve_generate",
    "rouge1",
    "rougeL",
    "score_pair",
    "serialize_instruction",
    "split_dataset",
    "summarize",
    "tokenize",
    "validate_irt",
]

"""Comment-driven refinement of community programming answers.

Curates benchmark instances from answer revision histories and labeled
comment threads, classifies comments as actionable or generic through a
model provider, refines answers under a strict editing policy, and scores
refinements against human-revised references with a full syntactic metric
suite and rank-based significance tests.
"""

from . import metrics, stats
from .concerns import (
    ClassificationScores,
    ConcernIdentification,
    ConcernPrediction,
    ConfusionCounts,
    confusion,
    identify_concerns,
    score,
)
from .curation import BenchmarkInstance, curate, curate_many, stratified_sample
from .harness import (
    InstanceResult,
    IntentLabel,
    IntentValue,
    QuartileReport,
    aggregate,
    compare_baseline,
    kappa_between,
    run_pipeline,
)
from .posts import (
    AnswerSegment,
    AnswerThread,
    AnswerVersion,
    Comment,
    Label,
    LanguageTag,
    QuartileTag,
    parse_revision_page,
    quartile_of,
    segment_answer,
)
from .providers import (
    ChatCompletionsProvider,
    DecodingParams,
    ReplayProvider,
    RecordingProvider,
    Transcript,
    TranscriptStore,
    record_replay_store,
    request_hash,
)
from .refiner import (
    RefinementRequest,
    RefinementResult,
    build_prompt,
    parse_result,
    refine,
)
from .stats import cohens_kappa, mann_whitney_u

__version__ = "0.1.0"

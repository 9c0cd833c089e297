"""Fall-detection toolkit for wearable inertial recordings.

Submodules: ingest (recording trees), synthetic (seeded generators), segment
(windowing and labels), features (scenario datasets), model (1D-CNN), metrics
(MCC and friends), hpo (Bayesian search), detector (sliding-window streaming),
cli (command-line entry points).
"""

from .activities import (
    ActivityCode,
    BodyPosition,
    LabelingScheme,
    SensorKind,
    all_activity_codes,
    label_for,
)
from .detector import (
    DetectionEvent,
    ReplayTrace,
    StreamReport,
    WindowConfig,
    evaluate_stream,
    merge_events,
    stream_detect,
)
from .features import (
    Example,
    FeatureDomain,
    PipelineId,
    Scenario,
    ScenarioDataset,
    assemble,
    build_dataset,
    magnitude,
    spectrum,
    split,
)
from .hpo import SearchSpace, StudyResult, Trial, run_study, suggest
from .ingest import SensorRecording, load_dataset, write_dataset
from .metrics import ConfusionMatrix, EvalReport, confusion, mcc, se_es_pr
from .model import (
    Cnn1dConfig,
    TrainedModel,
    build,
    classify,
    load_checkpoint,
    predict_proba,
    save_checkpoint,
    train,
)
from .segment import SegmentVector, padding_policy, segment_all, segment_recording
from .synthetic import SyntheticSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "ActivityCode",
    "BodyPosition",
    "Cnn1dConfig",
    "ConfusionMatrix",
    "DetectionEvent",
    "EvalReport",
    "Example",
    "FeatureDomain",
    "LabelingScheme",
    "PipelineId",
    "ReplayTrace",
    "Scenario",
    "ScenarioDataset",
    "SearchSpace",
    "SegmentVector",
    "SensorKind",
    "SensorRecording",
    "StreamReport",
    "StudyResult",
    "SyntheticSpec",
    "TrainedModel",
    "Trial",
    "WindowConfig",
    "all_activity_codes",
    "assemble",
    "build",
    "build_dataset",
    "classify",
    "confusion",
    "evaluate_stream",
    "generate_synthetic",
    "label_for",
    "load_checkpoint",
    "load_dataset",
    "magnitude",
    "mcc",
    "merge_events",
    "padding_policy",
    "predict_proba",
    "run_study",
    "save_checkpoint",
    "se_es_pr",
    "segment_all",
    "segment_recording",
    "spectrum",
    "split",
    "stream_detect",
    "suggest",
    "train",
    "write_dataset",
]

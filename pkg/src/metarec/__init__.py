"""metarec: profile datasets, benchmark classifiers with permutation-tested
significance, and recommend classifiers for new datasets from prior runs."""

__version__ = "0.1.0"

from .classifiers import (
    ClassifierConfig,
    TrainedModel,
    TrainingError,
    default_grid,
    fit,
    load_grid,
    make_config,
    predict,
)
from .data import (
    Dataset,
    DatasetError,
    DatasetManifest,
    EncodedData,
    impute_and_encode,
    load_dataset,
    split_one_vs_one,
)
from .evaluate import (
    AgreementMatrix,
    EvalReport,
    agreement_matrix,
    cdf_auc,
    discretize,
    leave_one_dataset_out,
    rank_of_recommendation,
)
from .features import FEATURE_NAMES, MetaFeatureVector, featurize
from .recommend import Recommendation, nearest_datasets, normalize_features, recommend, score_candidates
from .significance import (
    ContingencyTable,
    CvOutcome,
    Kfold,
    Loocv,
    SignificanceResult,
    contingency_table,
    cv_error,
    default_protocol,
    f_score,
    permutation_test,
)
from .store import (
    ExperimentRow,
    ExperimentTable,
    RunReport,
    TableFormatError,
    load_table,
    rows_for_dataset,
    run_experiments,
    save_table,
)

__all__ = [
    "__version__",
    "AgreementMatrix",
    "ClassifierConfig",
    "ContingencyTable",
    "CvOutcome",
    "Dataset",
    "DatasetError",
    "DatasetManifest",
    "EncodedData",
    "EvalReport",
    "ExperimentRow",
    "ExperimentTable",
    "FEATURE_NAMES",
    "Kfold",
    "Loocv",
    "MetaFeatureVector",
    "Recommendation",
    "RunReport",
    "SignificanceResult",
    "TableFormatError",
    "TrainedModel",
    "TrainingError",
    "agreement_matrix",
    "cdf_auc",
    "contingency_table",
    "cv_error",
    "default_grid",
    "default_protocol",
    "discretize",
    "f_score",
    "featurize",
    "fit",
    "impute_and_encode",
    "leave_one_dataset_out",
    "load_dataset",
    "load_grid",
    "load_table",
    "make_config",
    "nearest_datasets",
    "normalize_features",
    "permutation_test",
    "predict",
    "rank_of_recommendation",
    "recommend",
    "rows_for_dataset",
    "run_experiments",
    "save_table",
    "score_candidates",
    "split_one_vs_one",
]

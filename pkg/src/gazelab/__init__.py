"""Gaze-error analysis toolkit.

Converts raw eye-tracker sessions to angular errors, cleans and
characterises them, augments the data, builds labelled features and trains
from-scratch classifiers and regression models that identify and predict
the operating condition behind the errors.
"""

from .dataset import (
    CONDITIONS,
    GazeRecord,
    GazeSession,
    ScreenConfig,
    SessionMeta,
    fill_missing,
    load_session,
    make_aoi_grid,
    save_session,
)
from .geometry import (
    AngleSample,
    CATEGORIES,
    ErrorSeries,
    binocular_average,
    compute_errors,
    gt_angles,
    to_angles,
)
from .analysis import (
    DescriptiveStats,
    KdeCurve,
    SpatialErrorMap,
    clean_series,
    correlation_matrix,
    describe,
    iqr_outliers,
    kde,
    mad_outliers,
    median_filter,
    per_aoi_mean,
    spatial_error_map,
)
from .augment import (
    AugmentedSet,
    AugmentStrategy,
    augment_sample,
    cosine_convolve,
    flip_aoi,
    gaussian_noise,
    interpolate_variant,
    pink_noise,
    time_shift,
)
from .features import (
    FeatureVector,
    LabeledMatrix,
    assemble_dataset,
    build_feature,
    shuffle_split,
    standardize,
    tsne,
)
from .evaluate import (
    ConfusionMatrix,
    ModelSpec,
    RateReport,
    classification_report,
    grid_search,
    kfold_cv,
    learning_curve,
)
from .synth import ConditionProfile, profile_for, synth_session, synth_task_sessions

__version__ = "0.1.0"

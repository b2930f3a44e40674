"""From-scratch learning algorithms used across the pipeline."""

from .knn import KnnModel, knn_fit, knn_predict
from .svm import SvmModel, svm_fit, svm_predict, rbf_kernel
from .mlp import MlpModel, mlp_fit, mlp_predict
from .forest import ForestModel, forest_fit, forest_importance, forest_predict
from .linear import (
    ErrorModel,
    LinearFamilyModel,
    elastic_net_fit,
    export_error_model,
    linear_fit,
    linear_predict,
    poly_expand,
    rmse,
    write_error_model_csv,
)
from .persist import load_model, save_model

__all__ = [
    "KnnModel", "knn_fit", "knn_predict",
    "SvmModel", "svm_fit", "svm_predict", "rbf_kernel",
    "MlpModel", "mlp_fit", "mlp_predict",
    "ForestModel", "forest_fit", "forest_importance", "forest_predict",
    "LinearFamilyModel", "ErrorModel", "linear_fit", "linear_predict",
    "elastic_net_fit", "poly_expand", "rmse", "export_error_model",
    "write_error_model_csv",
    "save_model", "load_model",
]

from .baselines import (
    LinearBaseline,
    Predictor,
    history_baseline,
    history_predictor,
    lr_baseline_fit,
    lr_baseline_predict,
    model_predictor,
)
from .config import EvalConfig
from .exceptions import EmptyTrainingSetError, EvaluationError
from .export import export_probe, export_report, write_grid_csv, write_metrics_csv
from .metrics import mae, per_category, postprocess, rmse
from .probes import (
    ProbeResult,
    argmax_cell,
    chebyshev,
    dynamics_probe,
    rotate_cell,
    rotation_probe,
    semantics_probe,
)
from .report import EvalReport, evaluate

__all__ = (
    'EvalConfig',
    'EvalReport',
    'ProbeResult',
    'Predictor',
    'LinearBaseline',
    'rmse',
    'mae',
    'per_category',
    'postprocess',
    'evaluate',
    'history_baseline',
    'history_predictor',
    'lr_baseline_fit',
    'lr_baseline_predict',
    'model_predictor',
    'rotation_probe',
    'semantics_probe',
    'dynamics_probe',
    'argmax_cell',
    'chebyshev',
    'rotate_cell',
    'export_report',
    'export_probe',
    'write_grid_csv',
    'write_metrics_csv',
    'EvaluationError',
    'EmptyTrainingSetError',
)

"""Multi-class linear proximal SVMs arranged as a balanced bipartition tree."""

from .baselines import (
    OvoModel,
    OvrModel,
    predict_ovo,
    predict_ovo_batch,
    predict_ovr,
    predict_ovr_batch,
    train_ovo,
    train_ovr,
)
from .data_io import (
    Dataset,
    Standardizer,
    SyntheticSpec,
    apply_standardizer,
    fit_standardizer,
    generate_synthetic,
    load_csv,
    load_iris,
    load_libsvm,
    stratified_split,
    write_csv,
)
from .errors import (
    CoverageError,
    DegenerateInputError,
    DimensionError,
    HalfsplitError,
    InputError,
    ParameterError,
    ParseError,
    UndefinedMetricError,
)
from .metrics import (
    BinaryConfusion,
    MulticlassConfusion,
    accuracy,
    f1_macro_from_split,
    multiclass_accuracy,
    precision_recall_f1,
)
from .persistence import load_model, save_model
from .shard_engine import (
    ExecConfig,
    LabeledView,
    ShardPlan,
    run_confusion_job,
    run_parallel,
    run_training_job,
    shard_rows,
)
from .svm_core import (
    GramAccumulator,
    SvmPlane,
    accumulate_shard,
    classify_sign,
    decision_value,
    merge,
    solve_plane,
)
from .tree_builder import (
    BuildConfig,
    ClassPartition,
    Internal,
    Leaf,
    SvmTree,
    build_tree,
    enumerate_bipartitions,
    predict,
    predict_batch,
    select_best,
    train_node,
)

__version__ = "0.1.0"

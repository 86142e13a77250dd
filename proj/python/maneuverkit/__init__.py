"""CAN+GPS driving logs to maneuver classifiers.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its surface.
"""

from ._core import (
    Dataset,
    Error,
    ForestModel,
    FrameTable,
    ManeuverWindow,
    SvmModel,
    build_dataset,
    evaluate,
    extract_windows,
    feature_names,
    featurize_window,
    generate_dataset,
    generate_maneuver,
    label_names,
    parse_can_trace,
    parse_gps_log,
    read_subtrip,
    read_subtrip_dir,
    resample_cubic,
    split_stratified,
    sync_logs,
    train_forest,
    train_svm,
    unwrap_angle,
    wrap_360,
    write_subtrip,
)

__all__ = [
    "Dataset",
    "Error",
    "ForestModel",
    "FrameTable",
    "ManeuverWindow",
    "SvmModel",
    "build_dataset",
    "evaluate",
    "extract_windows",
    "feature_names",
    "featurize_window",
    "generate_dataset",
    "generate_maneuver",
    "label_names",
    "parse_can_trace",
    "parse_gps_log",
    "read_subtrip",
    "read_subtrip_dir",
    "resample_cubic",
    "split_stratified",
    "sync_logs",
    "train_forest",
    "train_svm",
    "unwrap_angle",
    "wrap_360",
    "write_subtrip",
]

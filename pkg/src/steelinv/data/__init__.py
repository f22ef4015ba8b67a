"""Steel dataset schema, ingestion, scaling and synthesis."""

from .dataset import Dataset, load_csv, split, write_csv
from .sampling import fresh_targets, sample_targets, target_grid
from .scaler import Scaler, fit_scaler, inverse_transform, transform
from .schema import FEATURE_NAMES, STEEL_SCHEMA, TARGET_NAME, FeatureSchema
from .synth import (
    SynthConfig,
    conditional_variance_floor,
    hardness_from_parameter,
    iso_parameter_time,
    many_to_one_witness,
    synth_generate,
    synth_witness,
    tempering_parameter,
)

__all__ = [
    "Dataset",
    "FEATURE_NAMES",
    "FeatureSchema",
    "STEEL_SCHEMA",
    "Scaler",
    "SynthConfig",
    "TARGET_NAME",
    "conditional_variance_floor",
    "fit_scaler",
    "fresh_targets",
    "hardness_from_parameter",
    "inverse_transform",
    "iso_parameter_time",
    "load_csv",
    "many_to_one_witness",
    "sample_targets",
    "split",
    "synth_generate",
    "synth_witness",
    "target_grid",
    "tempering_parameter",
    "transform",
    "write_csv",
]

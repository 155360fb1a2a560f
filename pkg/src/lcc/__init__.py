"""Logistic classifier chains for multi-label learning.

Fitting (ridge-penalized logistic links), deviance-based ordering search,
joint-mode inference, synthetic chain models and an experiment harness.
"""
from .chain import (
    BRModel,
    ChainModel,
    conditional_probability,
    joint_probability,
    load_model,
    save_model,
    train_br,
    train_chain,
)
from .dataio import Dataset, load_arff, load_csv, top_k_labels
from .inference import beam_mode, exhaustive_mode, greedy_mode, predict
from .logistic import LogisticFit, fit
from .ordering import find_ordering, loglik_ordering
from .speclink import CarrierFamily, carriers, spec_deviance
from .synthgen import model_spec, sample

__version__ = "0.1.0"

__all__ = [
    "BRModel", "CarrierFamily", "ChainModel", "Dataset", "LogisticFit",
    "beam_mode", "carriers", "conditional_probability", "exhaustive_mode", "find_ordering", "fit",
    "greedy_mode", "joint_probability", "load_arff", "load_csv", "load_model", "loglik_ordering",
    "model_spec", "predict", "sample", "save_model", "spec_deviance", "top_k_labels", "train_br",
    "train_chain",
]

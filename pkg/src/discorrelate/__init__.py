"""Simulate, analyze and cross-check discorrelated two-mode photonic states.

Photon-number grids are truncated Fock-space tensors; circuits are built
from beam splitters, loss channels and single-photon heralding.
"""

from .analysis import (JointDistribution, discorrelation_metric, joint_distribution,
                       logarithmic_negativity, reference_for, same_count_probability)
from .errors import DiscorrelationError, NumericalError, SpecError
from .fock import DensityOperator, PureState, normalize, partial_trace, tensor_product
from .optics import BALANCED, BeamSplitter, LossPoint, beam_splitter, loss_channel
from .states import coherent, fock, hom_state, smsv, tmsv

__version__ = "0.1.0"

__all__ = [
    "BALANCED", "BeamSplitter", "DensityOperator", "DiscorrelationError", "JointDistribution",
    "LossPoint", "NumericalError", "PureState", "SpecError", "beam_splitter", "coherent",
    "discorrelation_metric", "fock", "hom_state", "joint_distribution", "logarithmic_negativity",
    "loss_channel", "normalize", "partial_trace", "reference_for", "same_count_probability",
    "smsv", "tensor_product", "tmsv",
]

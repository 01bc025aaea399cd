from .detection import ClickPND, DetectorConfig, apply_click_model, detected_ecs_reference, loss_thinning, similarity_sweep
from .errors import DimensionError, DomainError, EcsSimulatorError, TruncationError
from .fock import JointPND, ModeAmplitudes, TwoModeAmplitudes
from .metrics import FidelityReport, fidelity_closed_form, optimal_squeezing, similarity, two_mode_fidelity
from .nonlocality import J3Params, J3Result, j3, j3_extremize
from .optics import BeamSplitterSpec, beam_splitter, joint_pnd, mix_cs_sv, per_n_normalized, phase_shift
from .states import CoherentParams, EcsParams, SqueezeParams, coherent, css, ecs, noon, squeezed_vacuum

__all__ = [
    "BeamSplitterSpec",
    "ClickPND",
    "CoherentParams",
    "DetectorConfig",
    "DimensionError",
    "DomainError",
    "EcsParams",
    "EcsSimulatorError",
    "FidelityReport",
    "J3Params",
    "J3Result",
    "JointPND",
    "ModeAmplitudes",
    "SqueezeParams",
    "TruncationError",
    "TwoModeAmplitudes",
    "apply_click_model",
    "beam_splitter",
    "coherent",
    "css",
    "detected_ecs_reference",
    "ecs",
    "fidelity_closed_form",
    "j3",
    "j3_extremize",
    "joint_pnd",
    "loss_thinning",
    "mix_cs_sv",
    "noon",
    "optimal_squeezing",
    "per_n_normalized",
    "phase_shift",
    "similarity",
    "similarity_sweep",
    "squeezed_vacuum",
    "two_mode_fidelity",
]

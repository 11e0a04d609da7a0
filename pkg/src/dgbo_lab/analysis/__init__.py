"""Discrete Z^b norms and numerical checks of the linear, bilinear and arithmetic estimates."""

from .arithmetic import (BInterval, FrequencyTriple, GapResult, ModulationScan, ScanResult, admissible_b_interval,
                         cubic_ratio, minmax_modulation, minmax_modulation_grid, minmax_modulation_low,
                         modulation_scan, n1_b_window, numerology_grid, offdiag_gap_grid, offdiag_gap_scan,
                         offdiag_modulation_gap, resonance, resonance_constant_scan, solver_b_interval)
from .estimates import (CutoffFit, RatioStats, bilinear_ratio, constant_source, cutoff_ratio, cutoff_scaling,
                        duhamel_samples, duhamel_smoothing_ratio, free_field, free_solution_ratio, free_source,
                        gaussian_duhamel_exact, n1_bound_ratio)
from .packets import PacketSet, packet_znorm, product_packets
from .weights import A2Estimate, a2_constant, a2_product
from .zspace import (SpaceTimeField, ZbParams, bracket, cutoff_eta, embedding_constant, smoothing_multiplier,
                     zb_weight, znorm)

__all__ = [
    "A2Estimate", "BInterval", "CutoffFit", "FrequencyTriple", "GapResult", "ModulationScan", "PacketSet",
    "RatioStats", "ScanResult", "SpaceTimeField", "ZbParams", "a2_constant", "a2_product",
    "admissible_b_interval", "bilinear_ratio", "bracket", "constant_source", "cubic_ratio", "cutoff_eta",
    "cutoff_ratio", "cutoff_scaling", "duhamel_samples", "duhamel_smoothing_ratio", "embedding_constant",
    "free_field", "free_solution_ratio", "free_source", "gaussian_duhamel_exact", "minmax_modulation",
    "minmax_modulation_grid", "minmax_modulation_low", "modulation_scan", "n1_b_window", "n1_bound_ratio",
    "numerology_grid", "offdiag_gap_grid", "offdiag_gap_scan", "offdiag_modulation_gap", "packet_znorm",
    "product_packets", "resonance", "resonance_constant_scan", "smoothing_multiplier", "solver_b_interval",
    "zb_weight", "znorm",
]

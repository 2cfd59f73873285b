"""Anisotropic mixed-norm function-space calculus on periodic grids."""

from .agf import read_agf, read_agf_full, write_agf
from .anisotropy import (Anisotropy, SpaceParams, aniso_distance, dilate,
                         rescale_params)
from .compatibility import (HeatData, admissible_l, compatibility_check,
                            corner_trace_curved, corner_trace_flat,
                            heat_residual, make_heat_fixture)
from .decomposition import (BandDecomposition, DyadicPartition, b_norm,
                            build_partition, f_norm, lp_bands, peetre_maximal,
                            pointwise_multiply_report, validate_trace_conditions)
from .diffeo import (StructuredDiffeo, compose_diffeo, identity_map,
                     invariance_report, rotation_map, shear_map,
                     translation_map)
from .extension import (HalfspaceFunction, extension_bound_report,
                        rychkov_extend, rychkov_extend_below)
from .grid import (Grid, GridFunction, SpectralFunction, convolve, dft, idft,
                   laplacian, mixed_lp_lq_norm, mixed_lp_norm, shift,
                   spectral_derivative, truncate_halfspace)
from .kernels import (KernelFamily, MomentGenerator, build_calderon_pair,
                      build_generator, calderon_reconstruct,
                      local_means_kernels, localized_norm, verify_telescoping)
from .traces import (TraceProfile, build_eta, hyperplane_trace, k_flat,
                     k_normal, q_apply, q_prop_bound_check, support_report,
                     time_trace_r0)

__version__ = "0.1.0"

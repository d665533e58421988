"""Secrecy rate regions for collaborative relay beamforming to two users."""

from ._kernels import BACKEND
from .asymptotics import (difference_eigmax, high_snr_constants, high_snr_gap, large_m_gap,
                          low_snr_slopes)
from .channel import (ChannelRealization, FadingConfig, first_hop_capacity, load_realization,
                      sample_channel, save_realization)
from .errors import InputFormatError, InvalidInputError, UnsupportedDimensionError
from .montecarlo import EnsembleConfig, EnsembleSummary, run_ensemble
from .pencil import (EigResult, PencilSpec, brute_force_oracle, null_projector_apply,
                     pencil_eigmax, rayleigh_quotient)
from .schemes import (SCHEMES, BeamformingWeights, RatePoint, RegionCurve, achievable_rates,
                      apply_first_hop_cap, build_region, double_null_point, outer_bound_point,
                      single_null_point, tdma_point)

__version__ = "0.1.0"

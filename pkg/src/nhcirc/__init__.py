"""Exact statevector simulation of generalized-expectation circuits and
non-Hermitian SSH spin textures / winding numbers."""

from .linalg import SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z, eig, expm, sqrtm_pd
from .statevector import GateOp, SampleResult, StateVector
from .readout import ObservableDecomposition, decompose, rotation_for, shot_expectation
from .genexp import GenExpResult, build_swap_test_state, generalized_expectation
from .evolution import DualPair, EvolutionResult, evolve, prepare_dual_pair, select_alpha
from .dilation import DilationParams, DilationSchedule, build_schedule, run_dilated
from .ssh import DVector, SSHParams, analytic_texture, d_bloch, d_nonbloch, expected_winding, gbz_radius
from .experiment import (
    MeasConfig,
    PrepConfig,
    TextureSample,
    WindingResult,
    measure_texture,
    measure_winding,
    winding_from_phases,
    winding_oracle,
    winding_sweep,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

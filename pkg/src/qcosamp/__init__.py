"""Quantum cosine-sampling circuits on a dense state-vector simulator."""

from .applications import (AmplificationProblem, amplitude_amplify, compare_states,
                           integrate)
from .builder import Assembly, allocate, assemble, phase_pattern
from .curvefit import CurveFitModel, DataSet, FitResult, curve_fit, qsm, qsm_circuit
from .errors import (GuardrailError, NumericalInvariantError, OutOfRangeError,
                     QCoSampError, RangeError, UnsupportedModeError, ValidationError)
from .fourier import (FcosampParams, FourierSeries, fcosamp_eval, fourier_eval,
                      fourier_to_phases, phases_to_fourier, reconstruct, series_to_params)
from .imaging import GrayImage, WindowSpec, encode_image, mean_kernel_filter, window_similarity
from .sampling import SweepResult, mse, random_values_trial, sweep
from .spec import (ComponentSpec, ConstantData, Direct, Node, QCoSampSpec, Steerable,
                   balanced_tree, normalization, single, tree_sum)
from .statevec import Circuit, GateApplication, GateKind, StateVector, simulate

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""Loewner-framework model reduction for affine LPV state-space systems."""
from lpv_loewner.errors import (DivergenceError, DividedDifferenceError, IncompleteDataError,
                                InvalidArgumentError, LoewnerError, SingularPencilError,
                                SingularResolventError, UndefinedReferenceError)
from lpv_loewner.lti import (LoewnerRealization, TangentialData, build_loewner, eval_realization,
                             interleaved_axis_points, rank_diagnostics, realize, svd_project)
from lpv_loewner.pencil import (GeneralizedPencil, InterpolationScheme, ReducedLpv, assemble_from_samples,
                                assemble_intrusive, build_controllability, build_observability, reduce,
                                verify_interpolation)
from lpv_loewner.simulation import SignalSpec, SimulationConfig, TimeSeries, relative_error, simulate
from lpv_loewner.system import LpvSsa, eval_A, generating_coefficient, validate
from lpv_loewner.transfer import SampleSet, TransferSample, eval_batch, eval_H0, eval_Hword, resolvent_apply

__version__ = "0.1.0"

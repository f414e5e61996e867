"""
levycap is a python module for the potential theory of Levy processes:
exponents, gauge functions, energies, capacities and the checks that tie
them together.

The package is small enough that the main objects are imported into the
'levycap' name space, to avoid long import commands for single items.
"""

from levycap.casebook import (  # noqa
    drift_counterexample,
    implication_audit,
    poisson_example,
    run_all,
    symmetric_reduction_check,
)
from levycap.criterion import condition_e_check, criterion_integral, fubini_check  # noqa
from levycap.equilibrium import (  # noqa
    CapacityControls,
    SolverControls,
    brute_force_simplex,
    capacity_estimate,
    min_energy,
)
from levycap.errors import (  # noqa
    ConfigurationError,
    LevycapError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from levycap.gauge import (  # noqa
    Divergent,
    Finite,
    GaugeControls,
    GaugeQuery,
    Sign,
    f_gamma,
    g_gamma,
)
from levycap.levy_model import LevyTriplet, chi, evaluate_exponent, re_chi_parts  # noqa
from levycap.measure_energy import (  # noqa
    DiagonalPolicy,
    DiscreteMeasure,
    KernelMatrix,
    SetGrid,
    chi_energy,
    energy,
    gauge_kernel,
    riesz_kernel,
    signed_chi_energies,
)
from levycap.montecarlo import (  # noqa
    McConfig,
    mc_chi_check,
    mc_chi_energy,
    mc_image_riesz_energy,
    sample_path,
)

__version__ = "0.1.0"

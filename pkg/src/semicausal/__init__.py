"""Exact semimeasure factorizations and influence tests for discrete timeseries.

The package keeps two strictly separated arithmetic regimes: the semimeasure
core, causal factorizations, mixtures, and grow constructions are exact
rational throughout, while the data-side estimators (fitted transfer
statistics, Granger baseline, permutation significance) use floats over a
compiled or numpy counting kernel.
"""

from .errors import INFINITE, UNDEFINED, InputError, SemicausalError
from .factorization import (
    CausalKernel,
    Mode,
    Side,
    causal_part,
    equivalence_suite,
    evaluate_kernel,
    factorization_identity,
    influence_free,
    is_causal,
    total_mass_uniformity,
)
from .grow import (
    EnumerationStream,
    GrowTrace,
    amplification_check,
    grow,
    grow_semimeasure,
    local_minimal_branch,
    sandwich_check,
)
from .influence import decomposition, influence_tests
from .likelihood import likelihood_ratio, roc_dominance_check, significance_sensitivity
from .mixture import (
    BivariateMixture,
    MarkovTable,
    MixtureModel,
    ProductMixture,
    build_mixture,
    markov_family,
    pair_family,
    staged_enumeration,
)
from .semimeasure import (
    BivariateSemimeasure,
    ConditionalSemimeasure,
    Semimeasure,
    conditional_prefix_ratio,
    deinterleave,
    interleave,
    prefix_mass,
    product,
    random_bivariate,
    random_semimeasure,
)
from .shannon import (
    granger_statistic,
    permutation_test,
    plugin_transfer,
    shannon_sit,
)
from .structural import (
    ModelClass,
    StructuralModel,
    TimeseriesPair,
    ingest_timeseries,
    inverse_cdf_sample,
    sampler_fidelity,
    simulate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

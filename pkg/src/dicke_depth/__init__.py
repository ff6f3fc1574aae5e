"""Entanglement-depth certification near Dicke states from collective-spin moments."""

__version__ = "0.1.0"

from .criteria import (  # noqa: E402
    CriteriaResult,
    GroupPartition,
    alpha,
    certify_depth,
    chi,
    partition_bound,
    simple_bound,
    xi,
)
from .measurement import (  # noqa: E402
    MeasurementRecordSet,
    estimate_moments,
    ingest_csv,
    sample_shots,
)
from .noise import (  # noqa: E402
    NoiseModel,
    apply_noise,
    xi_bitflip_estimate,
    xi_dephasing_estimate,
)
from .spin_core import (  # noqa: E402
    MomentSet,
    QubitEnsembleState,
    Representation,
    collective_operator,
    compute_moments,
    convert_representation,
    rotate_collective,
)
from .states import StateSpec, make_biseparable_random, make_dicke, make_product  # noqa: E402

"""Multiport network engine for RIS-parametrized wireless channels.

BD-RIS load circuits are multiport networks terminated by individual loads,
so a BD-RIS channel is a D-RIS channel over the cascade of radio environment
and load circuit.  This package implements both computation routes and the
machinery to check that they agree.
"""

from .cascade import CascadeResult, cascade_z, map_to_dris, star_s
from .errors import (
    ConfigError,
    FrequencyNotFound,
    IndexOutOfRange,
    InvalidLoad,
    InvalidPartition,
    InvalidSkeleton,
    NetworkError,
    ParseError,
    PartitionMismatch,
    ReferenceImpedanceMismatch,
    SearchSpaceTooLarge,
    SingularCascade,
    SingularConversion,
    SingularMatrixError,
    SingularNodal,
    SingularTermination,
)
from .loadcircuit import (
    LoadCircuit,
    Skeleton,
    build_named,
    build_skeleton,
    effective_phi,
    phi_nodal_oracle,
)
from .netcore import (
    MultiportNetwork,
    PortPartition,
    PropertyReport,
    block,
    check_properties,
    s_to_z,
    z_to_s,
)
from .optim import (
    LoadModel,
    Objective,
    OptimResult,
    coordinate_descent,
    evaluate,
    exhaustive,
    optimize_bdris,
)
from .synth import SynthConfig, random_env, random_load_circuit
from .termination import Channel, LoadVector, channel, terminate, terminate_s, terminate_z
from .touchstone import read_touchstone, write_touchstone

__version__ = "0.1.0"

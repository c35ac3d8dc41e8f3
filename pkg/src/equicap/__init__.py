"""Capacity of group-invariant perceptrons: representations, counting, separability, equivariant layers."""

__version__ = "0.1.0"

from .cover import cover_count, cover_fraction, gardner_limit, pooled_capacity_bounds, vc_dimension
from .groups import (
    CosetDecomposition,
    FiniteGroup,
    coset_decompose,
    cyclic_group,
    direct_product,
    verify_group_axioms,
)
from .representation import (
    Representation,
    augment_trivial,
    direct_sum,
    fixed_subspace_dim,
    group_average,
    induced_representation,
    irrep_decompose_cyclic,
    regular_representation,
    restrict_to_subgroup,
    rotation_representation,
    so3_trivial_count,
)
from .separability import (
    CapacityEstimate,
    OrbitSet,
    SeparabilityVerdict,
    brute_force_fraction,
    centroid_reduce,
    decide_separable,
    empirical_fraction,
    sample_orbit_instance,
    separating_w_lift,
)

from locred.decomposition.constants import (
    DEFAULT_C_F,
    TheoryConstants,
    cpu_upper_bound,
    rate_bound,
    theory_constants,
)
from locred.decomposition.partition_of_unity import PartitionOfUnity, build_pu, cpu_rayleigh_sample, pu_quotient
from locred.decomposition.subdomains import (
    DomainDecomposition,
    Subdomain,
    build_decomposition,
    check_geometry,
    check_pu_geometry,
    to_squares,
)

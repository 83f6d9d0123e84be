from gffkit.microlocal.bounds import (
    Link,
    PolyhedralBound,
    ProductForm,
    SmoothnessCertificate,
    assemble_musc_bound,
    contract_bound,
    derive_truncated_bound,
    hadamard2_relations,
    link_witness,
    maximal_matchings,
    positivity_filter,
    verify_certificate,
)
from gffkit.microlocal.gamma import (
    VARIANTS,
    ImmersionWitness,
    WFQuery,
    admissible_pairs,
    cone_properties_suite,
    gamma2_closed_form,
    gamma_member,
    random_member,
    random_query,
)
from gffkit.microlocal.geometry import Covector1p1, Point1p1, causally_related

__all__ = [
    "VARIANTS",
    "Covector1p1",
    "ImmersionWitness",
    "Link",
    "Point1p1",
    "PolyhedralBound",
    "ProductForm",
    "SmoothnessCertificate",
    "WFQuery",
    "admissible_pairs",
    "assemble_musc_bound",
    "causally_related",
    "cone_properties_suite",
    "contract_bound",
    "derive_truncated_bound",
    "gamma2_closed_form",
    "gamma_member",
    "hadamard2_relations",
    "link_witness",
    "maximal_matchings",
    "positivity_filter",
    "random_member",
    "random_query",
    "verify_certificate",
]

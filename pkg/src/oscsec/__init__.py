"""Osculating spaces, secant dimensions, and non-defectivity bounds for
Segre-Veronese varieties, with exact degeneration certificates and a
randomized mod-p rank engine."""

from .bounds import (
    BinaryProfile,
    BoundReport,
    binary_profile,
    h_m,
    intro_bound_value,
    main_bound,
    main_bound_value,
    reproduce_table,
)
from .certificates import (
    CertificateBundle,
    DegenerationInstance,
    HyperplaneCertificate,
    m_regularity_certificate,
    strong2_certificate,
    verify_hyperplane_identity,
)
from .indices import Shape, distance, enumerate_shapes, shape, veronese
from .jets import (
    MonomialMap,
    PrimeTooSmallError,
    RankVerdict,
    Refusal,
    ResourceRefusal,
    corner_jet_rank_profile,
    jet_rank,
    scroll_map,
    secant_rank,
    secant_sweep,
    segre_veronese_map,
    tangential_projection_fiber,
)
from .modp import DEFAULT_PRIME, RankAccumulator, is_prime, random_prime, rank_of_rows
from .osculation import (
    CremonaWitness,
    OsculatingCenter,
    cremona_witness,
    osc_basis,
    osc_dim_formula,
    osc_dim_profile,
    projection_plan,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryProfile",
    "BoundReport",
    "CertificateBundle",
    "CremonaWitness",
    "DEFAULT_PRIME",
    "DegenerationInstance",
    "HyperplaneCertificate",
    "MonomialMap",
    "OsculatingCenter",
    "PrimeTooSmallError",
    "RankAccumulator",
    "RankVerdict",
    "Refusal",
    "ResourceRefusal",
    "Shape",
    "binary_profile",
    "corner_jet_rank_profile",
    "cremona_witness",
    "distance",
    "enumerate_shapes",
    "h_m",
    "intro_bound_value",
    "is_prime",
    "jet_rank",
    "m_regularity_certificate",
    "main_bound",
    "main_bound_value",
    "osc_basis",
    "osc_dim_formula",
    "osc_dim_profile",
    "projection_plan",
    "random_prime",
    "rank_of_rows",
    "reproduce_table",
    "scroll_map",
    "secant_rank",
    "secant_sweep",
    "segre_veronese_map",
    "shape",
    "strong2_certificate",
    "tangential_projection_fiber",
    "verify_hyperplane_identity",
]

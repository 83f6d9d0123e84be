from gffkit.statelab.checks import (
    ComparisonReport,
    CounterexampleReport,
    KGResult,
    compare_states,
    counterexample_states,
    js_counterexample,
    kg_residual,
    matched_pair_example,
)
from gffkit.statelab.growth import GrowthReport, growth_classify, tilde_lower_bound_log
from gffkit.statelab.kernels import (
    Scaled,
    Smear,
    Sum,
    TwoPointModel,
    Vacuum,
    WKernel,
    commutator_integral,
)
from gffkit.statelab.packets import DifferentiatedPacket, GaussianPacket, random_packets
from gffkit.statelab.states import Mixture, QuasiFree, StateModel, TildeSeries, Trivial


def smear_two_point(model: TwoPointModel, f, g) -> Smear:
    """Smeared two-point value with its quadrature error estimate."""
    return model.smear(f, g)


def npoint(state: StateModel, fns) -> complex:
    return state.npoint(tuple(fns))


__all__ = [
    "ComparisonReport",
    "CounterexampleReport",
    "DifferentiatedPacket",
    "GaussianPacket",
    "GrowthReport",
    "KGResult",
    "Mixture",
    "QuasiFree",
    "Scaled",
    "Smear",
    "StateModel",
    "Sum",
    "TildeSeries",
    "Trivial",
    "TwoPointModel",
    "Vacuum",
    "WKernel",
    "commutator_integral",
    "compare_states",
    "counterexample_states",
    "growth_classify",
    "js_counterexample",
    "kg_residual",
    "matched_pair_example",
    "npoint",
    "random_packets",
    "smear_two_point",
    "tilde_lower_bound_log",
]

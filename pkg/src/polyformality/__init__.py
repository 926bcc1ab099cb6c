"""Graph formulas for an A-infinity quasi-isomorphism from polyvector fields
to polydifferential operators on polynomial algebras."""
from .algebra import ONE, ZERO, PolyDiffOp, Polynomial, Polyvector, multi_index, mi_var, x
from .formality import DEFAULT_SIGNS, SignConvention, eq2_residual, f_component, verify_report
from .graphs import Graph, enumerate_gnm, u_gamma, validate_graph
from .hochschild import cup, hkr, hochschild_d, hochschild_d_extensional
from .weights import BumpFunction, WeightConfig, WeightResult, weight, weight_exact, weight_mc

__all__ = [
    "ONE", "ZERO", "PolyDiffOp", "Polynomial", "Polyvector", "multi_index", "mi_var", "x",
    "DEFAULT_SIGNS", "SignConvention", "eq2_residual", "f_component", "verify_report",
    "Graph", "enumerate_gnm", "u_gamma", "validate_graph",
    "cup", "hkr", "hochschild_d", "hochschild_d_extensional",
    "BumpFunction", "WeightConfig", "WeightResult", "weight", "weight_exact", "weight_mc",
]

"""Sharp operator norms between Lebesgue spaces and Grand Lebesgue Space calculus."""
from .extended import (
    INF, Atoms, FuncSpec, IntegrationError, Interval, NormReport, Opaque, Piecewise, Power,
    Table, Truncated, ess_sup, integrate, lebesgue, lp_norm,
)
from .gls import (
    ConvexFunctionTable, EmptySupportError, PsiFunction, constant_psi, degenerate_psi,
    fundamental_function, gls_norm, natural_psi, orlicz_function, power_psi, sigma_transform,
    tau_transform, theta_transform, young_fenchel,
)
from .operators import (
    Composition, LinearSubstitution, Multiplicative, Product, composition_norm,
    composition_norm_power_map, multiplicative_norm, product_norm_bound, transfer_function,
)
from .pushforward import MeasurePreserving, PowerMap, compose, radon_nikodym

__version__ = "0.1.0"

"""sympcap: symplectic capacities, nonsqueezing experiments, EBK quantization."""

from .capacity import (
    Ball,
    BordeauxBottle,
    CapacityValue,
    Cylinder,
    EnergyShellRegion,
    SandwichCertificate,
    bordeaux_bottle_fixture,
    capacity_ball,
    capacity_cylinder,
    capacity_ellipsoid,
    capacity_sandwich,
    minimal_action_quadratic,
    volume_ball,
)
from .core import (
    QuadraticHamiltonian,
    SymplecticMatrix,
    WilliamsonDecomposition,
    compose,
    is_symplectic,
    random_symplectic,
    standard_form,
    symplectic_eigenvalues,
    williamson,
)
from .ebk import (
    LoopRecord,
    PlanckConfig,
    Potential1D,
    SpectrumEntry,
    SpectrumResult,
    action_integral,
    blob_check,
    density_of_states,
    loop_action,
    make_potential,
    quantize_quadratic,
    spectrum_1d,
    spectrum_separable,
    turning_points,
)
from .shadows import (
    FlowSpec,
    PlaneSelector,
    ShadowReport,
    evolve_ball_shadow,
    linear_shadow_area,
    nonsqueeze_ensemble,
    verlet_step,
)

__version__ = "0.1.0"

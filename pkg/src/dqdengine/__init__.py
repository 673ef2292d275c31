"""Steady-state thermodynamics of a continuously monitored double-dot
engine: Lindblad and repeated-interaction dynamics, consistent heat and
work accounting, and full counting statistics of the particle current.
"""

from .model import (EngineParams, QPCParams, MODE_ORDER,
                    canonical_engine_params, canonical_qpc_params,
                    dephasing_rate_from_qpc, fermi)
from .lindblad import LiouvillianBundle, build_liouvillian, evolve, ness
from .thermo import (ThermoReport, currents, efficiency, carnot,
                     gamma_ext, gamma_zero, particle_current,
                     particle_current_closed_form, steady_report)
from .collision import (CollisionConfig, collision_map, collision_ness,
                        collision_step, generator_residual, ri_dissipator)
from .fcs import (CountingSpec, FcsReport, diffusion_drazin,
                  diffusion_tilted, dynamical_activity, fcs_report,
                  hot_counting_spec, turr)

__version__ = "0.1.0"

__all__ = [
    "EngineParams", "QPCParams", "MODE_ORDER",
    "canonical_engine_params", "canonical_qpc_params",
    "dephasing_rate_from_qpc", "fermi",
    "LiouvillianBundle", "build_liouvillian", "evolve", "ness",
    "ThermoReport", "currents", "efficiency", "carnot",
    "gamma_ext", "gamma_zero", "particle_current",
    "particle_current_closed_form", "steady_report",
    "CollisionConfig", "collision_map", "collision_ness", "collision_step",
    "generator_residual", "ri_dissipator",
    "CountingSpec", "FcsReport", "diffusion_drazin", "diffusion_tilted",
    "dynamical_activity", "fcs_report", "hot_counting_spec", "turr",
]

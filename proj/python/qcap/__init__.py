"""Holevo capacity of a two-qubit noisy channel with memory, asymmetry and state bias."""

from ._qcap import (
    BasisParams,
    CapacityResult,
    ChannelParams,
    ChiResult,
    ConstraintError,
    DomainError,
    LimitCase,
    NumericalError,
    QcapError,
    RateMatrices,
    apply_channel,
    chi_for_basis,
    f_closed_form,
    gaussian_pulse_rate,
    holevo_chi,
    limit_relation_residual,
    make_basis,
    optimize_capacity,
    params_from_rates,
    rates_from_params,
    von_neumann_entropy,
)

__all__ = [
    "BasisParams",
    "CapacityResult",
    "ChannelParams",
    "ChiResult",
    "ConstraintError",
    "DomainError",
    "LimitCase",
    "NumericalError",
    "QcapError",
    "RateMatrices",
    "apply_channel",
    "chi_for_basis",
    "f_closed_form",
    "gaussian_pulse_rate",
    "holevo_chi",
    "limit_relation_residual",
    "make_basis",
    "optimize_capacity",
    "params_from_rates",
    "rates_from_params",
    "von_neumann_entropy",
]

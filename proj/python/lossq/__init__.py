"""Loss characteristics of finite-buffer queues carrying packetized messages."""

from ._lossq import (
    Characteristics,
    ComparisonError,
    LossqError,
    PacketLaw,
    RegimeError,
    RunawayError,
    RunConfig,
    Service,
    UsageError,
    ValidationError,
    ZetaPmf,
    analyze,
    classify,
    emit_config,
    execute,
    fixed_characteristics,
    loss_probability,
    lst,
    lst_deriv,
    message_corruption_prob,
    mixture_characteristics,
    offered_load,
    parse_config,
    phi_root,
    pi_probs,
    simulate,
    solve_q,
    sweep,
    traffic_moments,
    zeta_pmf,
)

__all__ = [name for name in dir() if not name.startswith("_")]

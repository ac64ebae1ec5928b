from .approx import (
    DeepQAgent,
    LinearQAgent,
    deep_q,
    deep_update,
    featurize,
    linear_q,
    linear_update,
    load_linear_weights,
    load_mlp_pair,
    save_linear_weights,
    save_mlp_pair,
)
from .base import TradingAgent, epsilon_schedule
from .baseline import SubmitLeaveBaseline
from .tabular import TabularQAgent, load_q_table, q_update, save_q_table

__all__ = [
    "DeepQAgent",
    "LinearQAgent",
    "SubmitLeaveBaseline",
    "TabularQAgent",
    "TradingAgent",
    "deep_q",
    "deep_update",
    "epsilon_schedule",
    "featurize",
    "linear_q",
    "linear_update",
    "load_linear_weights",
    "load_mlp_pair",
    "load_q_table",
    "q_update",
    "save_linear_weights",
    "save_mlp_pair",
    "save_q_table",
]

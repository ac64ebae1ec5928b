"""Reinforcement-learning lab for timing single stock purchases inside fixed
daily windows, with supervised prediction baselines and a repeated-run
evaluation harness."""

from .agents import (
    DeepQAgent,
    LinearQAgent,
    SubmitLeaveBaseline,
    TabularQAgent,
    TradingAgent,
    featurize,
)
from .env import (
    ACTIONS,
    Action,
    MovementEnv,
    MovementState,
    PriceState,
    RewardConfig,
    RewardMode,
    Transition,
    WindowEnv,
)
from .errors import (
    ConfigError,
    DataError,
    NumericalError,
    OrderingError,
    ParseError,
    StockRlError,
    ValidationError,
)
from .evaluation import (
    EvalReport,
    RunResult,
    WindowScore,
    evaluate,
    histogram,
    repeated_eval,
    score_window,
    student_ci,
    write_report,
)
from .market_data import (
    DEFAULT_CUTOFF,
    Movement,
    OhlcBar,
    PriceSeries,
    SplitSeries,
    TimeWindow,
    filter_from,
    load_csv,
    make_windows,
    movement,
    parse_csv,
    split_80_10_10,
    to_csv,
    write_csv,
)
from .prediction import (
    MovementClassifier,
    NextCloseRegressor,
    PredictionReport,
    accuracy_within,
    persistence_predict,
    run_prediction,
)

__version__ = "0.1.0"

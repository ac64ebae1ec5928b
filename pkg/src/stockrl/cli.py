"""Command-line entry point: train agents, compare them per company, and run
the price-prediction baselines.

Configuration precedence is command-line flags over ``--config`` file entries
(flat ``key=value`` lines) over built-in defaults.  Every command is a pure
function of its inputs and seed: repeated invocations write byte-identical
files.  Exit statuses: 0 success, 1 usage/config, 2 data, 3 numerical.
"""

from __future__ import annotations

import argparse
import csv
import sys
from datetime import date
from pathlib import Path

from .agents import DeepQAgent, LinearQAgent, SubmitLeaveBaseline, TabularQAgent
from .errors import ConfigError, DataError, NumericalError
from .evaluation import repeated_eval, write_report
from .market_data import filter_from, load_csv, split_80_10_10
from .prediction import run_prediction, write_prediction_report

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3

AGENT_CHOICES = ("baseline", "q", "linear", "deep")
AGENT_LABELS = {
    "baseline": "Baseline",
    "q": "Q-Learning",
    "linear": "Approximate Linear",
    "deep": "Deep Q-Learning",
}
DEFAULT_EPOCHS = {"baseline": 0, "q": 50, "linear": 50, "deep": 30}


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the contract here is 1
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("formatter_class", argparse.ArgumentDefaultsHelpFormatter)
        super().__init__(*args, **kwargs)

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common_options(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--config", type=Path, default=None, help="flat key=value config file")
    add("--company", default=None, help="company label; defaults to the data file stem")
    add("--data", type=Path, default=None, help="OHLC CSV path; defaults to <data-dir>/<company>.csv")
    add("--data-dir", type=Path, default=Path("data"), help="directory searched when --data is omitted")
    add("--cutoff", default="2005-01-01", help="drop bars before this ISO date")
    add("--w", type=int, default=5, help="days per time window (>= 2)")
    add("--h", type=int, default=2, help="history days in each state (>= 0)")
    add("--alpha", type=float, default=0.1, help="learning rate for tabular/linear agents, in (0, 1]")
    add("--gamma", type=float, default=0.95, help="discount factor in [0, 1]")
    add("--epsilon", type=float, default=0.1, help="exploration probability in [0, 1]")
    add("--epsilon-floor", type=float, default=None,
        help="optional linear-decay floor for epsilon, in [0, 1]")
    add("--r", type=float, default=1.0, help="movement-mode buy reward magnitude (> 0)")
    add("--c", type=float, default=0.1, help="movement-mode wait penalty (>= 0)")
    add("--forced-penalty", type=float, default=1.0,
        help="window-mode training penalty added at a forced purchase (>= 0)")
    add("--d", type=float, default=0.5, help="baseline price-drop threshold (>= 0)")
    add("--epochs", type=int, default=None,
        help="training passes; default 50 (tabular/linear), 30 (deep)")
    add("--n-hidden-layers", type=int, default=2, help="hidden layers in each deep net (>= 1)")
    add("--n-units", type=int, default=16, help="units per hidden layer (>= 1)")
    add("--learning-rate", type=float, default=1e-3, help="SGD step size for the deep agent (> 0)")
    add("--literal-update", action="store_true", default=False,
        help="linear agent: use the uncorrected update without the -Q(s,a) term")
    add("--n-runs", type=int, default=51, help="independent train+score repetitions (>= 1)")
    add("--seed", type=int, default=0, help="base RNG seed")
    add("--jobs", type=int, default=1, help="worker processes for repeated runs (>= 1)")
    add("--n-bins", type=int, default=10, help="histogram bin count (>= 1)")
    add("--tol", type=float, default=0.02, help="relative error counted as a correct prediction")
    add("--out-dir", type=Path, default=Path("results"), help="directory for output files")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stockrl", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    train = commands.add_parser("train", help="train one agent and save its parameters")
    train.add_argument("agent", choices=AGENT_CHOICES, help="which agent to train")
    _add_common_options(train)

    evaluate_cmd = commands.add_parser(
        "evaluate",
        help="train and score all four agents repeatedly, write result tables",
    )
    _add_common_options(evaluate_cmd)

    predict = commands.add_parser("predict", help="run the price-prediction baselines")
    _add_common_options(predict)
    return parser


def _explicit_flags(argv: list[str]) -> set[str]:
    explicit = set()
    for token in argv:
        if token.startswith("--"):
            explicit.add(token[2:].split("=", 1)[0].replace("-", "_"))
    return explicit


def _apply_config_file(
    args: argparse.Namespace, parser: argparse.ArgumentParser, argv: list[str]
) -> None:
    """Fill in values from the config file for flags the command line left alone."""
    if args.config is None:
        return
    if not args.config.is_file():
        raise DataError(f"config file not found: {args.config}")
    entries: dict[str, str] = {}
    for line_num, line in enumerate(args.config.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{args.config}:{line_num}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    known = {
        action.dest: action
        for action in parser._actions
        if action.dest not in ("help", "command", "agent", "config")
    }
    explicit = _explicit_flags(argv)
    for key, raw in entries.items():
        dest = key.replace("-", "_")
        if dest not in known:
            raise ConfigError(f"{args.config}: unknown config key {key!r}")
        if dest in explicit:
            continue  # command line wins
        action = known[dest]
        if isinstance(action, argparse._StoreTrueAction):
            value = raw.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(raw)
            except ValueError:
                raise ConfigError(f"{args.config}: bad value for {key}: {raw!r}") from None
        else:
            value = raw
        setattr(args, dest, value)


def _resolve_data(args: argparse.Namespace) -> tuple[Path, str]:
    if args.data is None:
        if args.company is None:
            raise ConfigError("provide --data or --company (with --data-dir)")
        path = args.data_dir / f"{args.company}.csv"
    else:
        path = args.data
    company = args.company if args.company is not None else path.stem
    if not path.is_file():
        raise DataError(f"data file not found: {path}")
    return path, company


def _load_split(args: argparse.Namespace):
    path, company = _resolve_data(args)
    try:
        cutoff = date.fromisoformat(args.cutoff)
    except ValueError:
        raise ConfigError(f"cutoff must be an ISO date, got {args.cutoff!r}") from None
    series = filter_from(load_csv(path, company), cutoff)
    if len(series) == 0:
        raise DataError(f"{company}: no bars remain after the {cutoff} cutoff")
    return split_80_10_10(series), company


def _build_agent(name: str, args: argparse.Namespace):
    epochs = args.epochs if args.epochs is not None else DEFAULT_EPOCHS[name]
    if name == "baseline":
        return SubmitLeaveBaseline(d=args.d)
    if name == "q":
        return TabularQAgent(
            h=args.h, r=args.r, c=args.c, gamma=args.gamma, alpha=args.alpha,
            epsilon=args.epsilon, epsilon_floor=args.epsilon_floor,
            epochs=epochs, seed=args.seed,
        )
    if name == "linear":
        return LinearQAgent(
            h=args.h, w=args.w, alpha=args.alpha, gamma=args.gamma,
            epsilon=args.epsilon, epsilon_floor=args.epsilon_floor, epochs=epochs,
            forced_penalty=args.forced_penalty,
            literal_update=args.literal_update, seed=args.seed,
        )
    if name == "deep":
        return DeepQAgent(
            h=args.h, w=args.w, hidden_layers=args.n_hidden_layers,
            hidden_units=args.n_units, learning_rate=args.learning_rate,
            gamma=args.gamma, epsilon=args.epsilon,
            epsilon_floor=args.epsilon_floor, epochs=epochs,
            forced_penalty=args.forced_penalty, seed=args.seed,
        )
    raise ConfigError(f"unknown agent {name!r}")


def _write_training_log(log, path: Path) -> None:
    fields = sorted({key for entry in log for key in entry}) if log else ["epoch"]
    ordered = ["epoch"] + [f for f in fields if f != "epoch"]
    with path.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(ordered)
        for entry in log:
            writer.writerow(
                [
                    entry[f] if f == "epoch" else f"{entry[f]:.6f}"
                    for f in ordered
                ]
            )


def cmd_train(args: argparse.Namespace) -> int:
    split, company = _load_split(args)
    agent = _build_agent(args.agent, args)
    agent.fit(split.train)
    out_dir = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    suffix = {"baseline": "txt", "q": "csv", "linear": "csv", "deep": "txt"}[args.agent]
    params_path = out_dir / f"{args.agent}_params_{company}.{suffix}"
    if args.agent == "baseline":
        params_path.write_text(f"d={repr(float(args.d))}\n", encoding="utf-8")
    else:
        agent.save(params_path)
    log_path = out_dir / f"train_log_{args.agent}_{company}.csv"
    _write_training_log(getattr(agent, "training_log_", []), log_path)
    print(f"wrote {params_path}")
    print(f"wrote {log_path}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    split, company = _load_split(args)
    reports = {}
    for name in AGENT_CHOICES:
        agent = _build_agent(name, args)
        reports[AGENT_LABELS[name]] = repeated_eval(
            agent, split, args.w, n_runs=args.n_runs, base_seed=args.seed,
            jobs=args.jobs, n_bins=args.n_bins,
        )
    results_path, histogram_path = write_report(reports, company, args.out_dir)
    print(f"wrote {results_path}")
    print(f"wrote {histogram_path}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    path, company = _resolve_data(args)
    try:
        cutoff = date.fromisoformat(args.cutoff)
    except ValueError:
        raise ConfigError(f"cutoff must be an ISO date, got {args.cutoff!r}") from None
    series = filter_from(load_csv(path, company), cutoff)
    epochs = args.epochs if args.epochs is not None else 300
    report = run_prediction(
        series, tol=args.tol, learning_rate=0.5, epochs=epochs, seed=args.seed
    )
    table_path, daily_path = write_prediction_report(report, company, args.out_dir)
    print(f"wrote {table_path}")
    print(f"wrote {daily_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(argv)
    try:
        subparser = next(
            action for action in parser._actions
            if isinstance(action, argparse._SubParsersAction)
        ).choices[args.command]
        _apply_config_file(args, subparser, argv)
        handler = {"train": cmd_train, "evaluate": cmd_evaluate, "predict": cmd_predict}
        return handler[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

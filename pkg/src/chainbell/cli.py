"""Command-line surface: simulate, estimate, certify, fidelity, sweep, fixtures.

Exit codes: 0 success, 1 usage error, 2 data error.  Human-readable reports
go to stdout; ``--json PATH`` writes the same report as structured JSON.

The simulate config is a JSON file; every field has a default matching the
published experiment:

    {
      "N": 6,
      "mode": "correlation",
      "seed": 0,
      "source": {"type": "quantum", "state": "phi_plus",
                 "noise": {"detection_flip_a": 0.0, "detection_flip_b": 0.0,
                           "state_fidelity_mix": 0.0}},
      "protocol": {"blocks": 1398, "block_size": 100, "analyzed_index": 50},
      "herald": {"g": 8, "h_thres": 20, "bright_mean": 30, "dark_mean": 2},
      "collisions": {"event_rate": 0.0, "recovery": "permanent", "duration": 50},
      "detection": {"model": "ideal", "threshold": 6,
                    "bright_mean": 30, "dark_mean": 2}
    }

A mixture source instead reads
    {"type": "mixture", "schedule": {"type": "constant", "q": 0.5},
     "local": "uniform"}                       # or "minimal"
with schedule types constant/ramp/outcome_reactive/block_periodic.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .chain import (
    ChainParams,
    chain_estimate_from_stats,
    chsh_parameter,
    min_detection_efficiency,
    pair_stats_from_log,
    t_statistic,
)
from .certify import local_content_bound
from .logfile import LogFormatError, LogHeader, read_log, write_log
from .mixtures import (
    BlockPeriodicSchedule,
    ConstantSchedule,
    MixtureModel,
    OutcomeReactiveSchedule,
    RampSchedule,
    minimal_local,
    uniform_local,
)
from .quantum import NoiseSpec, ideal_chain_value, phi_minus, phi_plus, self_test_fidelity
from .simulate import (
    CollisionSpec,
    DetectionSpec,
    HeraldSpec,
    MixtureSource,
    ProtocolSpec,
    QuantumSource,
    extract_analysis_trials,
    run_protocol,
)
from . import fixtures

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

# Lowest local-content upper bound attainable from a perfect CHSH (N=2) test.
CHSH_FLOOR = ideal_chain_value(2)


class ConfigError(ValueError):
    """Invalid simulate config; message names the offending field."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; the CLI reserves 2 for data errors
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _take(cfg: dict, field: str, default):
    value = cfg.get(field, default)
    if type(default) in (int, float) and not isinstance(value, (int, float)):
        raise ConfigError(f"field {field!r} must be a number, got {value!r}")
    return value


def _build_schedule(cfg: dict):
    kind = cfg.get("type")
    if kind == "constant":
        return ConstantSchedule(_take(cfg, "q", 1.0))
    if kind == "ramp":
        return RampSchedule(_take(cfg, "q0", 0.0), _take(cfg, "q1", 1.0), int(_take(cfg, "n_trials", 1000)))
    if kind == "outcome_reactive":
        return OutcomeReactiveSchedule(
            _take(cfg, "base", 0.5), _take(cfg, "step", 0.1), int(_take(cfg, "run_length", 3))
        )
    if kind == "block_periodic":
        return BlockPeriodicSchedule(
            _take(cfg, "q_min", 0.3), _take(cfg, "q_max", 1.0), int(_take(cfg, "period", 100))
        )
    raise ConfigError(f"field 'source.schedule.type' has unknown value {kind!r}")


def _build_source(cfg: dict, params: ChainParams):
    kind = cfg.get("type", "quantum")
    if kind == "quantum":
        state_name = cfg.get("state", "phi_plus")
        if state_name == "phi_plus":
            state = phi_plus()
        elif state_name == "phi_minus":
            state = phi_minus()
        else:
            raise ConfigError(f"field 'source.state' has unknown value {state_name!r}")
        ncfg = cfg.get("noise", {})
        try:
            noise = NoiseSpec(
                detection_flip_a=_take(ncfg, "detection_flip_a", 0.0),
                detection_flip_b=_take(ncfg, "detection_flip_b", 0.0),
                state_fidelity_mix=_take(ncfg, "state_fidelity_mix", 0.0),
            )
        except ValueError as exc:
            raise ConfigError(f"field 'source.noise': {exc}")
        return QuantumSource(state, noise)
    if kind == "mixture":
        schedule = _build_schedule(cfg.get("schedule", {"type": "constant", "q": 1.0}))
        local_name = cfg.get("local", "uniform")
        if local_name == "uniform":
            local = uniform_local(params.N)
        elif local_name == "minimal":
            local = minimal_local(params.N)
        else:
            raise ConfigError(f"field 'source.local' has unknown value {local_name!r}")
        return MixtureSource(MixtureModel(params, schedule, local))
    raise ConfigError(f"field 'source.type' has unknown value {kind!r}")


def load_config(path: str | Path):
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    try:
        params = ChainParams(int(_take(cfg, "N", 6)))
    except ValueError as exc:
        raise ConfigError(f"field 'N': {exc}")
    mode = cfg.get("mode", "correlation")
    if mode not in ("correlation", "anticorrelation"):
        raise ConfigError(f"field 'mode' has unknown value {mode!r}")
    pcfg = cfg.get("protocol", {})
    hcfg = cfg.get("herald", {})
    ccfg = cfg.get("collisions", {})
    dcfg = cfg.get("detection", {})
    try:
        protocol = ProtocolSpec(
            blocks=int(_take(pcfg, "blocks", 1398)),
            block_size=int(_take(pcfg, "block_size", 100)),
            analyzed_index=int(_take(pcfg, "analyzed_index", 50)),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'protocol': {exc}")
    try:
        herald = HeraldSpec(
            g=int(_take(hcfg, "g", 8)),
            h_thres=int(_take(hcfg, "h_thres", 20)),
            bright_mean=_take(hcfg, "bright_mean", 30.0),
            dark_mean=_take(hcfg, "dark_mean", 2.0),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'herald': {exc}")
    try:
        collisions = CollisionSpec(
            event_rate=_take(ccfg, "event_rate", 0.0),
            recovery=ccfg.get("recovery", "permanent"),
            duration=int(_take(ccfg, "duration", 50)),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'collisions': {exc}")
    try:
        detection = DetectionSpec(
            model=dcfg.get("model", "ideal"),
            threshold=int(_take(dcfg, "threshold", 6)),
            bright_mean=_take(dcfg, "bright_mean", 30.0),
            dark_mean=_take(dcfg, "dark_mean", 2.0),
        )
    except ValueError as exc:
        raise ConfigError(f"field 'detection': {exc}")
    seed = int(_take(cfg, "seed", 0))
    source = _build_source(cfg.get("source", {}), params)
    return params, mode, source, protocol, herald, collisions, detection, seed


def _emit(report: dict, text: str, json_path: str | None) -> None:
    print(text)
    if json_path:
        Path(json_path).write_text(json.dumps(report, indent=2) + "\n")


def cmd_simulate(args) -> int:
    try:
        params, mode, source, protocol, herald, collisions, detection, seed = load_config(
            args.config
        )
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_DATA
    records = run_protocol(
        source, params, protocol, herald, collisions, detection, seed=seed
    )
    header = LogHeader(
        N=params.N,
        mode=mode,
        blocks=protocol.blocks,
        block_size=protocol.block_size,
        analyzed_index=protocol.analyzed_index,
        seed=seed,
    )
    write_log(args.out, header, records)
    heralded = sum(r.heralded for r in records)
    print(f"wrote {len(records)} trials ({heralded} heralded) to {args.out}")
    return EXIT_OK


def _load_estimation_input(args):
    """(params, mode, stats, heralding_applied, label) from a log or fixture."""
    if args.fixture:
        name = args.fixture
        if name == "table_n3_phi_minus":
            params, mode, stats = fixtures.pair_stats_n3()
        elif name == "table_n8_phi_plus":
            params, mode, stats = fixtures.pair_stats_n8()
        elif name == "table_n6_randomized":
            which = getattr(args, "which", "all")
            params, mode, stats = fixtures.pair_stats_n6(which)
        else:
            raise LogFormatError(f"fixture {name!r} is not a trial table")
        return params, mode, stats, False, f"fixture {name}"
    header, records = read_log(args.log)
    params = ChainParams(header.N)
    include = getattr(args, "include_unheralded", False)
    stats = pair_stats_from_log(records, params, header.mode, include)
    return params, header.mode, stats, not include, args.log


def cmd_estimate(args) -> int:
    try:
        params, mode, stats, herald_filter, label = _load_estimation_input(args)
    except (LogFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if not stats:
        print("no data: log contains no usable trials")
        return EXIT_OK
    try:
        est = chain_estimate_from_stats(stats, params, mode)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    lines = [
        f"input: {label}",
        f"N = {params.N}  mode = {mode}  trials = {est.n_trials}",
        f"heralding filter applied: {'yes' if herald_filter else 'no'}",
        "pair      count   mean     stderr",
    ]
    per_pair_json = []
    for (k, l), st in est.per_pair.items():
        lines.append(f"a{k:<2} b{l:<2}  {st.count:6d}  {st.mean:.5f}  {st.stderr:.5f}")
        per_pair_json.append(
            {"a_index": k, "b_index": l, "count": st.count, "mean": st.mean, "stderr": st.stderr}
        )
    lines.append(f"chained Bell parameter: {est.value:.4f} +/- {est.stderr:.4f}")
    report = {
        "report": "chainbell-estimate/1",
        "version": __version__,
        "input": label,
        "N": params.N,
        "mode": mode,
        "heralding_filter": herald_filter,
        "n_trials": est.n_trials,
        "value": est.value,
        "stderr": est.stderr,
        "per_pair": per_pair_json,
    }
    if params.N == 2:
        b, berr = chsh_parameter(est)
        lines.append(f"CHSH parameter B = {b:.4f} +/- {berr:.4f} (local bound 2)")
        report["b_chsh"] = b
        report["b_chsh_stderr"] = berr
    _emit(report, "\n".join(lines), args.json)
    return EXIT_OK


def cmd_certify(args) -> int:
    alphas = args.alpha or [0.05]
    if args.fixture:
        if args.fixture != "table_n6_randomized":
            print(
                "error: only the randomized-settings fixture supports certification",
                file=sys.stderr,
            )
            return EXIT_DATA
        t, n = fixtures.t_statistic_n6_50th()
        N = 6
        label = f"fixture {args.fixture}"
    else:
        try:
            header, records = read_log(args.log)
        except (LogFormatError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        if header.blocks <= 0:
            print(
                "error: log has no randomized-block metadata; certification "
                "requires the randomized protocol",
                file=sys.stderr,
            )
            return EXIT_DATA
        params = ChainParams(header.N)
        protocol = ProtocolSpec(
            blocks=header.blocks,
            block_size=header.block_size,
            analyzed_index=header.analyzed_index,
        )
        try:
            selection = extract_analysis_trials(records, protocol)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DATA
        t = sum(t_statistic(r, params, header.mode) for r in selection.trials)
        n = selection.n
        N = header.N
        label = args.log
    lines = [
        f"input: {label}",
        f"analyzed trials n = {n}, score sum t = {t}, N = {N}",
    ]
    bounds = []
    for alpha in alphas:
        bound = local_content_bound(t, n, N, alpha)
        lines.append(
            f"alpha = {alpha:<6g} -> minimum local fraction <= {bound.p_hat:.4f} "
            f"({100 * (1 - alpha):g} % confidence)"
        )
        bounds.append({"alpha": alpha, "p_hat": bound.p_hat})
    lines.append(
        f"for comparison: a perfect CHSH (N=2) test cannot certify below {CHSH_FLOOR:.3f}"
    )
    report = {
        "report": "chainbell-certify/1",
        "version": __version__,
        "input": label,
        "N": N,
        "t": t,
        "n": n,
        "bounds": bounds,
        "chsh_floor": CHSH_FLOOR,
    }
    _emit(report, "\n".join(lines), args.json)
    return EXIT_OK


def cmd_fidelity(args) -> int:
    if args.stderr < 0:
        print("error: stderr must be nonnegative", file=sys.stderr)
        return EXIT_DATA
    f50 = self_test_fidelity(args.b_chsh, args.stderr, 0.50)
    f95 = self_test_fidelity(args.b_chsh, args.stderr, 0.95)
    text = (
        f"B_CHSH = {args.b_chsh} +/- {args.stderr}\n"
        f"self-tested Bell-state fidelity lower bound:\n"
        f"  50 % confidence: {f50:.3f}\n"
        f"  95 % confidence: {f95:.3f}"
    )
    report = {
        "report": "chainbell-fidelity/1",
        "version": __version__,
        "b_chsh": args.b_chsh,
        "stderr": args.stderr,
        "fidelity_50": f50,
        "fidelity_95": f95,
    }
    _emit(report, text, args.json)
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.n_min < 2:
        print("error: N must be >= 2", file=sys.stderr)
        return EXIT_USAGE
    rows = []
    for N in range(args.n_min, args.n_max + 1):
        params = ChainParams(N)
        ideal = ideal_chain_value(N)
        eta = min_detection_efficiency(N)
        if args.trials > 0:
            source = QuantumSource(phi_plus())
            protocol = ProtocolSpec(blocks=args.trials, block_size=1, analyzed_index=1)
            log = run_protocol(source, params, protocol, seed=args.seed + N)
            est = chain_estimate_from_stats(
                pair_stats_from_log(log, params), params
            )
            simulated = f"{est.value:.6f}"
        else:
            simulated = "-"
        rows.append((N, ideal, simulated, eta))
    with open(args.out, "w") as fh:
        fh.write("N\tideal_chain_value\tsimulated_estimate\teta_min\n")
        for N, ideal, simulated, eta in rows:
            fh.write(f"{N}\t{ideal:.6f}\t{simulated}\t{eta:.6f}\n")
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_fixtures(args) -> int:
    for entry in fixtures.list_tables():
        print(f"{entry['name']}: {entry['citation']}")
        print(f"    {entry['description']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="chainbell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a trial log from a config file")
    p.add_argument("config", help="JSON config file")
    p.add_argument("out", help="output log path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="chained Bell parameter from a log or fixture")
    p.add_argument("log", nargs="?", help="trial log path")
    p.add_argument("--fixture", help="bundled table name instead of a log")
    p.add_argument("--which", choices=["all", "50th"], default="all",
                   help="columns of the randomized fixture to use")
    p.add_argument("--include-unheralded", action="store_true")
    p.add_argument("--json", help="also write a JSON report here")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("certify", help="memory-robust bound on the minimum local fraction")
    p.add_argument("log", nargs="?", help="trial log path (randomized protocol)")
    p.add_argument("--fixture", help="bundled table name instead of a log")
    p.add_argument("--alpha", type=float, action="append",
                   help="significance level (repeatable; default 0.05)")
    p.add_argument("--json", help="also write a JSON report here")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("fidelity", help="self-tested fidelity bounds from a CHSH value")
    p.add_argument("b_chsh", type=float)
    p.add_argument("stderr", type=float)
    p.add_argument("--json", help="also write a JSON report here")
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("sweep", help="ideal/simulated chain values and efficiency thresholds")
    p.add_argument("out", help="output TSV path")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=15)
    p.add_argument("--trials", type=int, default=0,
                   help="simulated trials per N (0 skips simulation)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fixtures", help="list the bundled data tables")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("estimate", "certify") and bool(args.log) == bool(args.fixture):
        parser.error(f"{args.command} needs exactly one of a log path or --fixture")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

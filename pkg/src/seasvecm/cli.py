"""Command-line interface: simulate, estimate and compare subcommands.

All commands write their outputs into a directory given by ``--out``
together with a ``run.json`` that embeds the resolved configuration and
seed, so every run can be reproduced from its outputs alone.

Exit codes: 0 on success, 2 for configuration or input errors, 3 for
numerical failures during sampling or scoring.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from . import __version__
from .compare import feature_marginals, model_posteriors
from .dgp import default_config, simulate as simulate_dgp
from .errors import ChainError, ConfigError, NumericalError
from .estimators import SeasonalModelComparison, SeasonalVECM
from .pipeline import QuarterlySeries, read_csv, write_csv
from .priors import PriorHyper

DEFAULT_CONFIG = {
    "model": {"k": 5, "d": 2, "s": 0, "r1": 1, "r2": 1, "r3": 1},
    "prior": {
        "sigma_scale": 0.1,
        "sigma_dof": None,
        "p_scale": 0.1,
        "s_nu": 1.0,
        "n_nu": 1.0,
        "nu_fixed": None,
    },
    "sampler": {"burn_in": 10_000, "keep": 20_000, "thin": 1},
    "compare": {
        "k": 5,
        "d_values": [1, 2, 3, 4],
        "s_values": [0, 1],
        "rank_values": None,
        "n_draws": 200_000,
        "n_trunc_draws": 50_000,
    },
    "simulate": {"total": 250, "discard": 50, "start": [2000, 1]},
    "data": {"log": []},
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = dict(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown configuration key {path + key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{path + key!r} must be a mapping")
            out[key] = _merge(base[key], value, path + key + ".")
        else:
            out[key] = value
    return out


def load_config(path=None) -> dict:
    """Defaults merged with an optional YAML config file."""
    if path is None:
        return json.loads(json.dumps(DEFAULT_CONFIG))
    try:
        with open(path) as fh:
            user = yaml.safe_load(fh) or {}
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config file: {exc}") from exc
    if not isinstance(user, dict):
        raise ConfigError("config file must contain a mapping")
    return _merge(DEFAULT_CONFIG, user)


def _hyper_factory(prior_cfg: dict):
    def factory(spec):
        hyper = PriorHyper.default(
            spec,
            scale=float(prior_cfg["sigma_scale"]),
            p_scale=float(prior_cfg["p_scale"]),
            s_nu=float(prior_cfg["s_nu"]),
            n_nu=float(prior_cfg["n_nu"]),
            nu_fixed=prior_cfg["nu_fixed"],
        )
        if prior_cfg["sigma_dof"] is not None:
            hyper.q = float(prior_cfg["sigma_dof"])
        return hyper

    return factory


def _load_data(args, config) -> QuarterlySeries:
    if not args.data:
        raise ConfigError("--data is required for this command")
    log_cols = config["data"]["log"]
    if args.log:
        log_cols = [c.strip() for c in args.log.split(",") if c.strip()]
    try:
        return read_csv(args.data, log_columns=log_cols or None)
    except FileNotFoundError as exc:
        raise ConfigError(f"data file not found: {args.data}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_metadata(out: Path, command: str, config: dict, args) -> None:
    meta = {
        "command": command,
        "version": __version__,
        "seed": args.seed,
        "config": config,
        "data": getattr(args, "data", None),
        "workers": getattr(args, "workers", None),
    }
    (out / "run.json").write_text(json.dumps(meta, indent=2, default=str) + "\n")


def cmd_simulate(args) -> int:
    config = load_config(args.config)
    sim_cfg = config["simulate"]
    dgp = default_config(total=int(sim_cfg["total"]), discard=int(sim_cfg["discard"]))
    dgp.start = tuple(int(v) for v in sim_cfg["start"])
    series = simulate_dgp(dgp, seed=args.seed)
    out = _out_dir(args)
    write_csv(series, out / "simulated.csv")
    _write_run_metadata(out, "simulate", config, args)
    print(f"wrote {series.n_obs} quarters x {series.n_series} series to "
          f"{out / 'simulated.csv'}")
    return 0


def _complex_to_lists(arr: np.ndarray):
    arr = np.asarray(arr)
    if np.iscomplexobj(arr):
        return {"re": arr.real.tolist(), "im": arr.imag.tolist()}
    return arr.tolist()


def cmd_estimate(args) -> int:
    config = load_config(args.config)
    series = _load_data(args, config)
    model_cfg = config["model"]
    sampler_cfg = config["sampler"]
    prior_cfg = config["prior"]

    est = SeasonalVECM(
        r1=int(model_cfg["r1"]),
        r2=int(model_cfg["r2"]),
        r3=int(model_cfg["r3"]),
        k=int(model_cfg["k"]),
        d=int(model_cfg["d"]),
        s=int(model_cfg["s"]),
        burn_in=int(sampler_cfg["burn_in"]),
        keep=int(sampler_cfg["keep"]),
        thin=int(sampler_cfg["thin"]),
        seed=args.seed,
    )
    spec = est._spec(series.n_series)
    est.hyper = _hyper_factory(prior_cfg)(spec)
    est.fit(series)

    out = _out_dir(args)
    summary = {
        "spec": {
            "n": spec.n, "k": spec.k, "d": spec.d, "s": spec.s,
            "r1": spec.r1, "r2": spec.r2, "r3": spec.r3,
        },
        "diagnostics": est.diagnostics(),
        "spaces": {},
    }
    for freq, space in est.summaries_.items():
        summary["spaces"][freq] = {
            "beta_hat": _complex_to_lists(space.beta_hat),
            "tau_sq": space.tau_sq,
            "eigenvalues": space.eigenvalues.tolist(),
            "n_draws": space.n_draws,
        }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    deviations = est.deviation_series()
    deviations.insert(0, "date", [series.dates()[t - 1] for t in est._design_.t_index])
    deviations.to_csv(out / "deviations.csv", index=False)
    _write_run_metadata(out, "estimate", config, args)
    print(f"stored {len(est.chain_.draws)} draws "
          f"(acceptance rate {est.acceptance_rate_:.3f}); "
          f"outputs in {out}")
    return 0


def cmd_compare(args) -> int:
    config = load_config(args.config)
    series = _load_data(args, config)
    cmp_cfg = config["compare"]

    est = SeasonalModelComparison(
        k=int(cmp_cfg["k"]),
        d_values=tuple(cmp_cfg["d_values"]),
        s_values=tuple(cmp_cfg["s_values"]),
        rank_values=cmp_cfg["rank_values"],
        hyper_factory=_hyper_factory(config["prior"]),
        n_draws=int(cmp_cfg["n_draws"]),
        n_trunc_draws=int(cmp_cfg["n_trunc_draws"]),
        seed=args.seed,
        workers=args.workers,
    )
    est.fit(series)

    out = _out_dir(args)
    est.results_.to_csv(out / "models.csv", index=False)
    rows = []
    for feature, table in est.feature_marginals_.items():
        for value, probs in table.items():
            rows.append(
                {
                    "feature": feature,
                    "value": value,
                    "prior": probs["prior"],
                    "posterior": probs["posterior"],
                }
            )
    pd.DataFrame(rows).to_csv(out / "features.csv", index=False)
    (out / "dedup_log.json").write_text(
        json.dumps(est.grid_.dedup_log, indent=2, default=str) + "\n"
    )
    _write_run_metadata(out, "compare", config, args)
    best = est.results_.iloc[0]
    print(f"scored {len(est.grid_)} models; best: d={int(best['d'])} "
          f"s={int(best['s'])} ranks=({int(best['r1'])},{int(best['r2'])},"
          f"{int(best['r3'])}) with posterior {best['posterior_prob']:.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seasvecm",
        description="Bayesian seasonal cointegration analysis of quarterly data",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out", default="seasvecm-out", help="output directory")

    p_sim = sub.add_parser(
        "simulate", parents=[common], help="simulate the benchmark process"
    )
    p_sim.set_defaults(func=cmd_simulate)

    data_opts = argparse.ArgumentParser(add_help=False)
    data_opts.add_argument("--data", help="quarterly CSV (date column, YYYYQn)")
    data_opts.add_argument(
        "--log", help="comma-separated series to log-transform, or 'all'"
    )

    p_est = sub.add_parser(
        "estimate",
        parents=[common, data_opts],
        help="sample the posterior of one model",
    )
    p_est.set_defaults(func=cmd_estimate)

    p_cmp = sub.add_parser(
        "compare",
        parents=[common, data_opts],
        help="score a grid of candidate models",
    )
    p_cmp.add_argument(
        "--workers", type=int, default=None, help="parallel scoring processes"
    )
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, ChainError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Command line entry point: serve, seed, simulate, export.

Service settings come from defaults, then the LISTEN_ADDR / WINDOW_HOURS /
QUORUM / SWEEP_INTERVAL_SECONDS / DATA_PATH / UI_DIR environment
variables, then explicit flags, in that order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from doublescore.api import ServiceConfig, create_app
from doublescore.lab import (
    BadConfig,
    ComparisonConfig,
    CredibilityMode,
    PanelSpec,
    format_report,
    run_comparison,
)
from doublescore.models import ExpertProfile, Principal, Project, Role
from doublescore.store import Store

DEMO_RECORDS = {
    "admin_token": "demo-admin-token",
    "creator_token": "demo-creator-token",
    "backer_token": "demo-backer-token",
    "experts": [
        ("exp_demo_a", "Ada (hardware)", 900, ("hardware", "design"), "demo-expert-900"),
        ("exp_demo_b", "Bram (hardware)", 600, ("hardware",), "demo-expert-600"),
        ("exp_demo_c", "Cleo (games)", 300, ("games",), "demo-expert-300"),
    ],
    "projects": [
        ("proj_demo_synth", "Modular Synth Kit", "A hackable desktop synthesizer.",
         ("hardware", "design"), 500_000),
        ("proj_demo_puzzle", "Co-op Puzzle Game", "A two-player physical puzzle game.",
         ("games",), 120_000),
    ],
}


def _config_from(args: argparse.Namespace) -> ServiceConfig:
    config = ServiceConfig.from_env(os.environ)
    if args.listen is not None:
        config.listen_addr = args.listen
    if args.window_hours is not None:
        config.window_hours = args.window_hours
    if args.quorum is not None:
        config.quorum = args.quorum
    if args.sweep_interval is not None:
        config.sweep_interval_seconds = args.sweep_interval
    if args.data is not None:
        config.data_path = args.data
    if getattr(args, "ui", None) is not None:
        config.ui_dir = args.ui
    config.__post_init__()
    return config


def _add_service_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", help="path to the sqlite data file")
    parser.add_argument("--listen", help="listen address, host:port")
    parser.add_argument("--window-hours", type=int, help="evaluation window length")
    parser.add_argument("--quorum", type=int, help="minimum effective votes for a recommendation")
    parser.add_argument("--sweep-interval", type=int, help="sweeper period in seconds")


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    config = _config_from(args)
    if config.ui_dir is None and Path("frontend/dist").is_dir():
        config.ui_dir = "frontend/dist"
    store = Store(config.data_path)
    app = create_app(store, config, run_sweeper=True)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_seed(args: argparse.Namespace) -> int:
    if not args.demo:
        print("nothing to seed; pass --demo for the demo data set", file=sys.stderr)
        return 2
    config = _config_from(args)
    store = Store(config.data_path)
    try:
        if store.get_expert(DEMO_RECORDS["experts"][0][0]) is not None:
            print("demo data already present; nothing to do")
            return 0
        store.put_principal(Principal("user_demo_admin", Role.ADMIN, DEMO_RECORDS["admin_token"]))
        store.put_principal(Principal("user_demo_creator", Role.CREATOR, DEMO_RECORDS["creator_token"]))
        store.put_principal(Principal("user_demo_backer", Role.BACKER, DEMO_RECORDS["backer_token"]))
        for expert_id, name, credibility, tags, token in DEMO_RECORDS["experts"]:
            store.add_expert(ExpertProfile(expert_id, name, credibility, frozenset(tags)))
            store.put_principal(Principal(expert_id, Role.EXPERT, token))
        for project_id, title, description, tags, goal in DEMO_RECORDS["projects"]:
            store.add_project(Project(
                id=project_id,
                creator_id="user_demo_creator",
                title=title,
                description=description,
                categories=frozenset(tags),
                funding_goal=goal,
            ))
        print(f"seeded demo data into {config.data_path}")
        print(f"  admin token:   {DEMO_RECORDS['admin_token']}")
        print(f"  creator token: {DEMO_RECORDS['creator_token']}")
        print(f"  backer token:  {DEMO_RECORDS['backer_token']}")
        for expert_id, name, credibility, _, token in DEMO_RECORDS["experts"]:
            print(f"  expert token:  {token}  ({name}, credibility {credibility})")
        return 0
    finally:
        store.close()


def cmd_simulate(args: argparse.Namespace) -> int:
    try:
        competence = tuple(Fraction(part) for part in args.competence.split(","))
    except (ValueError, ZeroDivisionError):
        print(f"could not parse --competence {args.competence!r}", file=sys.stderr)
        return 2
    if len(competence) != args.experts:
        print(
            f"--experts is {args.experts} but --competence lists {len(competence)} values",
            file=sys.stderr,
        )
        return 2
    try:
        spec = PanelSpec(
            expert_count=args.experts,
            competence=competence,
            credibility_mode=CredibilityMode(args.credibility_mode),
            seed=args.seed,
        )
        config = ComparisonConfig(trials=args.trials, spec=spec)
        report = run_comparison(config, seed=args.seed)
    except (BadConfig, ValueError) as exc:
        print(f"bad simulation config: {exc}", file=sys.stderr)
        return 2
    text = format_report(report, config)
    Path(args.out).write_text(text, encoding="utf-8")
    print(text, end="")
    print(f"report written to {args.out}", file=sys.stderr)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    config = _config_from(args)
    store = Store(config.data_path)
    try:
        lines = (json.dumps(record, sort_keys=True) for record in store.export_records())
        if args.out:
            Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        else:
            for line in lines:
                print(line)
        return 0
    finally:
        store.close()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doublescore",
        description="Credibility-weighted expert score voting platform tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the REST service with the sweeper")
    _add_service_flags(serve)
    serve.add_argument("--ui", help="directory with the built web UI to serve at /ui")
    serve.set_defaults(func=cmd_serve)

    seed = sub.add_parser("seed", help="populate the store with demo records")
    _add_service_flags(seed)
    seed.add_argument("--demo", action="store_true", help="create the demo data set")
    seed.set_defaults(func=cmd_seed)

    simulate = sub.add_parser("simulate", help="compare mechanisms on synthetic panels")
    simulate.add_argument("--trials", type=int, required=True)
    simulate.add_argument("--experts", type=int, required=True)
    simulate.add_argument(
        "--competence", required=True,
        help="comma list of per-expert competences in [0,1]; decimals or fractions",
    )
    simulate.add_argument(
        "--credibility-mode", choices=[m.value for m in CredibilityMode],
        default=CredibilityMode.INFORMATIVE.value,
    )
    simulate.add_argument("--seed", type=int, required=True)
    simulate.add_argument("--out", required=True, help="path for the report file")
    simulate.set_defaults(func=cmd_simulate)

    export = sub.add_parser("export", help="dump all records as JSON lines")
    _add_service_flags(export)
    export.add_argument("--out", help="write to a file instead of stdout")
    export.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points: `guestlift serve` and `guestlift experiment run`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guestlift",
        description="Hotel upsell service: recommenders, persuasion targeting, ad copy.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the upsell HTTP service")
    serve.add_argument("--config", required=True, help="service config JSON file")
    serve.add_argument("--port", type=int, help="override the configured port")
    serve.add_argument("--data-dir", help="override the campaign data directory")
    serve.add_argument("--backend", choices=("mock", "live"), help="override the LLM backend kind")
    serve.add_argument("--seed", type=int, help="override the mock backend seed")

    experiment = sub.add_parser("experiment", help="simulation experiments")
    esub = experiment.add_subparsers(dest="experiment_command", required=True)
    run = esub.add_parser("run", help="run the conversion-uplift experiment")
    run.add_argument("--config", required=True, help="simulation config JSON file")
    run.add_argument("--seed", type=int, help="override the configured seed")
    run.add_argument("--out", required=True, help="where to write the report JSON")
    run.add_argument(
        "--endpoint",
        help="base URL of a running service; ad copy then flows through POST /ads/suggest",
    )
    return parser


def _serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .config import load_config
    from .service import create_app

    config = load_config(args.config).with_overrides(
        port=args.port,
        data_dir=args.data_dir,
        backend_kind=args.backend,
        seed=args.seed,
    )
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def _experiment_run(args: argparse.Namespace) -> int:
    import httpx

    from .experiment import ServiceUnreachable, SimConfig, run_experiment

    document = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if not isinstance(document, dict):
        print("experiment config must be a JSON object", file=sys.stderr)
        return 2
    if args.seed is not None:
        document["seed"] = args.seed
    cfg = SimConfig.from_document(document)

    client = httpx.Client(base_url=args.endpoint) if args.endpoint else None
    try:
        report = run_experiment(cfg, client=client)
    except ServiceUnreachable as exc:
        print(f"experiment failed: {exc}", file=sys.stderr)
        return 2
    finally:
        if client is not None:
            client.close()

    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    print(
        f"control {report.control_rate:.4f}  treatment {report.treatment_rate:.4f}  "
        f"uplift {report.uplift:+.2%}  z {report.z_statistic:.2f}  p {report.p_value:.4g}"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    return _experiment_run(args)


if __name__ == "__main__":
    sys.exit(main())

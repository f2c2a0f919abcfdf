"""Command-line client.

Every subcommand builds a JSON request and sends it to the HTTP service —
in-process by default, or a remote server with --server — so the CLI and the
API expose the same behavior. Results print to stdout as JSON (or to --output);
errors print to stderr as one JSON object. Exit codes: 0 success, 1 runtime or
I/O failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groupbandits",
        description="Best-group identification toolkit for multi-objective bandits.")
    parser.add_argument("--server", default=None,
                        help="base URL of a running service; default runs in-process")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--delta", type=float, default=0.1)
    common.add_argument("--epsilon", type=float, default=0.05)
    common.add_argument("--beta-scale", type=float, default=1.0)
    common.add_argument("--max-rounds", type=int, default=10_000_000)
    common.add_argument("--output", default=None, help="write result JSON here")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate an instance JSON")
    p.add_argument("--generator", required=True,
                   choices=["random-gpsi", "random-lbgi", "hard-gpsi"])
    p.add_argument("--n-groups", type=int, required=True)
    p.add_argument("--n-arms", type=int, required=True)
    p.add_argument("--n-dims", type=int, required=True)
    p.add_argument("--pareto-count", type=int, default=1)
    p.add_argument("--weights", type=float, nargs="+", default=None)
    p.add_argument("--delta-min", type=float, default=0.05)
    p.add_argument("--a-values", type=float, nargs="+", default=None,
                   help="efficiency levels a1..a5 for the hard instance")
    p.add_argument("--label", default=None)

    p = sub.add_parser("gaps", parents=[common],
                       help="print the gap report for an instance")
    p.add_argument("instance", help="path to an instance JSON file")
    p.add_argument("--weights", type=float, nargs="+", default=None,
                   help="weight vector: produces the linear report")

    p = sub.add_parser("run", parents=[common],
                       help="run one algorithm on one instance")
    p.add_argument("instance", help="path to an instance JSON file")
    p.add_argument("--algo", required=True,
                   choices=["te", "age", "ge", "unis", "eecb", "tel"])
    p.add_argument("--weights", type=float, nargs="+", default=None)
    p.add_argument("--stream", type=int, default=0,
                   help="RNG stream index under the master seed")
    p.add_argument("--trace", default=None,
                   help="write the event trace as JSON lines to this path")

    p = sub.add_parser("sweep", parents=[common],
                       help="run an experiment sweep from a config file")
    p.add_argument("config", help="path to an experiment-config JSON file")
    p.add_argument("--csv", default=None, help="also write the records CSV here")

    p = sub.add_parser("bounds", parents=[common],
                       help="evaluate a sample-complexity expression")
    p.add_argument("instance", help="path to an instance JSON file")
    p.add_argument("--kind", required=True,
                   choices=["te-upper", "gpsi-lower", "eecb-upper", "lbgi-lower"])
    p.add_argument("--weights", type=float, nargs="+", default=None)
    p.add_argument("--constant", type=float, default=1.0)
    p.add_argument("--refined", action="store_true")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


class _Client:
    """POSTs to a remote server when --server is given, else to the FastAPI app
    in-process."""

    def __init__(self, server: str | None):
        if server:
            import httpx
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient

            from .service import app
            self._client = TestClient(app)

    def post(self, path: str, payload: dict):
        resp = self._client.post(path, json=payload)
        try:
            body = resp.json()
        except ValueError:
            body = {"error": "BadResponse", "message": resp.text}
        return resp.status_code, body


def _load_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _fail(body: dict) -> int:
    print(json.dumps(body), file=sys.stderr)
    return 1


def _emit(data: dict, output: str | None) -> None:
    text = json.dumps(data, indent=2) + "\n"
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app
        uvicorn.run(app, host=args.host, port=args.port)
        return 0

    client = _Client(args.server)
    try:
        if args.command == "gen":
            payload = {"generator": args.generator, "n_groups": args.n_groups,
                       "n_arms": args.n_arms, "n_dims": args.n_dims,
                       "seed": args.seed, "epsilon": args.epsilon,
                       "pareto_count": args.pareto_count, "weights": args.weights,
                       "delta_min": args.delta_min, "a_values": args.a_values,
                       "label": args.label}
            status, body = client.post("/instances/generate", payload)
            if status != 200:
                return _fail(body)
            _emit(body["instance"], args.output)
            return 0

        if args.command == "gaps":
            payload = {"instance": _load_json(args.instance),
                       "epsilon": args.epsilon, "weights": args.weights}
            status, body = client.post("/gaps", payload)
            if status != 200:
                return _fail(body)
            _emit(body, args.output)
            return 0

        if args.command == "run":
            payload = {"instance": _load_json(args.instance),
                       "algorithm": args.algo, "delta": args.delta,
                       "epsilon": args.epsilon, "weights": args.weights,
                       "beta_scale": args.beta_scale, "seed": args.seed,
                       "stream": args.stream, "max_rounds": args.max_rounds,
                       "trace": args.trace is not None}
            status, body = client.post("/run", payload)
            if status != 200:
                return _fail(body)
            if args.trace is not None:
                events = body.pop("trace", []) or []
                with open(args.trace, "w", encoding="utf-8") as fh:
                    for event in events:
                        fh.write(json.dumps(event) + "\n")
            _emit(body, args.output)
            return 0

        if args.command == "sweep":
            config = _load_json(args.config)
            status, body = client.post("/sweep", {"config": config})
            if status != 200:
                return _fail(body)
            if args.csv:
                Path(args.csv).write_text(body["csv"], encoding="utf-8")
            _emit({"summary": body["summary"]}, args.output)
            return 0

        if args.command == "bounds":
            payload = {"instance": _load_json(args.instance), "kind": args.kind,
                       "delta": args.delta, "epsilon": args.epsilon,
                       "weights": args.weights, "constant": args.constant,
                       "refined": args.refined}
            status, body = client.post("/bounds", payload)
            if status != 200:
                return _fail(body)
            _emit(body, args.output)
            return 0
    except OSError as exc:
        return _fail({"error": type(exc).__name__, "message": str(exc)})
    return 2


if __name__ == "__main__":
    sys.exit(main())

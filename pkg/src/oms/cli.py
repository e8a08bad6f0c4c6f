"""Command line entry points.

``oms serve``      run the HTTP service
``oms analytics``  run the loop / community / powerlaw tools on input files
``oms seed-demo``  write a ready-to-explore demo dataset
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .analytics import (LoopParams, Stakeholder, aggregate_topology, circuit_count,
                        derive_circuits, fit_power_law, simulate_loop, tail_share)
from .app import Application
from .config import load_config
from .seed import seed_demo


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="oms",
                                     description="online management system")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--config", help="path to a JSON config file")
    serve.add_argument("--seed", action="store_true",
                       help="seed the demo dataset before serving")

    analytics = sub.add_parser("analytics", help="run an analytics tool")
    analytics.add_argument("tool", choices=["loop", "community", "powerlaw"])
    analytics.add_argument("--in", dest="infile", required=True,
                           help="JSON input file (see README for shapes)")
    analytics.add_argument("--out", dest="outfile",
                           help="write JSON here instead of stdout")

    seed = sub.add_parser("seed-demo", help="seed the demo dataset")
    seed.add_argument("--config", help="path to a JSON config file")

    args = parser.parse_args(argv)
    if args.command == "serve":
        return _serve(args)
    if args.command == "analytics":
        return _analytics(args)
    if args.command == "seed-demo":
        return _seed(args)
    return 2


def _serve(args) -> int:
    import sys as _sys

    import uvicorn

    from .api import create_app

    # short GIL slices keep fast queries from waiting out slow writers' quanta
    _sys.setswitchinterval(5e-4)
    config = load_config(args.config)
    core = Application(config)
    if args.seed:
        seed_demo(core)
    app = create_app(core)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def _seed(args) -> int:
    config = load_config(args.config)
    core = Application(config)
    world = seed_demo(core)
    print(json.dumps({"accounts": {k: v["username"] for k, v in world.items()
                                   if isinstance(v, dict)},
                      "password": world["password"],
                      "dates": world["dates"]}, indent=2))
    core.close()
    return 0


def _analytics(args) -> int:
    with open(args.infile, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    if args.tool == "loop":
        params = LoopParams(gain=payload["gain"],
                            sensitivity=payload.get("sensitivity", 0.0),
                            review_period=payload.get("review_period", 1),
                            noise_sigma=payload.get("noise_sigma", 0.0),
                            seed=payload.get("seed"))
        trace = simulate_loop(payload["demand"], payload["f0"], params,
                              horizon=payload.get("horizon"))
        result = trace.to_table()
    elif args.tool == "community":
        stakeholders = [Stakeholder.of(s["name"], states=s.get("base_states", []),
                                       needs=s.get("needs", []),
                                       outputs=s.get("outputs", []))
                        for s in payload["stakeholders"]]
        graph = derive_circuits(stakeholders,
                                expand_states=payload.get("expand_states", False))
        result = {"possible_circuits": circuit_count(len(graph.participants)),
                  "graph": graph.to_record()}
        if payload.get("hub"):
            result["aggregated"] = aggregate_topology(graph, payload["hub"]).to_record()
    else:
        result = {}
        if payload.get("samples"):
            fit = fit_power_law([tuple(p) for p in payload["samples"]])
            result["fit"] = {"c": fit.c, "k": fit.k, "r_squared": fit.r_squared,
                             "power_law": fit.power_law}
        if payload.get("ranked_values"):
            shares = tail_share(payload["ranked_values"],
                                payload.get("head_fraction", 0.2))
            result["shares"] = shares.to_record()
    text = json.dumps(result, indent=2, default=str)
    if args.outfile:
        with open(args.outfile, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())

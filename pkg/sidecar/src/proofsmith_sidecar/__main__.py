"""Entry point: `proofsmith-sidecar --config server.json` or `--dummy`."""
from __future__ import annotations

import argparse
import logging
import sys

import uvicorn

from .app import create_app
from .config import dummy_config, load_config


def main(argv=None):
    parser = argparse.ArgumentParser(prog="proofsmith-sidecar")
    parser.add_argument("--config", default=None, help="JSON server configuration")
    parser.add_argument("--dummy", action="store_true",
                        help="serve deterministic stand-in engines (no checkpoints)")
    parser.add_argument("--host", default=None)
    parser.add_argument("--port", type=int, default=None)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

    if args.config:
        config = load_config(args.config)
    elif args.dummy:
        config = dummy_config()
    else:
        parser.error("pass --config FILE or --dummy")
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port

    try:
        app = create_app(config)
    except RuntimeError as exc:
        print(f"startup failed: {exc}", file=sys.stderr)
        return 1
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())

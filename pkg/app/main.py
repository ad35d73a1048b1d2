"""
Entry point of the `ddl` command-line tool.

`python -m app` and the `ddl` console script both call main().
"""

import logging
import sys
from typing import List, Optional

from app.routers.cli_router import log_level, parse, route


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, configure logging and run one command.

    Args:
        argv: Arguments without the program name; sys.argv[1:] when None

    Returns:
        Exit code: 0 success or yes, 1 no or postulate failures, 2 errors
    """
    try:
        args = parse(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    logging.basicConfig(
        level=log_level(args),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return route(args)


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python3
"""
Run the worked examples and a small verification pass; exit non-zero on any mismatch.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from app.core.utils import get_logger, setup_logging  # noqa: E402
from app.models.schemas import EnumerationParams  # noqa: E402
from app.services.duality import render_trace  # noqa: E402
from app.services.golden import run_all  # noqa: E402
from app.services.verification import verify  # noqa: E402

logger = get_logger(__name__)


def main() -> None:
    parser = argparse.ArgumentParser(description="Worked examples and a quick self-test")
    parser.add_argument("--trace", action="store_true", help="Print the step table of each example")
    parser.add_argument("--max-rank", type=int, default=2, help="Rank bound of the quick self-test")
    parser.add_argument("--skip-selftest", action="store_true", help="Only run the worked examples")
    args = parser.parse_args()

    setup_logging()
    ok = True
    for result in run_all():
        print(result.line())
        if args.trace:
            print(render_trace(result.trace))
        ok = ok and result.ok

    if not args.skip_selftest:
        report = verify(EnumerationParams(max_rank=args.max_rank))
        print(report.summary())
        ok = ok and report.passed

    if not ok:
        logger.error("golden.failed")
        sys.exit(1)


if __name__ == "__main__":
    main()

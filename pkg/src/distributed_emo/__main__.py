"""Allow ``python -m distributed_emo`` to run the experiment CLI."""

import sys

from .cli.runner import main

if __name__ == "__main__":
    sys.exit(main())

"""Allow ``python -m divlog``."""

import sys

from divlog.cli import main

sys.exit(main())

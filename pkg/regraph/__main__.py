"""Allow ``python -m regraph``."""

from .cli import main

raise SystemExit(main())

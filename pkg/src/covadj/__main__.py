"""Entry point for ``python -m covadj``."""

from .cli import main

raise SystemExit(main())

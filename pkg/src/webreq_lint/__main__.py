import sys

from webreq_lint.cli import main

sys.exit(main())

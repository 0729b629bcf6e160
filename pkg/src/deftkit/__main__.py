import sys

from deftkit.cli import main

sys.exit(main())

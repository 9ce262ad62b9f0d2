import sys

from switchfrac.cli import main

sys.exit(main())

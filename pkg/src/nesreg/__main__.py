import sys

from nesreg.cli import main

sys.exit(main())

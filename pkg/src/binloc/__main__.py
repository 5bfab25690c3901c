import sys

from binloc.cli import main

sys.exit(main())

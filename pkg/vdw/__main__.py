import sys

from vdw.cli import main

sys.exit(main())

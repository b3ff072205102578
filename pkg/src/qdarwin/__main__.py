import sys

from qdarwin.cli import main

sys.exit(main())

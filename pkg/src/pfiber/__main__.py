import sys

from pfiber.cli import main

sys.exit(main())

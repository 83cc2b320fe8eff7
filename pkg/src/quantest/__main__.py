import sys

from quantest.cli import main

sys.exit(main())

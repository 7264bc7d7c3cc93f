import sys

from tensorclt.cli import main

sys.exit(main())

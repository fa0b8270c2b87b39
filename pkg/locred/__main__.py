import sys

from locred.runner.cli import main

sys.exit(main())

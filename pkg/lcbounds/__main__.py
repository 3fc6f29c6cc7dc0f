import sys

from .verify import cli_main

sys.exit(cli_main())

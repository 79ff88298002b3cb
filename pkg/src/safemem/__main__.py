import sys

from safemem.cli import main

sys.exit(main())

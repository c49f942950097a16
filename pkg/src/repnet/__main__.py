import sys

from repnet.cli import main

sys.exit(main())

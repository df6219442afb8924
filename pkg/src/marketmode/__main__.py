import sys

from marketmode.cli import main

sys.exit(main())

import sys

from ontorec.cli import main

sys.exit(main())

import sys

from qvote.cli import main

sys.exit(main())

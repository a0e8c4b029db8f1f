import sys

from kondoqet.cli import main

sys.exit(main())

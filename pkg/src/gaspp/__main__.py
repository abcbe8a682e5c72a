import sys

from gaspp.cli import main

sys.exit(main())

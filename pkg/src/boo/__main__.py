import sys

from boo.cli import main

sys.exit(main())

import sys

from tnnflag.cli import main

sys.exit(main())

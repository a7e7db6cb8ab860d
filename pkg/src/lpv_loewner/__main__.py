import sys

from lpv_loewner.cli import main

sys.exit(main())

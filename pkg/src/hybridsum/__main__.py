import sys

from hybridsum.cli import main

sys.exit(main())

import sys

from noisemod.cli import main

sys.exit(main())

import sys

from rlchallenges.cli import main

sys.exit(main())

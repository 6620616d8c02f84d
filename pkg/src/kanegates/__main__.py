import sys

from kanegates.cli import main

sys.exit(main())

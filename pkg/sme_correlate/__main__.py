import sys

from sme_correlate.main import main

sys.exit(main())

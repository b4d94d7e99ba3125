# SPDX-License-Identifier: BSD-3-Clause

"""Run the command line interface with C{python -m cdmg}."""

import sys

from cdmg.cmdline import main

sys.exit(main())

# SPDX-License-Identifier: BSD-3-Clause

"""Package version info."""

from __future__ import annotations

import importlib.metadata

try:
    VERSION_STRING = importlib.metadata.version("cdmg")
except importlib.metadata.PackageNotFoundError:
    # Running from a source tree that was not installed.
    VERSION_STRING = "0.0.0+source"

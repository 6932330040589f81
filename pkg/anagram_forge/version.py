# Copyright 2021 Canonical Ltd.
# See LICENSE file for licensing details.

__all__ = ("version", "CACHE_FORMAT")

LIBAPI = 0
LIBPATCH = 1

# Bump when the checkpoint layout changes; older caches are ignored, not migrated.
CACHE_FORMAT = 1


version = f"{LIBAPI}.{LIBPATCH}"

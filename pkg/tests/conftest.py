"""Shared toy fixtures for gradient checks and training tests.

The toy fusion model and its gate-safe check point live in the package's
check suite (cvradar.traincli.checks) so the CLI verification commands and
the tests exercise the identical construction.
"""

from cvradar.traincli.checks import toy_branch_config, toy_fusenet_instance

TOY_CONFIG = toy_branch_config()

__all__ = ["TOY_CONFIG", "toy_branch_config", "toy_fusenet_instance"]

"""
Test that the package and its numerical stack import.
"""
import sys
import unittest
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


class TestImports(unittest.TestCase):
    """Every public module imports without side effects beyond logging setup."""

    def test_core_modules(self):
        try:
            from kgalerkin.core import elliptic, params, spectral  # noqa: F401
        except ImportError as e:
            self.fail(f"Failed to import core modules: {e}")

    def test_application_modules(self):
        try:
            from kgalerkin.application import critical, dynamics, residual, stationary  # noqa: F401
        except ImportError as e:
            self.fail(f"Failed to import application modules: {e}")

    def test_history_logger_import(self):
        try:
            from kgalerkin.utils.history import HistoryLogger, get_history_logger  # noqa: F401
        except ImportError as e:
            self.fail(f"Failed to import HistoryLogger: {e}")

    def test_cli_import(self):
        try:
            from scripts.python.cli import app
        except ImportError as e:
            self.fail(f"Failed to import CLI app: {e}")
        names = {command.name or command.callback.__name__ for command in app.registered_commands}
        self.assertEqual(names, {"stationary", "evolve", "critical", "landscape", "residual", "tensor"})

    def test_scipy_available(self):
        try:
            import scipy.integrate  # noqa: F401
            import scipy.optimize  # noqa: F401
        except ImportError:
            self.fail("scipy is not installed. Run: pip install scipy")


if __name__ == "__main__":
    unittest.main()

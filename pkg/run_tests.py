"""Test runner: python run_tests.py [pytest args]"""
import sys
import os

import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))


if __name__ == "__main__":
    args = sys.argv[1:] or ["-q"]
    sys.exit(pytest.main([os.path.join(os.path.dirname(os.path.abspath(__file__)), "tests"), *args]))

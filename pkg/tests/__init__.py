"""Testcases of pshlab.

All testcases are functions which start with test_ by convention and every module
lists its cases in ALL_CASES. The cases run with pytest or with the run_tests.py
script in the repository root, which prints a summary table.
"""

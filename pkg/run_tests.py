"""
Runs the testcases of all test modules without pytest.
Every module in tests/ lists its cases in ALL_CASES. The cases only use plain
asserts and pytest.raises, so this runner and pytest give the same results.
Pass module names (e.g. "test_expr") to run only those modules.
"""

import importlib
import logging
import sys
import traceback
from collections import defaultdict
from time import perf_counter
from typing import Dict, List, Union

from pshlab import utils

MODULES = [
    "test_expr",
    "test_taylor",
    "test_cframe",
    "test_boundary",
    "test_classify",
    "test_construct",
    "test_certify",
    "test_gallery",
    "test_cli",
]


def format_results(result_dict: Dict[str, Dict[str, Union[str, float]]]) -> str:
    """Gives a summarizing table of the test results.

    Args:
        result_dict (Dict): The results of the tests mapped by their names.

    Returns:
        str: The formatted string.
    """
    formatted_str = "### RESULTS ###"

    formatted_str += f"\n{'test name':<60}{'elapsed time':<15}exception"
    for test_name, test_result in result_dict.items():
        formatted_str += f"\n{test_name:<60}"
        formatted_str += f"{str(round(test_result['elapsed_time'], 5)):<15}"
        formatted_str += f"{type(test_result['exception']).__name__}"

    if all(r["exception"] is None for r in result_dict.values()):
        formatted_str += "\n### PASSED ###"
    else:
        formatted_str += "\n### FAILED ###"

    return formatted_str


def run(modules: List[str]) -> bool:
    logger = utils.create_logger("pshlab", [logging.StreamHandler()], logging.WARNING)
    logger.info("running the testcases of %s", ", ".join(modules))

    results = defaultdict(dict)

    for module_name in modules:
        module = importlib.import_module(f"tests.{module_name}")
        for case in module.ALL_CASES:
            name = f"{module_name}.{case.__name__}"
            print(f"{f' {name} ':{'#'}^{70}}")

            start = perf_counter()

            thrown_exception = None
            formatted_traceback = None

            try:
                case()
            except Exception as test_exception:  # pylint:disable=broad-except
                thrown_exception = test_exception
                formatted_traceback = traceback.format_exc()

            results[name]["elapsed_time"] = perf_counter() - start
            results[name]["exception"] = thrown_exception
            results[name]["traceback"] = formatted_traceback

            if formatted_traceback is not None:
                print(formatted_traceback)

    print(format_results(results))
    return all(r["exception"] is None for r in results.values())


if __name__ == "__main__":
    sys.exit(0 if run(sys.argv[1:] or MODULES) else 1)

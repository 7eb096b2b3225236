import time


def pytest_configure(config):
    config._suite_start = time.perf_counter()

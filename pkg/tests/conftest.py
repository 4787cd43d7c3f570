import pathlib
import sys

import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Touch each JIT kernel once so compilation never lands in a timed test."""
    from bendrop import (
        KernelSpec,
        SphereField,
        equilibrium_measure,
        fibonacci_sphere_panels,
        get_grid,
    )

    equilibrium_measure(fibonacci_sphere_panels(64), KernelSpec(3, 2.0))
    SphereField.zero(get_grid(4)).values()

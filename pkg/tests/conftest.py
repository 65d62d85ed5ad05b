import os

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def q_operator(request):
    """The order-3 operator for q_n; the fit takes minutes, so it is kept in pytest's cache."""
    from zetaforms.cache import RecordCache
    from zetaforms.suites import fitted_operator

    root = request.config.cache.mkdir("zetaforms-operator")
    return fitted_operator(RecordCache(root))

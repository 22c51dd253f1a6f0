import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    'desk',
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile('thorough', max_examples=200, deadline=None)
settings.load_profile(os.environ.get('CATALAB_HYPOTHESIS_PROFILE', 'desk'))

"""
Lab settings, read from the ``CATALAB`` dict in the project settings.

    from catalytic.conf import lab_settings
    lab_settings.GRAPH_BUDGET
"""
from django.conf import settings
from django.test.signals import setting_changed
from rest_framework.settings import APISettings

DEFAULTS = {
    'GRAPH_BUDGET': 2_000_000,
    'BRUTE_FORCE_BUDGET': 1 << 16,
    'SEED_BUDGET': 1 << 12,
    'HORIZON_FACTOR': 4,
    'MAX_Y_LENGTH': 32,
    'DEFAULT_INPUTS': ('0', '1'),
    'PARAMS_PRESET': 'desk',
    'DESK_PARAMS': {
        'M': 4,
        'L': 16,
        'H': 4096,
        'T': 64,
        'T_PRIME': 16,
        'THRESHOLD': '1/8',
        'DELTA': '0/1',
        'EPS': '1/4',
    },
    'JOBS': 1,
    'REPORT_FORMAT': 'text',
}


class LabSettings(APISettings):
    @property
    def user_settings(self):
        if not hasattr(self, '_user_settings'):
            self._user_settings = getattr(settings, 'CATALAB', {})
        return self._user_settings


lab_settings = LabSettings(None, DEFAULTS)


def reload_lab_settings(*args, **kwargs) -> None:
    if kwargs['setting'] == 'CATALAB':
        lab_settings.reload()


setting_changed.connect(reload_lab_settings)

from fractions import Fraction

from rest_framework import serializers


class RationalField(serializers.Field):
    """Exact rationals written as ``num/den``."""
    default_error_messages = {
        'invalid': 'Expected a rational written as "num/den" or an integer.',
        'zero_denominator': 'The denominator cannot be zero.',
    }

    def to_representation(self, value):
        value = Fraction(value)
        return f'{value.numerator}/{value.denominator}'

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, int):
            return Fraction(data)
        if not isinstance(data, str):
            self.fail('invalid')
        num, _, den = data.strip().partition('/')
        try:
            return Fraction(int(num), int(den or 1))
        except ValueError:
            self.fail('invalid')
        except ZeroDivisionError:
            self.fail('zero_denominator')


def parse_rational(text):
    """Parse a command-line rational, raising ValidationError on bad input."""
    return RationalField().to_internal_value(text)


class ParamsSerializer(serializers.Serializer):
    """Compress-or-decide parameters read from a JSON file."""
    m = serializers.IntegerField(min_value=1)
    l = serializers.IntegerField(min_value=1)
    H = serializers.IntegerField(min_value=1)
    T = serializers.IntegerField(min_value=1)
    T_prime = serializers.IntegerField(min_value=1)
    threshold = RationalField()
    delta = RationalField(default=Fraction(0))
    eps = RationalField()
    alpha = RationalField(required=False)

    def validate_threshold(self, value):
        if not 0 < value <= 1:
            raise serializers.ValidationError('The threshold must lie in (0, 1].')
        return value

    def validate_eps(self, value):
        if not 0 < value <= Fraction(1, 2):
            raise serializers.ValidationError('eps must lie in (0, 1/2].')
        return value

    def validate(self, attrs):
        if attrs.get('alpha') is not None and attrs['alpha'] <= 0:
            raise serializers.ValidationError({'alpha': 'alpha must be positive.'})
        return attrs


# Reports

class ValidationReportSerializer(serializers.Serializer):
    name = serializers.CharField()
    state_count = serializers.IntegerField()
    s = serializers.IntegerField()
    c = serializers.IntegerField()
    randomized = serializers.BooleanField()
    deterministic = serializers.BooleanField()
    missing_rows = serializers.SerializerMethodField()
    halting_rows = serializers.SerializerMethodField()
    coin_mismatches = serializers.SerializerMethodField()
    bound_violations = serializers.SerializerMethodField()
    canonical_halts = serializers.BooleanField()
    d_M = serializers.IntegerField(allow_null=True)
    d_M_note = serializers.CharField(allow_blank=True)
    answer_conflicts = serializers.ListField(child=serializers.CharField(allow_blank=True))
    s_accounting = serializers.IntegerField()
    ok = serializers.BooleanField()

    def get_missing_rows(self, obj):
        return len(obj.missing_rows)

    def get_halting_rows(self, obj):
        return len(obj.halting_rows)

    def get_coin_mismatches(self, obj):
        return len(obj.coin_mismatches)

    def get_bound_violations(self, obj):
        return len(obj.bound_violations)


class RunOutcomeSerializer(serializers.Serializer):
    halt = serializers.CharField(source='halt.value')
    final_cat = serializers.CharField(allow_blank=True)
    steps = serializers.IntegerField()
    coins_consumed = serializers.IntegerField()


class TauRowSerializer(serializers.Serializer):
    tau = serializers.CharField()
    success = RationalField()
    reset = RationalField()
    expected_errors = RationalField()
    dontknow = RationalField()


class ClassReportSerializer(serializers.Serializer):
    kind = serializers.CharField()
    success_probability = RationalField()
    reset_probability = RationalField()
    expected_errors = RationalField()
    satisfied = serializers.BooleanField()
    witnesses = serializers.DictField(child=serializers.CharField(allow_blank=True))
    horizon = serializers.IntegerField()
    thresholds = serializers.DictField(child=RationalField())


class OneSidedReportSerializer(serializers.Serializer):
    delta = RationalField()
    eps = RationalField()
    yes_always_accepts = serializers.BooleanField()
    satisfied = serializers.BooleanField()
    witnesses = serializers.DictField(child=serializers.CharField(allow_blank=True))
    horizon = serializers.IntegerField()


class GraphStatsSerializer(serializers.Serializer):
    vertices = serializers.IntegerField()
    edges = serializers.IntegerField()
    sinks = serializers.IntegerField()
    max_degree = serializers.IntegerField()
    component_sizes = serializers.SerializerMethodField()

    def get_component_sizes(self, obj):
        return ' '.join(f'{size}x{count}' for size, count in obj.component_sizes.items())


class EccAuditSerializer(serializers.Serializer):
    c = serializers.IntegerField()
    e = serializers.IntegerField()
    length = serializers.IntegerField()
    redundancy = serializers.IntegerField()
    mu = serializers.IntegerField()
    parity_bits = serializers.IntegerField()
    words_checked = serializers.IntegerField()
    failures = serializers.SerializerMethodField()
    brute_force_mismatches = serializers.IntegerField()
    min_distance = serializers.IntegerField(allow_null=True)
    passed = serializers.BooleanField()

    def get_failures(self, obj):
        return len(obj.failures)


class CompressionOutcomeSerializer(serializers.Serializer):
    result = serializers.CharField()
    tag = serializers.CharField(allow_null=True)
    level = serializers.IntegerField(allow_null=True)
    freed_bits = serializers.IntegerField()
    f_acc = RationalField(allow_null=True)
    f_rej = RationalField(allow_null=True)
    note = serializers.CharField(allow_blank=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        for key in ('f_acc', 'f_rej'):
            if getattr(instance, key) is None:
                data[key] = '-'
        return data


class ErrorVectorOutcomeSerializer(serializers.Serializer):
    tau = serializers.CharField()
    result = serializers.CharField()
    vector = serializers.CharField(allow_null=True)
    tried = serializers.IntegerField()


class ZpProfileSerializer(serializers.Serializer):
    non_bottom = RationalField()
    good_and_small = RationalField()
    wrong = serializers.IntegerField()


class SuiteResultSerializer(serializers.Serializer):
    name = serializers.CharField()
    passed = serializers.BooleanField()
    detail = serializers.CharField(allow_blank=True)

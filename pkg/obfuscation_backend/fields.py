from django.core import validators
from django.core.exceptions import ValidationError
from django.db import models

UINT64_MAX = 2 ** 64 - 1


class UInt64Field(models.Field):
    """Unsigned 64-bit integer stored as decimal text.

    SQLite integers are signed, so seeds above 2**63 - 1 would not survive
    an integer column.
    """

    description = 'Unsigned 64-bit integer'
    default_validators = [
        validators.MinValueValidator(0),
        validators.MaxValueValidator(UINT64_MAX),
    ]

    def __init__(self, *args, **kwargs):
        kwargs['max_length'] = 20
        super().__init__(*args, **kwargs)

    def deconstruct(self):
        name, path, args, kwargs = super().deconstruct()
        del kwargs['max_length']
        return name, path, args, kwargs

    def get_internal_type(self):
        return 'CharField'

    def from_db_value(self, value, expression, connection):
        if value is None:
            return value
        return int(value)

    def to_python(self, value):
        if value is None or isinstance(value, int):
            return value
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ValidationError('Enter an unsigned 64-bit integer.', code='invalid')

    def get_prep_value(self, value):
        if value is None:
            return value
        return str(int(value))

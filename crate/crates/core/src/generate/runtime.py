from __future__ import annotations


class _Missing:
    """Marks an argument the caller did not pass."""

    __slots__ = ()

    def __repr__(self):
        return 'MISSING'

    def __bool__(self):
        return False


MISSING = _Missing()


def trim(values, more):
    """Drops trailing MISSING positionals. A gap before a passed value is an error."""
    values = list(values)
    full = len(values)
    while values and values[-1] is MISSING:
        values.pop()
    if any(v is MISSING for v in values) or (more and len(values) < full):
        raise TypeError('a positional argument was omitted before a later positional argument')
    return values


def enum_value(value, enum_type, allow_none):
    """The library value of an enum member. Raw strings are rejected."""
    if isinstance(value, enum_type):
        return value.value
    if value is None and allow_none:
        return None
    raise TypeError(f'expected a {enum_type.__name__} member, got {value!r}')


def group_kwargs(value, group_type):
    """Keyword arguments carried by a parameter object."""
    if value is None:
        return {}
    if isinstance(value, group_type):
        return dict(value._kwargs)
    raise TypeError(f'expected a {group_type.__name__}, got {value!r}')


class ParameterGroup:
    """Base of generated parameter objects. Build instances with the variant factories."""

    __slots__ = ('_kwargs',)

    def __init__(self, *args, **kwargs):
        raise TypeError(f'use a {type(self).__name__} variant instead of calling the class')

    @classmethod
    def _make(cls, kwargs):
        obj = object.__new__(cls)
        obj._kwargs = dict(kwargs)
        return obj

    def __eq__(self, other):
        return type(self) is type(other) and self._kwargs == other._kwargs

    __hash__ = None

    def __repr__(self):
        inner = ', '.join(f'{k}={v!r}' for k, v in self._kwargs.items())
        return f'{type(self).__name__}({inner})'

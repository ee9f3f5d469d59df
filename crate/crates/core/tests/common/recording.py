"""Patches a library so every call logs its bound arguments, defaults applied."""

import importlib
import inspect
import pkgutil

LOG = []


def _norm(value):
    if isinstance(value, dict):
        return '{' + ', '.join(f'{k!r}: {_norm(v)}' for k, v in sorted(value.items())) + '}'
    if isinstance(value, tuple):
        return '(' + ', '.join(_norm(v) for v in value) + ')'
    return repr(value)


def _recorder(name, fn):
    sig = inspect.signature(fn)

    def record(*args, **kwargs):
        bound = sig.bind(*args, **kwargs)
        bound.apply_defaults()
        values = {k: _norm(v) for k, v in bound.arguments.items() if k not in ('self', 'cls')}
        LOG.append([name, values])
        return fn(*args, **kwargs)

    record.__signature__ = sig
    return record


def _patch_class(cls, prefix):
    for attr, raw in list(vars(cls).items()):
        name = f'{prefix}.{attr}'
        if isinstance(raw, staticmethod):
            setattr(cls, attr, staticmethod(_recorder(name, raw.__func__)))
        elif isinstance(raw, classmethod):
            setattr(cls, attr, classmethod(_recorder(name, raw.__func__)))
        elif inspect.isfunction(raw) and (attr == '__init__' or not attr.startswith('__')):
            setattr(cls, attr, _recorder(name, raw))


def install(library):
    root = importlib.import_module(library)
    modules = [root]
    for info in pkgutil.walk_packages(root.__path__, library + '.'):
        modules.append(importlib.import_module(info.name))
    patched = set()
    for module in modules:
        for attr, value in list(vars(module).items()):
            if getattr(value, '__module__', None) != module.__name__:
                continue
            if inspect.isclass(value) and id(value) not in patched:
                patched.add(id(value))
                _patch_class(value, f'{module.__name__}.{value.__qualname__}')
            elif inspect.isfunction(value):
                setattr(module, attr, _recorder(f'{module.__name__}.{attr}', value))
    # Re-exports bound before patching still point at the original functions.
    for module in modules:
        for attr, value in list(vars(module).items()):
            if inspect.isfunction(value) and not hasattr(value, '__signature__'):
                home = importlib.import_module(value.__module__)
                patched_fn = getattr(home, value.__name__, None)
                if patched_fn is not None and patched_fn is not value:
                    setattr(module, attr, patched_fn)

from collections.abc import Hashable
from functools import singledispatch, update_wrapper
from types import MappingProxyType


def kinddispatch(func):
    """
    An extension of the singledispatch decorator that selects the implementation by the *value* of the first
    argument rather than only its type. The analytic formulas differ per coupling kind, so each kind registers
    its own implementation while the decorated function keeps a single public signature.

    Supports registering by:
    * equivalence (``Kind.LINEAR``); callers normalise strings with ``Kind.parse`` first
    * value type (basic single dispatch)

    The undecorated function is the fallback and is expected to raise for unknown values.
    """
    eq_registry = {}
    sd = singledispatch(func)

    def dispatch(value):
        if isinstance(value, Hashable):
            try:
                return eq_registry[value]
            except KeyError:
                pass
        return sd.dispatch(value.__class__)

    def register_eq(value, func=None):
        if func is None:
            return lambda f: register_eq(value, f)
        if not isinstance(value, Hashable):
            raise ValueError("Dispatch values must be hashable")
        eq_registry[value] = func
        return func

    def register(cls, func=None):
        if func is None:
            return lambda f: register(cls, f)
        sd.register(cls, func)
        return func

    def wrapper(*args, **kw):
        if not args:
            raise TypeError('{0} requires at least '
                            '1 positional argument'.format(funcname))
        return dispatch(args[0])(*args, **kw)

    funcname = getattr(func, '__name__', 'kinddispatch function')
    wrapper.register_eq = register_eq
    wrapper.register = register
    wrapper.dispatch = dispatch
    wrapper.eq_registry = MappingProxyType(eq_registry)
    wrapper.registry = sd.registry
    update_wrapper(wrapper, func)
    return wrapper

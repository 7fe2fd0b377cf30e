import math
from typing import Any, Iterable, Optional, Tuple, Type, Union


class ValidationError(ValueError):
    """
    Base exception for values that fail a domain check.
    """

    pass


def _as_type_tuple(types: Union[Type, Tuple[Optional[Type], ...], list]) -> tuple:
    if not isinstance(types, (tuple, list)):
        types = (types,)
    return tuple(type(None) if t is None else t for t in types)


def _type_names(types: tuple) -> str:
    return ", ".join(t.__name__ if t is not type(None) else "None" for t in types)


def validate_collection(
    value: Any,
    collection_type: Optional[Union[Type, Tuple[Optional[Type], ...]]] = tuple,
    element_count: Optional[int] = None,
    element_types: Optional[Union[Type, Tuple[Optional[Type], ...]]] = (int, float),
    name: str = "Value",
) -> None:
    """
    Validates that `value` is a container (or allowed None) of a certain type,
    with an optional fixed length and element types.

    Args:
        value: The object to validate.
        collection_type: A type or tuple of types (e.g. list, tuple) for the container itself.
                         If None, any non-string iterable is allowed. Include `None` to accept None.
        element_count: Exact length required. If None, any length is allowed.
        element_types: A type or tuple of types for the elements. If None, any element type is allowed.
        name: Label used in error messages.

    Raises:
        ValidationError: if any of the checks fail.
    """
    if collection_type is not None:
        ct_tuple = _as_type_tuple(collection_type)
        if value is None and type(None) in ct_tuple:
            return
        if not isinstance(value, ct_tuple):
            raise ValidationError(
                f"{name} must be one of types ({_type_names(ct_tuple)}), got {type(value).__name__}."
            )
    elif not isinstance(value, Iterable) or isinstance(value, (str, bytes)):
        raise ValidationError(
            f"{name} must be an iterable container, got {type(value).__name__}."
        )

    if element_count is not None:
        try:
            length = len(value)
        except TypeError:
            raise ValidationError(
                f"{name} has no length, cannot enforce element_count={element_count}."
            )
        if length != element_count:
            raise ValidationError(
                f"{name} length must be {element_count}, got {length}."
            )

    if element_types is not None:
        et_tuple = _as_type_tuple(element_types)
        for idx, elem in enumerate(value):
            if elem is None and type(None) in et_tuple:
                continue
            # bool is an int subclass but never a meaningful number here
            if isinstance(elem, bool) and bool not in et_tuple:
                raise ValidationError(
                    f"{name}: element at index {idx} must be one of ({_type_names(et_tuple)}), got bool."
                )
            if not isinstance(elem, et_tuple):
                raise ValidationError(
                    f"{name}: element at index {idx} must be one of ({_type_names(et_tuple)}), got {type(elem).__name__}."
                )


def validate_number(
    value: Any,
    name: str,
    types: Union[Type, Tuple[Type, ...]] = (int, float),
    minimum: Optional[Union[int, float]] = None,
    maximum: Optional[Union[int, float]] = None,
    exclusive_minimum: bool = False,
    exclusive_maximum: bool = False,
    allow_none: bool = False,
) -> None:
    """
    Validates a scalar setting.

    Raises:
        TypeError: if `value` is not one of `types` (bool is always rejected).
        ValidationError: if `value` is outside the configured bounds or is not finite.
    """
    if value is None:
        if allow_none:
            return
        raise TypeError(f"{name} must not be None.")

    types = _as_type_tuple(types)
    if isinstance(value, bool) or not isinstance(value, types):
        raise TypeError(
            f"{name} must be one of ({_type_names(types)}), got {type(value).__name__}."
        )

    if isinstance(value, float) and not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}.")

    if minimum is not None:
        if value < minimum or (exclusive_minimum and value == minimum):
            op = ">" if exclusive_minimum else ">="
            raise ValidationError(f"{name} must be {op} {minimum}, got {value}.")

    if maximum is not None:
        if value > maximum or (exclusive_maximum and value == maximum):
            op = "<" if exclusive_maximum else "<="
            raise ValidationError(f"{name} must be {op} {maximum}, got {value}.")

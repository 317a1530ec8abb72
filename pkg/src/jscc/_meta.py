"""Registration metaclass and case insensitive enums."""

from __future__ import annotations

import dataclasses
import logging
from enum import Enum, EnumMeta
from typing import Any

from typing_extensions import dataclass_transform


@dataclass_transform(kw_only_default=True)
class MetaDCRegister(type):
    """Turn subclasses into keyword-only dataclasses and register them by name.

    A class defining ``__<dunder_name>_name__`` is stored, under that upper
    cased name, in the ``__registry__`` of the root class. Each instance gets
    a ``log`` property with the logger ``jscc.<dunder_name>.<ClassName>``.
    """

    dunder_name: str

    def __new__(
        meta: type[MetaDCRegister],
        clsname: str,
        bases: tuple,
        class_dict: dict,
    ) -> type:
        """Build the dataclass and record it in the registry."""
        prefix = f"jscc.{meta.dunder_name}"
        class_dict["log"] = property(
            lambda self: logging.getLogger(f"{prefix}.{type(self).__name__}")
        )
        cls = dataclasses.dataclass(kw_only=True)(
            super().__new__(meta, clsname, bases, class_dict)  # type: ignore
        )
        if not bases:
            cls.__registry__ = {}
        # Subclasses inherit the name attribute but do not take over the entry.
        name = cls.__dict__.get(f"__{meta.dunder_name}_name__")
        if name is not None:
            cls.__registry__[name.upper()] = cls
        return cls

    def lookup(cls, name: str) -> type:
        """Registered class of ``name``, regardless of case."""
        try:
            return cls.__registry__[name.upper()]
        except KeyError as e:
            raise KeyError(
                f"Unknown {type(cls).dunder_name} {name!r}, "
                f"available are {sorted(cls.__registry__)}"
            ) from e


class NoCaseEnumMeta(EnumMeta):
    """Look members up by name regardless of case."""

    def __getitem__(cls, item: Any):
        return super().__getitem__(item.upper() if isinstance(item, str) else item)


class NoCaseEnum(Enum, metaclass=NoCaseEnumMeta):
    """Enum printed and looked up by member name."""

    def __str__(self) -> str:
        return self.name

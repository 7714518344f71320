"""Base-station array architectures compared by the simulator."""

import enum


class Architecture(str, enum.Enum):
    FDA_T = "FDA_T"  # fully-digital, fixed patterns
    SCA_T = "SCA_T"  # sub-connected hybrid, fixed patterns
    SCA_R = "SCA_R"  # sub-connected hybrid, reconfigurable patterns

    @property
    def hybrid(self) -> bool:
        return self is not Architecture.FDA_T

    @property
    def reconfigurable(self) -> bool:
        return self is Architecture.SCA_R

    @classmethod
    def parse(cls, value) -> "Architecture":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            names = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown architecture {value!r} (expected one of {names})") from None

    def __str__(self) -> str:
        return self.value

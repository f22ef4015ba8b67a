"""Column layout of the tempered-steel table."""

from dataclasses import dataclass

FEATURE_NAMES: tuple[str, ...] = (
    "tempering_time_s",
    "tempering_temp_C",
    "C",
    "Mn",
    "P",
    "S",
    "Si",
    "Ni",
    "Cr",
    "Mo",
    "V",
    "Al",
    "Cu",
)
TARGET_NAME = "hardness_HRC"

TIME_COLUMN = 0
TEMPERATURE_COLUMN = 1
COMPOSITION_NAMES: tuple[str, ...] = FEATURE_NAMES[2:]

# Raw-space validity of the target column (HRC).
TARGET_RANGE = (0.0, 70.0)


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names plus the target name."""
    features: tuple[str, ...] = FEATURE_NAMES
    target: str = TARGET_NAME

    @property
    def columns(self) -> tuple[str, ...]:
        return self.features + (self.target,)

    @property
    def n_features(self) -> int:
        return len(self.features)

    def index(self, name: str) -> int:
        lowered = [f.lower() for f in self.features]
        try:
            return lowered.index(name.lower())
        except ValueError:
            raise KeyError(name) from None


STEEL_SCHEMA = FeatureSchema()

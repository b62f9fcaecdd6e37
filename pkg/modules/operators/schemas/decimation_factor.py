from pydantic import BaseModel, ConfigDict, Field


class DecimationFactor(BaseModel):
    """
    Integer scale factor of the decimation operator S.
    """

    model_config = ConfigDict(frozen=True)

    alpha: int = Field(ge=1)

from . import Configuration, EngineOptions
from ..types import *


class StandardConfiguration(Configuration):
    """ The reference defaults: cosine, euclidean and DTW similarity with every adaptive feature enabled """

    def engine_options(self) -> EngineOptions:
        return EngineOptions()

    def baseline_specs(self) -> list[BaselineSpec]:
        # knn lag follows the engine window, or the smallest fixed default window when that is adaptive
        lag = self.engine.window_size or 10
        return [
            BaselineSpec(kind="naive"),
            BaselineSpec(kind="sma", parameters={"n": 5}),
            BaselineSpec(kind="ses", parameters={"alpha": 0.3}),
            BaselineSpec(kind="holt_winters", parameters={"alpha": 0.3, "beta": 0.1, "gamma": 0.1, "period": 12}),
            BaselineSpec(kind="theta"),
            BaselineSpec(kind="croston", parameters={"alpha": 0.3}),
            BaselineSpec(kind="knn_lag", parameters={"k": 5, "lag": lag}),
        ]

from . import EngineOptions, standard


class FastConfiguration(standard.StandardConfiguration):
    """ Skips DTW and the extra window levels, for long series """

    def engine_options(self) -> EngineOptions:
        return EngineOptions(similarity_methods=("cosine", "euclidean"), multi_level=False)

from mapsed.types.exceptions import MapsedError


class EvaluationError(MapsedError):
    description = 'Evaluation could not be completed'


class EmptyTrainingSetError(EvaluationError):
    description = 'A fitted baseline needs at least one training sequence'

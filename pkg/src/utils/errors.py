# src/utils/errors.py
"""
mixsem 도메인 예외 모음.
모든 예외는 MixsemError(ValueError)를 상속하므로 CLI에서 한 번에 잡을 수 있습니다.
"""


class MixsemError(ValueError):
    """패키지 공통 예외"""


# ------------------------------------------------------------------
# SEM / 개입
# ------------------------------------------------------------------
class CyclicGraph(MixsemError):
    pass


class DimensionMismatch(MixsemError):
    pass


class InvalidRowSupport(MixsemError):
    pass


class NonPositiveVariance(MixsemError):
    pass


class FactorizationFailure(MixsemError):
    pass


# ------------------------------------------------------------------
# 혼합 분포
# ------------------------------------------------------------------
class DuplicateTarget(MixsemError):
    pass


class WeightSumMismatch(MixsemError):
    pass


class NonPositiveWeight(MixsemError):
    pass


class EmptyRequest(MixsemError):
    pass


class IneffectiveIntervention(MixsemError):
    pass


# ------------------------------------------------------------------
# 분리 하한
# ------------------------------------------------------------------
class SameTarget(MixsemError):
    pass


class NegativeInput(MixsemError):
    pass


class TooFewComponents(MixsemError):
    pass


# ------------------------------------------------------------------
# EM / 탐색
# ------------------------------------------------------------------
class TooFewSamples(MixsemError):
    pass


class DegenerateComponent(MixsemError):
    pass


class InvalidPair(MixsemError):
    pass


class SingularConditioning(MixsemError):
    pass


class InvalidConfig(MixsemError):
    pass


# ------------------------------------------------------------------
# 평가 / 하네스
# ------------------------------------------------------------------
class EstimatedFewerThanTruth(MixsemError):
    pass


class NonFiniteData(MixsemError):
    pass


class SchemaMismatch(MixsemError):
    pass


class UnknownCondition(MixsemError):
    pass


class EmptySplit(MixsemError):
    pass


class UnknownMetric(MixsemError):
    pass

"""Reference update rules."""

from selfaug.augmentation.fusion import fuse_add, fuse_concat
from selfaug.augmentation.state import AdaptationState
from selfaug.embedding import EmbeddingVector, add, check_same_dim
from selfaug.errors import WrongRuleError
from selfaug.models.fusion import FusionKind

ADDITIVE_KINDS = (FusionKind.ADD, FusionKind.NAIVE_ADD)
ONE_SHOT_KINDS = (FusionKind.NONE, FusionKind.SELECTED, FusionKind.CONCAT, FusionKind.ADD)


def long_term_update(state: AdaptationState, selected: EmbeddingVector) -> AdaptationState:
    """Residual-anchored update of the reference.

    Averages the current reference with the keyframe, then pulls the result
    back toward the original enrollment with weight lambda:

        avg = 0.5 * (current + selected)
        new = lam * enroll + (1 - lam) * avg

    Args:
        state: Current state under the weighted rule
        selected: Keyframe of the segment

    Returns:
        New state with n incremented and the enrollment unchanged

    Raises:
        WrongRuleError: If the state is not under the weighted rule
        DimensionMismatchError: If the keyframe dimension differs
    """
    if state.rule.kind != FusionKind.WEIGHTED:
        raise WrongRuleError(
            f"long-term update needs the weighted rule, not {state.rule.kind.value}"
        )
    check_same_dim(state.current, selected)
    lam = state.rule.lam
    avg = 0.5 * (state.current.values + selected.values)
    new = lam * state.enroll.values + (1.0 - lam) * avg
    return state.advanced(EmbeddingVector(new))


def naive_iterative_update(state: AdaptationState, selected: EmbeddingVector) -> AdaptationState:
    """Add the keyframe to the current reference with no anchoring.

    Repeating this with a fixed keyframe s from enrollment e gives e + k * s,
    whose norm grows without bound.

    Raises:
        WrongRuleError: If the state is not under an additive rule
    """
    if state.rule.kind not in ADDITIVE_KINDS:
        raise WrongRuleError(f"naive update needs an additive rule, not {state.rule.kind.value}")
    return state.advanced(add(state.current, selected))


def one_shot_update(state: AdaptationState, selected: EmbeddingVector) -> AdaptationState:
    """Fuse the keyframe with the enrollment once; later calls hold the reference.

    none keeps the enrollment, selected replaces it with the keyframe, concat
    stacks both and add sums them.
    """
    kind = state.rule.kind
    if kind not in ONE_SHOT_KINDS:
        raise WrongRuleError(f"{kind.value} is not a one-shot rule")
    if kind == FusionKind.NONE or state.n > 1:
        return state
    check_same_dim(state.enroll, selected)
    if kind == FusionKind.SELECTED:
        return state.advanced(selected)
    if kind == FusionKind.CONCAT:
        return state.advanced(fuse_concat(state.enroll, selected))
    return state.advanced(fuse_add(state.enroll, selected))


def apply_rule(state: AdaptationState, selected: EmbeddingVector) -> AdaptationState:
    """Dispatch to the update of the state's rule."""
    kind = state.rule.kind
    if kind == FusionKind.WEIGHTED:
        return long_term_update(state, selected)
    if kind == FusionKind.NAIVE_ADD:
        return naive_iterative_update(state, selected)
    return one_shot_update(state, selected)

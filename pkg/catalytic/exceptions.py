"""
Errors raised by the catalytic lab.

Every error carries a human readable ``detail``, a short machine readable
``code`` and the process ``exit_code`` the ``ctm`` command reports for it.
"""


class CatalyticError(Exception):
    """Base class for all lab errors."""
    default_detail = 'A catalytic lab error occurred.'
    default_code = 'error'
    exit_code = 1

    def __init__(self, detail=None, code=None):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code if code is not None else self.default_code
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)


# Machine model

class ParseError(CatalyticError):
    default_detail = 'Malformed input.'
    default_code = 'parse_error'
    exit_code = 2


class TransitionError(CatalyticError):
    default_detail = 'The transition cannot be applied.'
    default_code = 'transition_error'


class StepOnHalted(TransitionError):
    default_detail = 'Cannot step a halting configuration.'
    default_code = 'step_on_halted'


class HeadOutOfBounds(TransitionError):
    default_detail = 'A head move leaves its tape.'
    default_code = 'head_out_of_bounds'


class MissingTransition(TransitionError):
    default_detail = 'No transition row for this configuration.'
    default_code = 'missing_transition'


class LengthMismatch(CatalyticError):
    default_detail = 'Bitstrings have different lengths.'
    default_code = 'length_mismatch'
    exit_code = 2


class NotDeterministic(CatalyticError):
    default_detail = 'The operation requires a deterministic machine.'
    default_code = 'not_deterministic'
    exit_code = 2


class TransformError(CatalyticError):
    default_detail = 'The machine cannot be transformed.'
    default_code = 'transform_error'
    exit_code = 2


# Runs and verification

class HorizonExceeded(CatalyticError):
    default_detail = 'The run did not halt within the horizon.'
    default_code = 'horizon_exceeded'


class NotHalting(HorizonExceeded):
    default_detail = 'Probability mass remains unabsorbed at the horizon.'
    default_code = 'not_halting'


class BudgetExceeded(CatalyticError):
    default_detail = 'The requested enumeration exceeds the configured budget.'
    default_code = 'budget_exceeded'
    exit_code = 3


class EmptyGraph(CatalyticError):
    default_detail = 'The graph has no vertices.'
    default_code = 'empty_graph'


# Graph traversal

class LevelZero(CatalyticError):
    default_detail = 'Level-0 nodes have no successors.'
    default_code = 'level_zero'


class BitAccessFailure(CatalyticError):
    default_detail = 'The y-bit could not be read.'
    default_code = 'bit_access_failure'


class TraversalError(CatalyticError):
    default_detail = 'The reverse walk did not return to its origin.'
    default_code = 'traversal_error'


# Hashing and codes

class WidthMismatch(CatalyticError):
    default_detail = 'The bitstring has the wrong width.'
    default_code = 'width_mismatch'
    exit_code = 2


class IndexRange(CatalyticError):
    default_detail = 'Index out of range.'
    default_code = 'index_range'
    exit_code = 2


class DecodeFailure(CatalyticError):
    default_detail = 'No codeword lies within the correctable distance.'
    default_code = 'decode_failure'


class InadmissibleParams(CatalyticError):
    default_detail = 'No code exists for these parameters within the redundancy budget.'
    default_code = 'inadmissible_params'
    exit_code = 3


# Compression

class ParamsInfeasible(CatalyticError):
    default_detail = 'The parameters are infeasible at this scale.'
    default_code = 'params_infeasible'
    exit_code = 3


class SizeBoundViolated(CatalyticError):
    default_detail = 'A y-tree exceeds the size bound.'
    default_code = 'size_bound_violated'


class PreconditionFailed(CatalyticError):
    default_detail = 'The compression precondition does not hold.'
    default_code = 'precondition_failed'


class PreconditionNotBig(PreconditionFailed):
    default_detail = 'The y-tree is not larger than H.'
    default_code = 'precondition_not_big'


class PreconditionSmallS(PreconditionFailed):
    default_detail = 'The S_i set is smaller than T.'
    default_code = 'precondition_small_s'


class IndexOverflow(CatalyticError):
    default_detail = 'The bad-hash index does not fit in the freed slot.'
    default_code = 'index_overflow'


class InadmissibleTape(CatalyticError):
    default_detail = 'The tape index lies outside the indexed set.'
    default_code = 'inadmissible_tape'


class SeedClassUnstable(CatalyticError):
    default_detail = 'The catalytic setting is missing from its seed classes.'
    default_code = 'seed_class_unstable'


class UnknownTag(CatalyticError):
    default_detail = 'The tape carries no valid compression record.'
    default_code = 'unknown_tag'


class AllChunksUndecided(CatalyticError):
    default_detail = 'No chunk decided and not every chunk compressed.'
    default_code = 'all_chunks_undecided'

    def __init__(self, detail=None, code=None, final_tape=None):
        super().__init__(detail, code)
        self.final_tape = final_tape


class CoinsExhausted(CatalyticError):
    default_detail = 'The coin stream ran out before the machine halted.'
    default_code = 'coins_exhausted'
    exit_code = 2

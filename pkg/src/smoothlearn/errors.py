"""Exception types shared across the package."""


class SmoothlearnError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SmoothlearnError):
    """A strategy or utility vector has the wrong length for its player."""

    def __init__(self, player: int, expected: int, got: int):
        self.player = player
        self.expected = expected
        self.got = got
        super().__init__(
            f"player {player}: expected a vector of length {expected}, got {got}"
        )


class EnumerationTooLarge(SmoothlearnError):
    """A joint-profile enumeration would exceed the configured cell cap."""

    def __init__(self, cells: int, cap: int):
        self.cells = cells
        self.cap = cap
        super().__init__(f"enumeration too large: {cells} cells exceeds cap {cap}")


class NonFiniteInput(SmoothlearnError):
    """NaN or infinity encountered where a finite value is required."""


class IllConditionedProgram(SmoothlearnError):
    """The LP solver hit a numerically degenerate pivot."""

    def __init__(self, row: int, col: int, value: float):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(
            f"ill-conditioned: pivot at row {row}, column {col} has magnitude {value:.3e}"
        )


class FixedPointBudgetExhausted(SmoothlearnError):
    """Picard iteration did not reach the target residual within its budget."""

    def __init__(self, iterations: int, residual: float, target: float):
        self.iterations = iterations
        self.residual = residual
        self.target = target
        super().__init__(
            f"fixed-point budget of {iterations} iterations exhausted; "
            f"last residual {residual:.3e} > target {target:.3e} "
            "(the Lipschitz bound used to size the budget is likely wrong)"
        )

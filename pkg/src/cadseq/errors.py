"""Exception hierarchy shared by every subpackage."""


class CadError(Exception):
    """Base class for all errors raised by cadseq."""

    #: short machine-readable tag, printed by the CLI
    kind = "CadError"

    def __init__(self, message: str = "", **context):
        super().__init__(message or self.kind)
        self.context = context

    def __str__(self):
        msg = super().__str__()
        if self.context:
            extra = ", ".join(f"{k}={v}" for k, v in sorted(self.context.items()))
            return f"{self.kind}: {msg} ({extra})"
        return f"{self.kind}: {msg}"


def _make(name: str, base=CadError, doc: str = ""):
    cls = type(name, (base,), {"kind": name, "__doc__": doc or name})
    return cls


class SequenceError(CadError):
    kind = "SequenceError"


class GeometryError(CadError):
    kind = "GeometryError"


class KernelError(CadError):
    kind = "KernelError"


class MetricError(CadError):
    kind = "MetricError"


class PipelineError(CadError):
    kind = "PipelineError"


# cmdseq
MalformedJson = _make("MalformedJson", SequenceError)
UnknownCurveType = _make("UnknownCurveType", SequenceError)
SketchWithoutExtrusion = _make("SketchWithoutExtrusion", SequenceError)
ValueOutOfRange = _make("ValueOutOfRange", SequenceError)
MissingRequiredSlot = _make("MissingRequiredSlot", SequenceError)
TruncatedStream = _make("TruncatedStream", SequenceError)
IllegalTokenAtPosition = _make("IllegalTokenAtPosition", SequenceError)
DegenerateBbox = _make("DegenerateBbox", CadError)


class InvalidSequence(SequenceError):
    """Raised when a parsed sequence fails validation; carries the violations."""

    kind = "InvalidSequence"

    def __init__(self, violations, message: str = ""):
        self.violations = list(violations)
        text = message or "; ".join(str(v) for v in self.violations)
        super().__init__(text)


# sketch2d
OpenLoop = _make("OpenLoop", GeometryError)
DegenerateArc = _make("DegenerateArc", GeometryError)
CrossingLoops = _make("CrossingLoops", GeometryError)
MultipleOuterLoops = _make("MultipleOuterLoops", GeometryError)
DegenerateRegion = _make("DegenerateRegion", GeometryError)

# solid_kernel
NonPositiveScale = _make("NonPositiveScale", KernelError)
EmptyExtent = _make("EmptyExtent", KernelError)
OpenInputMesh = _make("OpenInputMesh", KernelError)
EmptyResult = _make("EmptyResult", KernelError)
EmptyMesh = _make("EmptyMesh", CadError)

# metrics
InvalidFaceIndex = _make("InvalidFaceIndex", MetricError)
EmptyGroundTruth = _make("EmptyGroundTruth", MetricError)
EmptyCloud = _make("EmptyCloud", MetricError)
MissingNormals = _make("MissingNormals", MetricError)

# data pipeline
AugmentedInputToSplit = _make("AugmentedInputToSplit", PipelineError)
NegativeSigma = _make("NegativeSigma", PipelineError)
FractionOutOfRange = _make("FractionOutOfRange", PipelineError)
TooFewViews = _make("TooFewViews", PipelineError)
ClientUnavailable = _make("ClientUnavailable", PipelineError)
PrefixViolation = _make("PrefixViolation", PipelineError)

class CertifiedDeletionError(Exception):
    pass


class ConfigurationError(CertifiedDeletionError):
    pass


class ParameterError(CertifiedDeletionError):
    pass


class InfeasibleTargetError(ParameterError):
    pass


class LengthMismatchError(CertifiedDeletionError, ValueError):
    pass


class QuantumSimulationError(CertifiedDeletionError):
    pass


class SerializationError(CertifiedDeletionError):
    pass

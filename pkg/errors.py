"""
Exception types for the partition lab.

Every error carries the process exit code the command line reports for it:
0 success, 1 verification failure, 2 usage error, 3 resource limit.
"""


class PartitionLabError(Exception):
    """Base class for all errors raised by the partition lab"""
    exit_code = 1


class UsageError(PartitionLabError):
    """A precondition on an argument was violated"""
    exit_code = 2


class ConfigError(UsageError):
    """A configuration value (environment or flag) is invalid"""


class TableTooSmallError(UsageError):
    """A partition table was asked for an index beyond its limit"""


class ResourceLimitError(PartitionLabError):
    """A configured size limit (table, trace, enumeration) was exceeded"""
    exit_code = 3


class VerificationFailure(PartitionLabError):
    """An identity did not hold where it was claimed to hold"""
    exit_code = 1

"""Errors shared between broker and client sides of the bus."""


class BusError(Exception):
    pass


class ConfigError(BusError):
    pass


class AddressInUseError(BusError):
    pass


class PermissionDeniedError(BusError):
    pass


class DuplicateClientError(BusError):
    pass


class PayloadTooLargeError(BusError):
    pass


class NotConnectedError(BusError):
    pass


class RequestTimeoutError(BusError):
    pass

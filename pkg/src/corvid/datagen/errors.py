class DatagenError(Exception):
    pass

from .validation import validate_collection, validate_number, ValidationError

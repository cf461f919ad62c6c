"""
COPERNIC: composition de services en MANET par un agent cognitif.
"""

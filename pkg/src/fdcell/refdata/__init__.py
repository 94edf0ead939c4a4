"""Packaged reference curves digitized from the published figures."""

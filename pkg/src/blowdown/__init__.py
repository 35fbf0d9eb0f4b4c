"""Exact homological bookkeeping for rational blow-downs of rational surfaces."""

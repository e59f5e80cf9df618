# tests/__init__.py
# GNU General Public License v3.0
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR
#
# Test suite package for the QAOA transferability toolkit
# Unit tests per module, CLI end-to-end runs, slow acceptance runs

"""
Test package for qaoatransfer.

Includes:
- test_graph.py
- test_simulator.py
- test_energy.py
- test_optimizer.py
- test_maxcut.py
- test_centers.py
- test_metrics.py
- test_storage.py
- test_config.py
- test_cli.py
- test_acceptance.py (slow; needs --runslow)

Run with: pytest tests/ -v
Full acceptance: pytest tests/ --runslow
CI ensemble size: QAOATRANSFER_ENSEMBLE_GRAPHS=44 pytest tests/ --runslow
"""

__version__ = "1.0.0"
